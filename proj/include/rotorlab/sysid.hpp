#pragma once

#include "rotorlab/control.hpp"
#include "rotorlab/ols.hpp"

#include <string>
#include <vector>

namespace rotorlab {

// One flight-log record. Rates are rad/s internally; deg/s logs are
// converted at ingestion.
struct LogFrame {
    double t = 0.0;
    double p = 0.0, q = 0.0;        // body rates
    double delta_x = 0.0, delta_y = 0.0; // cyclic commands
    double rpm = 0.0;
    double collective_cmd = 0.0;
    double throttle = 0.0;
    double current_a = 0.0;
    double voltage_v = 0.0;
    double airspeed_ms = 0.0;
    bool airspeed_valid = false;
};

inline constexpr const char* kLogHeader = "t,p,q,dx,dy,rpm,coll,thr,amps,volts,tas";
inline constexpr const char* kLogHeaderDeg = "t,p_deg,q_deg,dx,dy,rpm,coll,thr,amps,volts,tas";

// Reads a log CSV against the fixed schema. Throws InputError
// "schema-mismatch" on a wrong header and "non-monotone-time" (with the
// line number) when timestamps do not strictly increase.
std::vector<LogFrame> ingest_log(const std::string& path);

void write_log_csv(const std::string& path, const std::vector<LogFrame>& frames);

// Causal second-order low-pass over a uniformly sampled series.
std::vector<double> filter_second_order(const std::vector<double>& signal, double cutoff_rad_s,
                                        double dt_s);

struct RateDerivatives {
    std::vector<double> t;      // timestamps of the valid samples
    std::vector<double> p_dot;
    std::vector<double> q_dot;
    std::vector<double> p_filt; // filtered rates at the same samples
    std::vector<double> q_filt;
    std::vector<std::size_t> index; // indices into the source log
    double dt = 0.0;
};

// Filters p and q at the given cutoff, then differentiates the filtered
// rates by central differences. Needs at least 3 frames (InputError
// "too-few-frames") and a uniform sample time.
RateDerivatives derive_rates(const std::vector<LogFrame>& log, double cutoff_rad_s);

struct RateModelFit {
    RateAxisFit fp;
    RateAxisFit fq;
    double residual_rms_p = 0.0;
    double residual_rms_q = 0.0;
    double orthogonality = 0.0; // worst normalized regressor-residual product
    bool used_qr_fallback = false;
};

struct RateFitOptions {
    double cutoff_rad_s = 15.0;
    // samples dropped at the head so filter transients do not bias the fit;
    // expressed in filter time constants
    double burn_in_time_constants = 30.0;
};

// Least-squares fit of the two acceleration rows on regressors
// [1, dx, dy, p, q]. Every column, including the constant, passes through
// the same low-pass the accelerations are built from, which keeps the fit
// exact on discretely consistent data. Throws NumericError
// "rank-deficient" when the regressors are degenerate.
RateModelFit fit_rate_model(const std::vector<LogFrame>& log, const RateFitOptions& opts = {});

struct PlanarFit {
    double a0 = 0.0;
    double a_pitch = 0.0;
    double a_throttle = 0.0;
    double residual_rms = 0.0;
};

struct PlanarSample {
    double pitch = 0.0;
    double throttle = 0.0;
    double power_w = 0.0;
};

// P = a0 + a_pitch*pitch + a_throttle*throttle; needs >= 3 non-collinear
// samples (NumericError "degenerate-samples").
PlanarFit fit_planar_power(const std::vector<PlanarSample>& samples);

struct DragSample {
    double airspeed_ms = 0.0;
    double drag_n = 0.0;
};

// Single-coefficient fit of D = (rho/2) V^2 k. Requires at least one sample
// with V > 0 (InputError "no-valid-samples").
double fit_pole_drag(const std::vector<DragSample>& samples, double rho = 1.225);

// ---- synthetic log generation --------------------------------------------

struct SyntheticLogOptions {
    double duration_s = 60.0;
    double sample_hz = 100.0;
    double accel_noise_fraction = 0.0; // white noise on accelerations, as a
                                       // fraction of their RMS
    unsigned long long seed = 1;
};

// Builds a log whose samples satisfy the discrete model identity
//   central_diff(rates) = C_o + C_dx dx + C_dy dy + C_p p + C_q q
// exactly (up to the requested noise): smooth multi-sine rates are laid
// down first and the inputs are back-solved through the effectiveness
// matrix. This is the self-generation oracle for the identification fit.
std::vector<LogFrame> make_synthetic_rate_log(const RateModel& model,
                                              const SyntheticLogOptions& opts = {});

} // namespace rotorlab
