#pragma once

#include "rotorlab/body.hpp"
#include "rotorlab/config.hpp"
#include "rotorlab/control.hpp"
#include "rotorlab/sysid.hpp"

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace rotorlab {

enum class ScenarioKind {
    Doublet,
    ClosedLoop,
    FlapOnly,
    BemSweep,
    PowerCurve,
    MissionEnergy,
    FitRates,
    FitPlanar,
    FitDrag,
};

ScenarioKind parse_scenario_kind(const std::string& name); // throws ConfigError

// Ordered key/value summary; written to summary.txt and returned to callers
// so tests do not have to re-parse the artifacts.
struct ScenarioResult {
    std::filesystem::path out_dir;
    std::vector<std::pair<std::string, std::string>> summary;

    bool has(const std::string& key) const;
    double value(const std::string& key) const;            // throws InputError
    std::string text(const std::string& key) const;        // throws InputError
};

// Parses, validates, runs and writes artifacts for one scenario file.
// Validation completes before any output is created, so a malformed config
// leaves no partial outputs behind. Errors: ConfigError (bad config),
// InputError (missing inputs), NumericError (simulation/fit failure).
ScenarioResult run_scenario(const std::string& config_path, const std::string& output_root);

// Stepping wrapper used by the closed-loop experiment; validates once and
// caches the derived coefficients.
class CoupledSimulator {
public:
    CoupledSimulator(const CoupledVehicle& vehicle, double dt);

    const CoupledState& state() const { return state_; }
    double time() const { return steps_ * dt_; }
    double dt() const { return dt_; }

    void step(const CyclicCommand& cmd);

private:
    CoupledVehicle vehicle_;
    CoupledState state_;
    double dt_;
    long steps_ = 0;
};

// ---- closed-loop experiment ------------------------------------------------

struct ClosedLoopOptions {
    double kc = 0.5;
    double kp = 12.0;
    double kq = 12.0;
    double loop_hz = 512.0;
    double feedback_cutoff_rad_s = 25.0;
    double fit_cutoff_rad_s = 15.0;
    double sim_dt_s = 1.0 / 2048.0;
    Axis axis = Axis::Pitch;
    double rate_amplitude_rad_s = 1.5;
    double doublet_duration_s = 3.0;
    double settle_s = 3.0;
    // identification phase
    double id_duration_s = 25.0;
    double id_amplitude = 0.1;
    double id_sample_hz = 256.0;
    // when false, the controller model comes from the rows below instead of
    // an identification run (coefficients supplied through the config file)
    bool identify_model = true;
    RateAxisFit config_fp;
    RateAxisFit config_fq;
};

struct ClosedLoopMetrics {
    RateModelFit fit;
    double rms_on_axis = 0.0;
    double rms_cross_axis = 0.0;
    std::vector<RateSample> trace;
    std::vector<LogFrame> id_log;
};

// Identifies the rate model on the coupled plant, then flies a closed-loop
// rate doublet with the decoupling law.
ClosedLoopMetrics run_closed_loop_experiment(const CoupledVehicle& vehicle,
                                             const ClosedLoopOptions& options);

// Open-loop multi-sine excitation log for identification.
std::vector<LogFrame> run_identification_experiment(const CoupledVehicle& vehicle,
                                                    double duration_s, double amplitude,
                                                    double sim_dt_s, double sample_hz);

// Shared CoupledVehicle extraction from a [vehicle] config section.
CoupledVehicle vehicle_from_config(const Config& cfg);

} // namespace rotorlab
