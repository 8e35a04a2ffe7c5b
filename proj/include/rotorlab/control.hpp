#pragma once

#include "rotorlab/filter.hpp"

#include <vector>

namespace rotorlab {

struct ServoTriplet {
    double s1 = 0.0, s2 = 0.0, s3 = 0.0;
};

// Swash-plate mixing:
//   s1 =  (sqrt(2)/2) dp - dq/2
//   s2 = -(sqrt(2)/2) dp - dq/2
//   s3 =  dq
ServoTriplet mix_servos(double delta_p, double delta_q);

struct UnmixResult {
    double delta_p = 0.0;
    double delta_q = 0.0;
    double residual = 0.0; // 2-norm distance of the input to the mixing image
};

// Least-squares inverse of mix_servos; exact (residual 0) when the triplet
// lies in the mixing image, which is the plane s1 + s2 + s3 = 0.
UnmixResult unmix_servos(double s1, double s2, double s3);

// Monotone map from normalized collective servo command to blade pitch in
// degrees. The default shipped calibration is a straight line over the
// +/-40 degree linkage range; measured rigs replace the table.
class CollectiveLinkage {
public:
    struct Point {
        double cmd = 0.0;
        double pitch_deg = 0.0;
    };

    // throws std::invalid_argument unless cmd strictly increasing and
    // pitch strictly monotone
    explicit CollectiveLinkage(std::vector<Point> table);

    static CollectiveLinkage identity_default(); // [-1, 1] -> [-40, 40] deg

    // piecewise-linear evaluation; throws std::out_of_range outside the
    // calibrated command range
    double pitch_deg(double cmd) const;

    double cmd_min() const { return table_.front().cmd; }
    double cmd_max() const { return table_.back().cmd; }

private:
    std::vector<Point> table_;
};

struct Mat2 {
    // row major: [a b; c d]
    double a = 1.0, b = 0.0, c = 0.0, d = 1.0;
    double det() const { return a * d - b * c; }
};

// One identified acceleration model row: xdot = c_o + c_dx*dx + c_dy*dy + c_p*p + c_q*q.
struct RateAxisFit {
    double c_o = 0.0;
    double c_dx = 0.0;
    double c_dy = 0.0;
    double c_p = 0.0;
    double c_q = 0.0;
};

// Identified rate model plus controller gains. gain_qp multiplies the
// measured q in the roll channel feedforward and gain_pq the measured p in
// the pitch channel; see the factory functions for how they are derived
// from the fitted cross coefficients.
struct RateModel {
    RateAxisFit fp; // roll acceleration row
    RateAxisFit fq; // pitch acceleration row
    double kc = 0.5;
    double kp = 1.0;
    double kq = 1.0;
    double gain_qp = 0.0;
    double gain_pq = 0.0;

    Mat2 effectiveness() const { return {fp.c_dx, fp.c_dy, fq.c_dx, fq.c_dy}; }

    // throws std::invalid_argument when |det G| <= 1e-12 or kc outside [0,1]
    void validate() const;

    // Published reference coefficients; feedforward gains taken verbatim
    // from the cross cells (gain_qp = fp.c_q, gain_pq = fq.c_p).
    static RateModel reference_fixture(double kc = 0.5, double kp = 1.0, double kq = 1.0);

    // Model built from an identification run; feedforward gains are the
    // negated cross coefficients so the rate terms cancel in closed loop.
    static RateModel from_identification(const RateAxisFit& fp, const RateAxisFit& fq,
                                         double kc, double kp, double kq);
};

struct CyclicPair {
    double delta_x = 0.0;
    double delta_y = 0.0;
};

// Decoupling rate law:
//   [dx dy]' = G^-1 [ kp*p_err + q*gain_qp*kc,  kq*q_err + p*gain_pq*kc ]'
// throws NumericError "singular-G" when the effectiveness matrix cannot be
// inverted.
CyclicPair rate_control(double p_err, double q_err, double p, double q, const RateModel& model);

// Discrete-time controller instance: holds the feedback filters and runs at
// a fixed loop rate. Rates are low-passed before entering the law.
class RateController {
public:
    RateController(const RateModel& model, double loop_hz = 512.0,
                   double feedback_cutoff_rad_s = 25.0, double command_limit = 1.0);

    // one loop tick: measured rates in, cyclic command out
    CyclicPair update(double p_cmd, double q_cmd, double p_meas, double q_meas);

    double loop_dt() const { return dt_; }

private:
    RateModel model_;
    double dt_;
    double limit_;
    SecondOrderLowpass filt_p_;
    SecondOrderLowpass filt_q_;
};

} // namespace rotorlab
