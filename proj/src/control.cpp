#include "rotorlab/control.hpp"

#include "rotorlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotorlab {

namespace {
constexpr double kHalfSqrt2 = 0.70710678118654752440;
}

ServoTriplet mix_servos(double delta_p, double delta_q) {
    return {kHalfSqrt2 * delta_p - 0.5 * delta_q,
            -kHalfSqrt2 * delta_p - 0.5 * delta_q,
            delta_q};
}

UnmixResult unmix_servos(double s1, double s2, double s3) {
    // The mixing columns are orthogonal, so the pseudo-inverse reduces to
    // two independent projections.
    UnmixResult r;
    r.delta_p = kHalfSqrt2 * (s1 - s2);
    r.delta_q = (2.0 * s3 - s1 - s2) / 3.0;
    const ServoTriplet back = mix_servos(r.delta_p, r.delta_q);
    const double e1 = s1 - back.s1;
    const double e2 = s2 - back.s2;
    const double e3 = s3 - back.s3;
    r.residual = std::sqrt(e1 * e1 + e2 * e2 + e3 * e3);
    return r;
}

CollectiveLinkage::CollectiveLinkage(std::vector<Point> table) : table_(std::move(table)) {
    if (table_.size() < 2) {
        throw std::invalid_argument("linkage: need at least two calibration points");
    }
    const bool increasing = table_[1].pitch_deg > table_[0].pitch_deg;
    for (std::size_t i = 1; i < table_.size(); ++i) {
        if (!(table_[i].cmd > table_[i - 1].cmd)) {
            throw std::invalid_argument("linkage: command points must be strictly increasing");
        }
        const bool up = table_[i].pitch_deg > table_[i - 1].pitch_deg;
        if (up != increasing) {
            throw std::invalid_argument("linkage: pitch table must be strictly monotone");
        }
    }
}

CollectiveLinkage CollectiveLinkage::identity_default() {
    return CollectiveLinkage({{-1.0, -40.0}, {1.0, 40.0}});
}

double CollectiveLinkage::pitch_deg(double cmd) const {
    if (cmd < cmd_min() || cmd > cmd_max()) {
        throw std::out_of_range("linkage: command outside calibrated range");
    }
    for (std::size_t i = 1; i < table_.size(); ++i) {
        if (cmd <= table_[i].cmd) {
            const auto& lo = table_[i - 1];
            const auto& hi = table_[i];
            const double w = (cmd - lo.cmd) / (hi.cmd - lo.cmd);
            return lo.pitch_deg + w * (hi.pitch_deg - lo.pitch_deg);
        }
    }
    return table_.back().pitch_deg;
}

void RateModel::validate() const {
    if (std::abs(effectiveness().det()) <= 1e-12) {
        throw std::invalid_argument("rate-model: effectiveness matrix is singular");
    }
    if (kc < 0.0 || kc > 1.0) {
        throw std::invalid_argument("rate-model: kc must lie in [0, 1]");
    }
}

RateModel RateModel::reference_fixture(double kc, double kp, double kq) {
    RateModel m;
    m.fp = {-2.4661, 0.0032, 0.0011, -0.5703, -3.4308};
    m.fq = {-2.8847, -0.0044, 0.0073, 7.4479, -3.4487};
    m.kc = kc;
    m.kp = kp;
    m.kq = kq;
    m.gain_qp = m.fp.c_q;
    m.gain_pq = m.fq.c_p;
    m.validate();
    return m;
}

RateModel RateModel::from_identification(const RateAxisFit& fp, const RateAxisFit& fq, double kc,
                                         double kp, double kq) {
    RateModel m;
    m.fp = fp;
    m.fq = fq;
    m.kc = kc;
    m.kp = kp;
    m.kq = kq;
    // Cancellation form: the feedforward must oppose the plant's own
    // rate coupling, so the fitted cross terms enter negated.
    m.gain_qp = -fp.c_q;
    m.gain_pq = -fq.c_p;
    m.validate();
    return m;
}

CyclicPair rate_control(double p_err, double q_err, double p, double q, const RateModel& model) {
    const Mat2 g = model.effectiveness();
    const double det = g.det();
    if (std::abs(det) <= 1e-12) {
        throw NumericError("singular-G: effectiveness matrix not invertible");
    }
    const double vx = model.kp * p_err + q * model.gain_qp * model.kc;
    const double vy = model.kq * q_err + p * model.gain_pq * model.kc;
    return {(g.d * vx - g.b * vy) / det, (-g.c * vx + g.a * vy) / det};
}

RateController::RateController(const RateModel& model, double loop_hz,
                               double feedback_cutoff_rad_s, double command_limit)
    : model_(model),
      dt_(1.0 / loop_hz),
      limit_(command_limit),
      filt_p_(feedback_cutoff_rad_s, 1.0 / loop_hz),
      filt_q_(feedback_cutoff_rad_s, 1.0 / loop_hz) {
    if (!(loop_hz > 0.0)) throw ConfigError("controller: loop_hz must be > 0");
    model_.validate();
}

CyclicPair RateController::update(double p_cmd, double q_cmd, double p_meas, double q_meas) {
    const double pf = filt_p_.step(p_meas);
    const double qf = filt_q_.step(q_meas);
    CyclicPair out = rate_control(p_cmd - pf, q_cmd - qf, pf, qf, model_);
    out.delta_x = std::clamp(out.delta_x, -limit_, limit_);
    out.delta_y = std::clamp(out.delta_y, -limit_, limit_);
    return out;
}

} // namespace rotorlab
