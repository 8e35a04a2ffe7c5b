#include "rotorlab/filter.hpp"

#include "rotorlab/errors.hpp"

#include <cmath>
#include <complex>

namespace rotorlab {

SecondOrderLowpass::SecondOrderLowpass(double cutoff_rad_s, double dt_s)
    : cutoff_(cutoff_rad_s), dt_(dt_s) {
    if (!(dt_s > 0.0)) {
        throw ConfigError("filter: dt must be > 0");
    }
    if (!(cutoff_rad_s > 0.0) || cutoff_rad_s * dt_s >= 1.0) {
        throw ConfigError("filter: unstable-config, require 0 < cutoff*dt < 1");
    }
    const double c = 2.0 / dt_s;
    const double w = cutoff_rad_s;
    const double a0 = c * c + 2.0 * w * c + w * w;
    b0_ = w * w / a0;
    b1_ = 2.0 * w * w / a0;
    b2_ = w * w / a0;
    a1_ = 2.0 * (w * w - c * c) / a0;
    a2_ = (c * c - 2.0 * w * c + w * w) / a0;
}

double SecondOrderLowpass::step(double x) {
    const double y = b0_ * x + s1_;
    s1_ = b1_ * x - a1_ * y + s2_;
    s2_ = b2_ * x - a2_ * y;
    return y;
}

void SecondOrderLowpass::reset(double initial_value) {
    // state priming so that a constant input equal to initial_value
    // passes through with no transient
    const double y = initial_value;
    s2_ = b2_ * initial_value - a2_ * y;
    s1_ = b1_ * initial_value - a1_ * y + s2_;
}

double SecondOrderLowpass::magnitude_at(double w_rad_s) const {
    const std::complex<double> z = std::polar(1.0, -w_rad_s * dt_);
    const std::complex<double> num = b0_ + b1_ * z + b2_ * z * z;
    const std::complex<double> den = 1.0 + a1_ * z + a2_ * z * z;
    return std::abs(num / den);
}

std::vector<double> SecondOrderLowpass::apply(const std::vector<double>& signal) const {
    SecondOrderLowpass f = *this;
    f.s1_ = 0.0;
    f.s2_ = 0.0;
    std::vector<double> out;
    out.reserve(signal.size());
    for (double x : signal) out.push_back(f.step(x));
    return out;
}

} // namespace rotorlab
