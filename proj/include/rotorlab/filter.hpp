#pragma once

#include <vector>

namespace rotorlab {

// Critically damped second-order low-pass, H(s) = wc^2 / (s + wc)^2,
// discretized with the bilinear transform. DC gain is exactly 1 and the
// numerator zeros sit at z = -1, so Nyquist content is annihilated.
class SecondOrderLowpass {
public:
    // throws ConfigError when cutoff*dt >= 1 (stability/resolution guard)
    SecondOrderLowpass(double cutoff_rad_s, double dt_s);

    double cutoff() const { return cutoff_; }
    double dt() const { return dt_; }

    // process one sample (direct form II transposed)
    double step(double x);

    void reset(double initial_value = 0.0);

    // analytic magnitude of the discrete filter at angular frequency w [rad/s]
    double magnitude_at(double w_rad_s) const;

    std::vector<double> apply(const std::vector<double>& signal) const;

private:
    double cutoff_ = 0.0;
    double dt_ = 0.0;
    double b0_ = 0.0, b1_ = 0.0, b2_ = 0.0; // numerator
    double a1_ = 0.0, a2_ = 0.0;            // denominator (a0 normalized to 1)
    double s1_ = 0.0, s2_ = 0.0;            // state
};

} // namespace rotorlab
