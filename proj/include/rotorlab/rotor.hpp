#pragma once

#include "rotorlab/math.hpp"

#include <string>
#include <vector>

namespace rotorlab {

// Physical description of the spring-hinged rigid rotor.
struct RotorParams {
    double radius_m = 0.5;
    double blade_mass_kg = 0.06;
    double flap_inertia_kgm2 = 0.005;     // about the flap hinge
    double hinge_spring_nm_per_rad = 8.0; // non-authoritative default, see docs
    double lift_slope_per_rad = 5.7;
    double mean_chord_m = 0.05;
    double air_density_kgm3 = 1.225;
    double rpm_nominal = 1500.0;

    double omega_nominal() const { return rpm_to_rad_s(rpm_nominal); }

    // throws std::invalid_argument ("invalid-params: ...") on violated invariants
    void validate() const;
};

// Lock number: ratio of aerodynamic flap damping to blade flap inertia.
double lock_number(const RotorParams& params);

// Per-blade flap state. psi is the blade azimuth measured from the body
// x axis, positive with rotor rotation about +z.
struct FlapState {
    double beta = 0.0;     // flap angle, rad
    double beta_dot = 0.0; // flap rate, rad/s
    double psi = 0.0;      // azimuth in [0, 2*pi)
    double omega = 0.0;    // rotor speed, rad/s
};

inline constexpr double kDefaultCommandLimit = 1.0;
inline constexpr double kCollectiveLimitDeg = 40.0;

// Swash-plate command: once-per-rev cyclic amplitudes plus collective.
struct CyclicCommand {
    double delta_p = 0.0;        // roll cyclic, dimensionless
    double delta_q = 0.0;        // pitch cyclic, dimensionless
    double collective_rad = 0.0; // theta0
};

// throws std::invalid_argument when |delta_p| or |delta_q| exceeds the limit
void validate_command(const CyclicCommand& cmd, double limit = kDefaultCommandLimit);

// clamps collective to the +/-40 deg linkage range
CyclicCommand clamp_collective(CyclicCommand cmd);

// theta = theta0 + delta_p*sin(psi) + delta_q*cos(psi)
double feathering_angle(const CyclicCommand& cmd, double psi);

// Flap acceleration of an isolated blade at feathering angle theta:
//   beta_ddot = (gamma/8) omega^2 theta - (gamma/8) omega beta_dot
//               - (omega^2 + K/I) beta
// requires omega > 0 (throws std::invalid_argument "invalid-state" otherwise)
double flap_acceleration(const FlapState& state, const RotorParams& params, double theta);

// Analytic settled flap angle for a constant feathering angle.
double flap_steady_state(const RotorParams& params, double omega, double theta);

struct FlapSample {
    double t = 0.0;
    double psi = 0.0;
    double beta = 0.0;
    double beta_dot = 0.0;
    double theta = 0.0;
};

// Fixed-step RK4 integration of the isolated flap equation. Requires
// dt > 0 and dt*omega < 0.2 rad (throws std::invalid_argument
// "step-too-large" otherwise). Returns steps+1 samples including t = 0.
std::vector<FlapSample> integrate_flap(const FlapState& initial, const RotorParams& params,
                                       const CyclicCommand& cmd, double dt, int steps);

// Flap oscillator energy 0.5*beta_dot^2 + 0.5*(omega^2 + K/I)*beta^2.
double flap_energy(const FlapState& state, const RotorParams& params);

// CSV export with header t,psi,beta,beta_dot,theta (SI units).
void write_flap_csv(const std::string& path, const std::vector<FlapSample>& trajectory);

} // namespace rotorlab
