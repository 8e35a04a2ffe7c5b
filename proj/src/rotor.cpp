#include "rotorlab/rotor.hpp"

#include "rotorlab/csv.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace rotorlab {

void RotorParams::validate() const {
    if (!(radius_m > 0.0)) throw std::invalid_argument("invalid-params: radius_m must be > 0");
    if (!(flap_inertia_kgm2 > 0.0)) throw std::invalid_argument("invalid-params: flap_inertia_kgm2 must be > 0");
    if (!(air_density_kgm3 > 0.0)) throw std::invalid_argument("invalid-params: air_density_kgm3 must be > 0");
    if (hinge_spring_nm_per_rad < 0.0) throw std::invalid_argument("invalid-params: hinge_spring_nm_per_rad must be >= 0");
    if (!(blade_mass_kg > 0.0)) throw std::invalid_argument("invalid-params: blade_mass_kg must be > 0");
    if (mean_chord_m < 0.0) throw std::invalid_argument("invalid-params: mean_chord_m must be >= 0");
    if (lift_slope_per_rad < 0.0) throw std::invalid_argument("invalid-params: lift_slope_per_rad must be >= 0");
}

double lock_number(const RotorParams& p) {
    p.validate();
    const double r4 = p.radius_m * p.radius_m * p.radius_m * p.radius_m;
    return p.air_density_kgm3 * p.lift_slope_per_rad * p.mean_chord_m * r4 / p.flap_inertia_kgm2;
}

void validate_command(const CyclicCommand& cmd, double limit) {
    if (std::abs(cmd.delta_p) > limit || std::abs(cmd.delta_q) > limit) {
        throw std::invalid_argument("invalid-command: cyclic exceeds limit " + std::to_string(limit));
    }
}

CyclicCommand clamp_collective(CyclicCommand cmd) {
    const double lim = deg2rad(kCollectiveLimitDeg);
    if (cmd.collective_rad > lim) cmd.collective_rad = lim;
    if (cmd.collective_rad < -lim) cmd.collective_rad = -lim;
    return cmd;
}

double feathering_angle(const CyclicCommand& cmd, double psi) {
    return cmd.collective_rad + cmd.delta_p * std::sin(psi) + cmd.delta_q * std::cos(psi);
}

double flap_acceleration(const FlapState& s, const RotorParams& p, double theta) {
    if (!(s.omega > 0.0)) throw std::invalid_argument("invalid-state: omega must be > 0");
    const double gamma = lock_number(p);
    const double g8 = gamma / 8.0;
    const double w = s.omega;
    const double spring = p.hinge_spring_nm_per_rad / p.flap_inertia_kgm2;
    return g8 * w * w * theta - g8 * w * s.beta_dot - (w * w + spring) * s.beta;
}

double flap_steady_state(const RotorParams& p, double omega, double theta) {
    const double gamma = lock_number(p);
    const double spring = p.hinge_spring_nm_per_rad / p.flap_inertia_kgm2;
    return (gamma / 8.0) * omega * omega * theta / (omega * omega + spring);
}

double flap_energy(const FlapState& s, const RotorParams& p) {
    const double spring = p.hinge_spring_nm_per_rad / p.flap_inertia_kgm2;
    return 0.5 * s.beta_dot * s.beta_dot + 0.5 * (s.omega * s.omega + spring) * s.beta * s.beta;
}

namespace {

struct FlapOde {
    double beta, beta_dot, psi;
};

FlapOde derivative(const FlapOde& x, double omega, const CyclicCommand& cmd,
                   double gamma_over_8, double spring) {
    const double theta = feathering_angle(cmd, x.psi);
    const double w = omega;
    const double bdd = gamma_over_8 * w * w * theta - gamma_over_8 * w * x.beta_dot -
                       (w * w + spring) * x.beta;
    return {x.beta_dot, bdd, omega};
}

} // namespace

std::vector<FlapSample> integrate_flap(const FlapState& initial, const RotorParams& params,
                                       const CyclicCommand& cmd, double dt, int steps) {
    params.validate();
    if (!(initial.omega > 0.0)) throw std::invalid_argument("invalid-state: omega must be > 0");
    if (!(dt > 0.0)) throw std::invalid_argument("step-too-large: dt must be > 0");
    if (dt * initial.omega >= 0.2) {
        throw std::invalid_argument("step-too-large: require dt*omega < 0.2 rad per step");
    }
    if (steps < 0) throw std::invalid_argument("invalid-params: steps must be >= 0");

    const double gamma_over_8 = lock_number(params) / 8.0;
    const double spring = params.hinge_spring_nm_per_rad / params.flap_inertia_kgm2;
    const double omega = initial.omega;

    std::vector<FlapSample> traj;
    traj.reserve(static_cast<std::size_t>(steps) + 1);

    FlapOde x{initial.beta, initial.beta_dot, initial.psi};
    auto record = [&](double t) {
        const double psi_w = wrap_2pi(x.psi);
        traj.push_back({t, psi_w, x.beta, x.beta_dot, feathering_angle(cmd, psi_w)});
    };
    record(0.0);

    for (int i = 0; i < steps; ++i) {
        const FlapOde k1 = derivative(x, omega, cmd, gamma_over_8, spring);
        const FlapOde x2{x.beta + 0.5 * dt * k1.beta, x.beta_dot + 0.5 * dt * k1.beta_dot,
                         x.psi + 0.5 * dt * k1.psi};
        const FlapOde k2 = derivative(x2, omega, cmd, gamma_over_8, spring);
        const FlapOde x3{x.beta + 0.5 * dt * k2.beta, x.beta_dot + 0.5 * dt * k2.beta_dot,
                         x.psi + 0.5 * dt * k2.psi};
        const FlapOde k3 = derivative(x3, omega, cmd, gamma_over_8, spring);
        const FlapOde x4{x.beta + dt * k3.beta, x.beta_dot + dt * k3.beta_dot, x.psi + dt * k3.psi};
        const FlapOde k4 = derivative(x4, omega, cmd, gamma_over_8, spring);

        x.beta += dt / 6.0 * (k1.beta + 2.0 * k2.beta + 2.0 * k3.beta + k4.beta);
        x.beta_dot += dt / 6.0 * (k1.beta_dot + 2.0 * k2.beta_dot + 2.0 * k3.beta_dot + k4.beta_dot);
        x.psi += dt * omega;

        record(dt * (i + 1));
    }
    return traj;
}

void write_flap_csv(const std::string& path, const std::vector<FlapSample>& trajectory) {
    CsvWriter csv(path, {"t", "psi", "beta", "beta_dot", "theta"});
    for (const auto& s : trajectory) {
        csv.row({s.t, s.psi, s.beta, s.beta_dot, s.theta});
    }
}

} // namespace rotorlab
