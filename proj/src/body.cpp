#include "rotorlab/body.hpp"

#include "rotorlab/csv.hpp"
#include "rotorlab/errors.hpp"

#include <cmath>
#include <stdexcept>

namespace rotorlab {

void BodyParams::validate() const {
    if (!(ixx_kgm2 > 0.0) || !(iyy_kgm2 > 0.0) || !(izz_kgm2 > 0.0)) {
        throw std::invalid_argument("invalid-params: body inertias must be > 0");
    }
    if (!(mass_kg > 0.0)) throw std::invalid_argument("invalid-params: mass_kg must be > 0");
}

void CoupledVehicle::validate() const {
    rotor.validate();
    body.validate();
    if (actuator_lag_s < 0.0) throw std::invalid_argument("invalid-params: actuator_lag_s must be >= 0");
    if (rotor_spin_inertia_kgm2 < 0.0) {
        throw std::invalid_argument("invalid-params: rotor_spin_inertia_kgm2 must be >= 0");
    }
}

TppTilt tip_path_tilt(const CoupledState& s) {
    // Differential flap of the two opposed blades projected on the first
    // harmonic. beta_dot supplies the quadrature component, scaled by 1/omega.
    const double d = 0.5 * (s.beta[0] - s.beta[1]);
    const double dd = 0.5 * (s.beta_dot[0] - s.beta_dot[1]);
    const double c = std::cos(s.psi);
    const double sn = std::sin(s.psi);
    TppTilt tilt;
    tilt.cone = 0.5 * (s.beta[0] + s.beta[1]);
    if (s.omega > 0.0) {
        tilt.tilt_cos = d * c - (dd / s.omega) * sn;
        tilt.tilt_sin = d * sn + (dd / s.omega) * c;
    }
    return tilt;
}

namespace {

// Flattened ODE state for the RK4 stages.
struct Ode {
    double v[14];
};

Ode pack(const CoupledState& s) {
    return {{s.p, s.q, s.r, s.attitude.w, s.attitude.x, s.attitude.y, s.attitude.z, s.psi,
             s.beta[0], s.beta_dot[0], s.beta[1], s.beta_dot[1], s.act_dp, s.act_dq}};
}

CoupledState unpack(const Ode& o, const CoupledState& like) {
    CoupledState s = like;
    s.p = o.v[0];
    s.q = o.v[1];
    s.r = o.v[2];
    s.attitude = {o.v[3], o.v[4], o.v[5], o.v[6]};
    s.psi = o.v[7];
    s.beta[0] = o.v[8];
    s.beta_dot[0] = o.v[9];
    s.beta[1] = o.v[10];
    s.beta_dot[1] = o.v[11];
    s.act_dp = o.v[12];
    s.act_dq = o.v[13];
    return s;
}

Ode axpy(const Ode& x, double a, const Ode& d) {
    Ode r;
    for (int i = 0; i < 14; ++i) r.v[i] = x.v[i] + a * d.v[i];
    return r;
}

struct Coeffs {
    double gamma_over_8;
    double spring_over_inertia; // K/I
    double hub_gain;            // K + h*T, or 0 when decoupled
    double rotor_momentum;      // spin inertia * omega, 0 when decoupled
    double ixx, iyy, izz;
    double omega;
    double lag;
};

Ode derivative(const Ode& o, const Coeffs& c, const CyclicCommand& cmd) {
    const double p = o.v[0], q = o.v[1], r = o.v[2];
    const Quat att{o.v[3], o.v[4], o.v[5], o.v[6]};
    const double psi = o.v[7];
    const double w = c.omega;

    // actuator path: first-order lag, or direct drive when lag == 0
    double dp_eff, dq_eff, act_dp_dot, act_dq_dot;
    if (c.lag > 0.0) {
        dp_eff = o.v[12];
        dq_eff = o.v[13];
        act_dp_dot = (cmd.delta_p - o.v[12]) / c.lag;
        act_dq_dot = (cmd.delta_q - o.v[13]) / c.lag;
    } else {
        dp_eff = cmd.delta_p;
        dq_eff = cmd.delta_q;
        act_dp_dot = 0.0;
        act_dq_dot = 0.0;
    }

    // tip-path-plane tilt relative to the shaft plane
    const double d = 0.5 * (o.v[8] - o.v[10]);
    const double dd = 0.5 * (o.v[9] - o.v[11]);
    const double cpsi = std::cos(psi);
    const double spsi = std::sin(psi);
    const double tilt_cos = d * cpsi - (dd / w) * spsi;
    const double tilt_sin = d * spsi + (dd / w) * cpsi;

    // moments on the body: spring path K*tilt plus the thrust vector acting
    // at the hub offset; both resolve to (gain*tilt_sin, -gain*tilt_cos)
    const double mx = c.hub_gain * tilt_sin;
    const double my = -c.hub_gain * tilt_cos;

    // gyroscopic reaction of the spinning rotor carried by the shaft bearing
    const double p_dot = ((c.iyy - c.izz) * q * r - c.rotor_momentum * q + mx) / c.ixx;
    const double q_dot = ((c.izz - c.ixx) * p * r + c.rotor_momentum * p + my) / c.iyy;
    const double r_dot = ((c.ixx - c.iyy) * p * q) / c.izz;

    Ode out;
    out.v[0] = p_dot;
    out.v[1] = q_dot;
    out.v[2] = r_dot;

    const Quat qd = quat_derivative(att, {p, q, r});
    out.v[3] = qd.w;
    out.v[4] = qd.x;
    out.v[5] = qd.y;
    out.v[6] = qd.z;
    out.v[7] = w;

    // per-blade flap dynamics with shaft-motion terms
    for (int k = 0; k < 2; ++k) {
        const double psik = psi + (k == 0 ? 0.0 : kPi);
        const double ck = std::cos(psik);
        const double sk = std::sin(psik);
        const double beta = o.v[8 + 2 * k];
        const double beta_dot = o.v[9 + 2 * k];

        const double theta = cmd.collective_rad + dp_eff * sk + dq_eff * ck;
        const double rate_t = q * ck - p * sk;  // shaft rate about the flap axis
        const double rate_r = p * ck + q * sk;  // shaft rate along the blade
        const double accel_t = q_dot * ck - p_dot * sk;

        const double bdd = c.gamma_over_8 * w * w * theta
                         - c.gamma_over_8 * w * beta_dot
                         - (w * w + c.spring_over_inertia) * beta
                         + c.gamma_over_8 * w * rate_t
                         - 2.0 * w * rate_r
                         + accel_t;
        out.v[8 + 2 * k] = beta_dot;
        out.v[9 + 2 * k] = bdd;
    }

    out.v[12] = act_dp_dot;
    out.v[13] = act_dq_dot;
    return out;
}

Coeffs make_coeffs(const CoupledVehicle& v, double omega) {
    Coeffs c;
    c.gamma_over_8 = lock_number(v.rotor) / 8.0;
    c.spring_over_inertia = v.rotor.hinge_spring_nm_per_rad / v.rotor.flap_inertia_kgm2;
    c.hub_gain = v.couple_rotor
                     ? v.rotor.hinge_spring_nm_per_rad + v.body.rotor_offset_z_m * v.thrust_n
                     : 0.0;
    c.rotor_momentum = v.couple_rotor ? v.rotor_spin_inertia_kgm2 * omega : 0.0;
    c.ixx = v.body.ixx_kgm2;
    c.iyy = v.body.iyy_kgm2;
    c.izz = v.body.izz_kgm2;
    c.omega = omega;
    c.lag = v.actuator_lag_s;
    return c;
}

void check_guard(double dt, double omega) {
    if (!(dt > 0.0)) throw std::invalid_argument("step-too-large: dt must be > 0");
    if (!(omega > 0.0)) throw std::invalid_argument("invalid-state: omega must be > 0");
    if (dt * omega >= 0.2) {
        throw std::invalid_argument("step-too-large: require dt*omega < 0.2 rad per step");
    }
}

CoupledState rk4_step(const CoupledState& state, const Coeffs& c, const CyclicCommand& cmd,
                      double dt) {
    const Ode x = pack(state);
    const Ode k1 = derivative(x, c, cmd);
    const Ode k2 = derivative(axpy(x, 0.5 * dt, k1), c, cmd);
    const Ode k3 = derivative(axpy(x, 0.5 * dt, k2), c, cmd);
    const Ode k4 = derivative(axpy(x, dt, k3), c, cmd);

    Ode next;
    for (int i = 0; i < 14; ++i) {
        next.v[i] = x.v[i] + dt / 6.0 * (k1.v[i] + 2.0 * k2.v[i] + 2.0 * k3.v[i] + k4.v[i]);
    }

    CoupledState out = unpack(next, state);
    out.attitude.normalize();
    if (c.lag <= 0.0) {
        out.act_dp = cmd.delta_p;
        out.act_dq = cmd.delta_q;
    }

    for (double f : {out.p, out.q, out.r, out.beta[0], out.beta[1], out.beta_dot[0],
                     out.beta_dot[1]}) {
        if (!std::isfinite(f)) {
            throw NumericError("non-finite-state: coupled simulation diverged");
        }
    }
    return out;
}

} // namespace

CoupledState step_coupled(const CoupledState& state, const CoupledVehicle& vehicle,
                          const CyclicCommand& cmd, double dt) {
    vehicle.validate();
    check_guard(dt, state.omega);
    return rk4_step(state, make_coeffs(vehicle, state.omega), cmd, dt);
}

CoupledState initial_hover_state(const CoupledVehicle& vehicle) {
    CoupledState s;
    s.omega = vehicle.rotor.omega_nominal();
    return s;
}

double rotational_kinetic_energy(const CoupledState& s, const BodyParams& body) {
    return 0.5 * (body.ixx_kgm2 * s.p * s.p + body.iyy_kgm2 * s.q * s.q +
                  body.izz_kgm2 * s.r * s.r);
}

std::vector<RateSample> run_command_schedule(const CoupledVehicle& vehicle,
                                             const std::vector<CommandSegment>& schedule,
                                             double dt, double initial_psi) {
    vehicle.validate();
    CoupledState s = initial_hover_state(vehicle);
    s.psi = initial_psi;
    check_guard(dt, s.omega);
    const Coeffs coeffs = make_coeffs(vehicle, s.omega);

    std::vector<RateSample> trace;
    long step_index = 0;
    trace.push_back({0.0, s.p, s.q, s.r, 0.0, 0.0});

    for (const auto& seg : schedule) {
        if (!(seg.duration_s > 0.0)) {
            throw std::invalid_argument("invalid-params: segment duration must be > 0");
        }
        validate_command(seg.cmd);
        const long n = std::lround(seg.duration_s / dt);
        for (long i = 0; i < n; ++i) {
            s = rk4_step(s, coeffs, seg.cmd, dt);
            ++step_index;
            trace.push_back({step_index * dt, s.p, s.q, s.r, seg.cmd.delta_p, seg.cmd.delta_q});
        }
    }
    return trace;
}

std::vector<RateSample> doublet_response(const CoupledVehicle& vehicle, Axis axis,
                                         double amplitude, double duration_s, double dt,
                                         double settle_s, double initial_psi) {
    if (!(duration_s > 0.0)) throw std::invalid_argument("invalid-params: duration must be > 0");
    CyclicCommand plus, minus;
    if (axis == Axis::Pitch) {
        plus.delta_q = amplitude;
        minus.delta_q = -amplitude;
    } else {
        plus.delta_p = amplitude;
        minus.delta_p = -amplitude;
    }
    std::vector<CommandSegment> schedule{{plus, duration_s / 2.0}, {minus, duration_s / 2.0}};
    if (settle_s > 0.0) schedule.push_back({CyclicCommand{}, settle_s});
    return run_command_schedule(vehicle, schedule, dt, initial_psi);
}

void write_rate_csv(const std::string& path, const std::vector<RateSample>& trace) {
    CsvWriter csv(path, {"t", "p", "q", "r", "delta_p", "delta_q"});
    for (const auto& s : trace) {
        csv.row({s.t, s.p, s.q, s.r, s.delta_p, s.delta_q});
    }
}

} // namespace rotorlab
