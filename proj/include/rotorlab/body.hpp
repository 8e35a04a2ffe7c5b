#pragma once

#include "rotorlab/math.hpp"
#include "rotorlab/rotor.hpp"

#include <string>
#include <vector>

namespace rotorlab {

// Principal-axis fuselage inertia. Body z is the rotor shaft axis, so the
// hover cross-coupling lives in the (Ixx, Iyy) asymmetry.
struct BodyParams {
    double ixx_kgm2 = 0.06;
    double iyy_kgm2 = 0.30;
    double izz_kgm2 = 0.33;
    double mass_kg = 4.5;
    double rotor_offset_z_m = 0.2; // hub height above the c.g.

    void validate() const; // throws std::invalid_argument
};

// Full state of the coupled rotor + rigid body system. Two blades are
// simulated 180 degrees apart; psi is the azimuth of blade 0.
struct CoupledState {
    double p = 0.0, q = 0.0, r = 0.0; // body rates, rad/s
    Quat attitude;                    // body-to-world, kept unit norm
    double psi = 0.0;                 // blade-0 azimuth, rad (unwrapped)
    double omega = 0.0;               // rotor speed, rad/s
    double beta[2] = {0.0, 0.0};
    double beta_dot[2] = {0.0, 0.0};
    double act_dp = 0.0, act_dq = 0.0; // actuator states (track command when lag = 0)
};

// Vehicle = rotor + body + the two hub moment paths. Thrust is held at a
// configured magnitude during rate experiments; it only enters through the
// offset moment when the tip-path plane tilts.
struct CoupledVehicle {
    RotorParams rotor;
    BodyParams body;
    double thrust_n = 44.145;    // defaults to MTOW weight
    double actuator_lag_s = 0.0; // first-order servo lag; 0 = rigid linkage
    bool couple_rotor = true;    // false studies the torque-free body alone

    // Spin inertia of the whole rotor about the shaft; the spinning rotor
    // reacts gyroscopically on the body through the shaft bearing, which is
    // what turns a pitch disturbance into roll. Two thin blades carry about
    // twice the single-blade flap inertia.
    double rotor_spin_inertia_kgm2 = 0.01;

    void validate() const;
};

// First-harmonic tip-path-plane tilt relative to the shaft plane:
// beta(psi) ~ cone + tilt_cos*cos(psi) + tilt_sin*sin(psi).
struct TppTilt {
    double tilt_cos = 0.0;
    double tilt_sin = 0.0;
    double cone = 0.0;
};
TppTilt tip_path_tilt(const CoupledState& s);

// One RK4 step of the coupled dynamics. Enforces the dt*omega < 0.2 rad
// resolution guard (std::invalid_argument "step-too-large") and signals
// instability via NumericError "non-finite-state".
CoupledState step_coupled(const CoupledState& state, const CoupledVehicle& vehicle,
                          const CyclicCommand& cmd, double dt);

enum class Axis { Pitch, Roll };

struct RateSample {
    double t = 0.0;
    double p = 0.0, q = 0.0, r = 0.0;
    double delta_p = 0.0, delta_q = 0.0;
};

// Open-loop cyclic doublet: +amplitude then -amplitude for duration/2 each,
// followed by settle_s of zero command. Integration is split at the command
// switch times so each segment sees a smooth right-hand side.
std::vector<RateSample> doublet_response(const CoupledVehicle& vehicle, Axis axis,
                                         double amplitude, double duration_s, double dt,
                                         double settle_s = 0.0, double initial_psi = 0.0);

// Piecewise-constant command schedule applied to a fresh hover state;
// shared by the doublet and identification experiments.
struct CommandSegment {
    CyclicCommand cmd;
    double duration_s = 0.0;
};
std::vector<RateSample> run_command_schedule(const CoupledVehicle& vehicle,
                                             const std::vector<CommandSegment>& schedule,
                                             double dt, double initial_psi = 0.0);

// Fresh hover state: zero rates and flap, identity attitude, nominal rpm.
CoupledState initial_hover_state(const CoupledVehicle& vehicle);

double rotational_kinetic_energy(const CoupledState& s, const BodyParams& body);

// CSV export with header t,p,q,r,delta_p,delta_q.
void write_rate_csv(const std::string& path, const std::vector<RateSample>& trace);

} // namespace rotorlab
