#pragma once

#include <string>
#include <vector>

namespace rotorlab {

// Radial blade description: station position and chord in centimeters,
// built-in twist in degrees.
struct BladeStation {
    double x_cm = 0.0;
    double chord_cm = 0.0;
    double twist_deg = 0.0;
};

struct BladeGeometry {
    std::vector<BladeStation> stations;

    // throws std::invalid_argument on violated invariants (strictly
    // increasing stations, non-negative chords, span endpoints 11..50.7 cm)
    void validate() const;

    double root_cm() const { return stations.front().x_cm; }
    double tip_cm() const { return stations.back().x_cm; }

    // the production 1 m twisted blade
    static BladeGeometry default_rotor();
};

struct ChordTwist {
    double chord_cm = 0.0;
    double twist_deg = 0.0;
};

// Piecewise-linear interpolation between stations; throws std::out_of_range
// ("out-of-span") outside [root, tip].
ChordTwist blade_geometry_at(const BladeGeometry& geom, double x_cm);

struct OperatingPoint {
    double rpm = 1500.0;
    double tip_pitch_offset_deg = 10.0; // collective added to the built-in twist
    double airspeed_ms = 0.0;

    void validate() const;
};

// Section aerodynamics: linear lift with a flat-plate blend past stall and
// a parabolic drag polar. The defaults are calibration knobs, not measured
// section data.
struct AirfoilModel {
    double lift_slope_per_rad = 5.7;
    double zero_lift_deg = -3.0;
    double stall_deg = 12.0;
    double stall_blend_deg = 8.0;
    double cd0 = 0.012;
    double cd_k = 0.02;

    double cl(double alpha_rad) const;
    double cd(double alpha_rad) const;
};

struct BemSettings {
    int annuli = 40;
    double relaxation = 0.3;
    double tolerance_ms = 1e-6; // induced-velocity convergence
    int max_iterations = 500;
    int blades = 2;
    bool tip_loss = true;
    AirfoilModel airfoil;
};

struct BemResult {
    double thrust_n = 0.0;
    double power_w = 0.0;
    double torque_nm = 0.0;
    // figure of merit in hover, T*V/P in forward flight
    double efficiency = 0.0;
};

// Two-blade blade-element/momentum evaluation in axial flow. The induced
// velocity is solved per annulus by relaxed fixed-point iteration; failure
// to converge raises NumericError "iteration-divergence" naming the annulus.
BemResult bem_performance(const BladeGeometry& geom, const OperatingPoint& op, double rho = 1.225,
                          const BemSettings& settings = {});

struct PropCoefficients {
    double ct = 0.0; // T / (rho n^2 D^4)
    double cp = 0.0; // P / (rho n^3 D^5)
};

PropCoefficients thrust_power_coefficients(const BladeGeometry& geom, const OperatingPoint& op,
                                           double rho = 1.225, const BemSettings& settings = {});

struct SweepPoint {
    double rpm, pitch_deg, airspeed_ms;
    double thrust_n, power_w, efficiency, ct, cp;
};

// Cartesian sweep over rpm x pitch x airspeed; CSV rows
// rpm,pitch,V,T,P,eta,CT,CP.
std::vector<SweepPoint> bem_sweep(const BladeGeometry& geom, const std::vector<double>& rpms,
                                  const std::vector<double>& pitches_deg,
                                  const std::vector<double>& airspeeds, double rho = 1.225,
                                  const BemSettings& settings = {});

void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& sweep);

} // namespace rotorlab
