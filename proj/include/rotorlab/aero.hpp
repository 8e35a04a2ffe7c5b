#pragma once

#include <string>
#include <vector>

namespace rotorlab {

// Fixed-wing polar of the boxed biplane, treated as one equivalent wing of
// total area. cd0_protrusions carries the rotor head, cooling and antenna
// drag on top of the clean polar.
struct AirframeAero {
    double wing_area_m2 = 0.496;
    double aspect_ratio = 4.78;
    double oswald_e = 0.8;
    double cd0_clean = 0.010;
    double cd0_protrusions = 0.012;
    double cl_stall_clamp = 1.2;

    void validate() const; // throws std::invalid_argument
};

// cd = cd0_clean + cd0_protrusions + cl^2 / (pi AR e); throws
// std::out_of_range "beyond-stall-clamp" when |cl| exceeds the clamp.
double drag_polar(double cl, const AirframeAero& aero);

// Level-flight power: cl from the lift balance, then P = 0.5 rho V^3 S cd.
// Throws std::out_of_range "below-stall-speed" when the required cl exceeds
// the stall clamp.
double required_power(double v_ms, double mass_kg, double rho, const AirframeAero& aero);

double stall_speed(double mass_kg, double rho, const AirframeAero& aero);

// Golden-section minimum of the power curve, resolved to tol_ms.
double min_power_speed(double mass_kg, double rho, const AirframeAero& aero,
                       double tol_ms = 0.1);

struct PowerCurvePoint {
    double v_ms, cl, cd, power_w;
};

std::vector<PowerCurvePoint> power_curve(double v_lo, double v_hi, double step, double mass_kg,
                                         double rho, const AirframeAero& aero);

void write_power_curve_csv(const std::string& path, const std::vector<PowerCurvePoint>& curve);

} // namespace rotorlab
