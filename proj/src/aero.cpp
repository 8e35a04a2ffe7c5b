#include "rotorlab/aero.hpp"

#include "rotorlab/csv.hpp"
#include "rotorlab/math.hpp"

#include <cmath>
#include <stdexcept>

namespace rotorlab {

namespace {
constexpr double kGravity = 9.81;
}

void AirframeAero::validate() const {
    if (!(wing_area_m2 > 0.0) || !(aspect_ratio > 0.0) || !(oswald_e > 0.0) ||
        !(cd0_clean > 0.0) || !(cd0_protrusions > 0.0) || !(cl_stall_clamp > 0.0)) {
        throw std::invalid_argument("invalid-params: airframe aero fields must be positive");
    }
}

double drag_polar(double cl, const AirframeAero& aero) {
    aero.validate();
    if (std::abs(cl) > aero.cl_stall_clamp) {
        throw std::out_of_range("beyond-stall-clamp: |cl| exceeds the polar validity range");
    }
    return aero.cd0_clean + aero.cd0_protrusions + cl * cl / (kPi * aero.aspect_ratio * aero.oswald_e);
}

double stall_speed(double mass_kg, double rho, const AirframeAero& aero) {
    aero.validate();
    return std::sqrt(2.0 * mass_kg * kGravity / (rho * aero.wing_area_m2 * aero.cl_stall_clamp));
}

double required_power(double v_ms, double mass_kg, double rho, const AirframeAero& aero) {
    aero.validate();
    if (!(v_ms > 0.0)) throw std::out_of_range("below-stall-speed: airspeed must be > 0");
    const double qbar = 0.5 * rho * v_ms * v_ms;
    const double cl = mass_kg * kGravity / (qbar * aero.wing_area_m2);
    if (cl > aero.cl_stall_clamp) {
        throw std::out_of_range("below-stall-speed: required cl exceeds the stall clamp");
    }
    return qbar * v_ms * aero.wing_area_m2 * drag_polar(cl, aero);
}

double min_power_speed(double mass_kg, double rho, const AirframeAero& aero, double tol_ms) {
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double lo = stall_speed(mass_kg, rho, aero) * 1.0001;
    double hi = 120.0;
    double x1 = hi - phi * (hi - lo);
    double x2 = lo + phi * (hi - lo);
    double f1 = required_power(x1, mass_kg, rho, aero);
    double f2 = required_power(x2, mass_kg, rho, aero);
    while (hi - lo > tol_ms) {
        if (f1 < f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = required_power(x1, mass_kg, rho, aero);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = required_power(x2, mass_kg, rho, aero);
        }
    }
    return 0.5 * (lo + hi);
}

std::vector<PowerCurvePoint> power_curve(double v_lo, double v_hi, double step, double mass_kg,
                                         double rho, const AirframeAero& aero) {
    std::vector<PowerCurvePoint> out;
    const int n = static_cast<int>(std::floor((v_hi - v_lo) / step + 0.5));
    for (int i = 0; i <= n; ++i) {
        const double v = v_lo + i * step;
        const double qbar = 0.5 * rho * v * v;
        const double cl = mass_kg * kGravity / (qbar * aero.wing_area_m2);
        if (cl > aero.cl_stall_clamp) continue; // below stall speed
        const double cd = drag_polar(cl, aero);
        out.push_back({v, cl, cd, qbar * v * aero.wing_area_m2 * cd});
    }
    return out;
}

void write_power_curve_csv(const std::string& path, const std::vector<PowerCurvePoint>& curve) {
    CsvWriter csv(path, {"V", "cl", "cd", "P"});
    for (const auto& c : curve) csv.row({c.v_ms, c.cl, c.cd, c.power_w});
}

} // namespace rotorlab
