#include "rotorlab/propulsion.hpp"

#include "rotorlab/csv.hpp"
#include "rotorlab/errors.hpp"
#include "rotorlab/math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotorlab {

void BladeGeometry::validate() const {
    if (stations.size() < 2) {
        throw std::invalid_argument("invalid-geometry: need at least two stations");
    }
    for (std::size_t i = 0; i < stations.size(); ++i) {
        if (stations[i].chord_cm < 0.0) {
            throw std::invalid_argument("invalid-geometry: negative chord");
        }
        if (i > 0 && !(stations[i].x_cm > stations[i - 1].x_cm)) {
            throw std::invalid_argument("invalid-geometry: stations must strictly increase");
        }
    }
    if (stations.front().x_cm != 11.0 || stations.back().x_cm != 50.7) {
        throw std::invalid_argument("invalid-geometry: span endpoints must be 11 and 50.7 cm");
    }
}

BladeGeometry BladeGeometry::default_rotor() {
    return {{{11.0, 4.0, 25.0},
             {14.0, 5.7, 23.2},
             {20.0, 5.7, 18.7},
             {30.0, 5.5, 11.8},
             {40.0, 4.6, 5.5},
             {45.0, 3.9, 2.6},
             {50.0, 2.8, 0.2},
             {50.7, 1.0, 0.0}}};
}

ChordTwist blade_geometry_at(const BladeGeometry& geom, double x_cm) {
    geom.validate();
    if (x_cm < geom.root_cm() || x_cm > geom.tip_cm()) {
        throw std::out_of_range("out-of-span: station outside blade");
    }
    const auto& st = geom.stations;
    for (std::size_t i = 1; i < st.size(); ++i) {
        if (x_cm <= st[i].x_cm) {
            const double w = (x_cm - st[i - 1].x_cm) / (st[i].x_cm - st[i - 1].x_cm);
            return {st[i - 1].chord_cm + w * (st[i].chord_cm - st[i - 1].chord_cm),
                    st[i - 1].twist_deg + w * (st[i].twist_deg - st[i - 1].twist_deg)};
        }
    }
    return {st.back().chord_cm, st.back().twist_deg};
}

void OperatingPoint::validate() const {
    if (!(rpm >= 0.0)) throw std::invalid_argument("invalid-params: rpm must be >= 0");
    if (airspeed_ms < 0.0) throw std::invalid_argument("invalid-params: airspeed must be >= 0");
}

namespace {

double smooth_blend(double x, double lo, double hi) {
    if (x <= lo) return 0.0;
    if (x >= hi) return 1.0;
    const double t = (x - lo) / (hi - lo);
    return t * t * (3.0 - 2.0 * t);
}

} // namespace

double AirfoilModel::cl(double alpha_rad) const {
    const double alpha0 = deg2rad(zero_lift_deg);
    const double attached = lift_slope_per_rad * (alpha_rad - alpha0);
    const double plate = std::sin(2.0 * alpha_rad);
    const double excursion = std::abs(alpha_rad - alpha0);
    const double w = smooth_blend(excursion, deg2rad(stall_deg), deg2rad(stall_deg + stall_blend_deg));
    return (1.0 - w) * attached + w * plate;
}

double AirfoilModel::cd(double alpha_rad) const {
    const double alpha0 = deg2rad(zero_lift_deg);
    const double cl_att = lift_slope_per_rad * (alpha_rad - alpha0);
    const double attached = cd0 + cd_k * cl_att * cl_att;
    const double s = std::sin(alpha_rad);
    const double plate = cd0 + 1.8 * s * s;
    const double excursion = std::abs(alpha_rad - alpha0);
    const double w = smooth_blend(excursion, deg2rad(stall_deg), deg2rad(stall_deg + stall_blend_deg));
    return (1.0 - w) * attached + w * plate;
}

BemResult bem_performance(const BladeGeometry& geom, const OperatingPoint& op, double rho,
                          const BemSettings& settings) {
    geom.validate();
    op.validate();
    if (!(rho > 0.0)) throw std::invalid_argument("invalid-params: rho must be > 0");

    BemResult result;
    if (op.rpm == 0.0) return result;

    const double omega = rpm_to_rad_s(op.rpm);
    const double v_inf = op.airspeed_ms;
    const double r_root = geom.root_cm() / 100.0;
    const double r_tip = geom.tip_cm() / 100.0;
    const double dr = (r_tip - r_root) / settings.annuli;
    const int blades = settings.blades;

    double thrust = 0.0;
    double torque = 0.0;

    for (int a = 0; a < settings.annuli; ++a) {
        const double r = r_root + (a + 0.5) * dr;
        const ChordTwist ct = blade_geometry_at(geom, r * 100.0);
        const double chord = ct.chord_cm / 100.0;
        const double theta = deg2rad(ct.twist_deg + op.tip_pitch_offset_deg);
        const double ut = omega * r;

        double vi = 0.0;
        double dthrust = 0.0;
        double dtorque = 0.0;
        bool converged = false;
        for (int it = 0; it < settings.max_iterations; ++it) {
            const double axial = v_inf + vi;
            const double w2 = ut * ut + axial * axial;
            const double phi = std::atan2(axial, ut);
            const double alpha = theta - phi;
            const double cl = settings.airfoil.cl(alpha);
            const double cd = settings.airfoil.cd(alpha);

            const double lift_term = cl * std::cos(phi) - cd * std::sin(phi);
            const double drag_term = cl * std::sin(phi) + cd * std::cos(phi);
            dthrust = blades * 0.5 * rho * w2 * chord * lift_term * dr;
            dtorque = blades * 0.5 * rho * w2 * chord * drag_term * r * dr;

            double floss = 1.0;
            if (settings.tip_loss) {
                const double sphi = std::max(std::abs(std::sin(phi)), 1e-4);
                const double f = 0.5 * blades * (r_tip - r) / (r * sphi);
                floss = (2.0 / kPi) * std::acos(std::exp(-f));
                floss = std::max(floss, 1e-3);
            }

            // momentum closure per annulus: dT = 4 pi rho r F (V + vi) vi dr
            const double denom = kPi * r * rho * floss * dr;
            const double disc = v_inf * v_inf + dthrust / denom;
            const double vi_new = disc >= 0.0
                                      ? 0.5 * (-v_inf + std::sqrt(disc))
                                      : 0.5 * (-v_inf); // clipped turbulent-wake edge
            const double step = vi_new - vi;
            vi += settings.relaxation * step;
            if (std::abs(step) < settings.tolerance_ms) {
                converged = true;
                break;
            }
        }
        if (!converged) {
            throw NumericError("iteration-divergence: induced velocity at annulus " +
                               std::to_string(a));
        }
        thrust += dthrust;
        torque += dtorque;
    }

    result.thrust_n = thrust;
    result.torque_nm = torque;
    result.power_w = torque * omega;

    if (v_inf > 0.1) {
        result.efficiency = result.power_w > 0.0 ? thrust * v_inf / result.power_w : 0.0;
    } else if (thrust > 0.0 && result.power_w > 0.0) {
        // hover figure of merit: ideal induced power over shaft power
        const double disc_area = kPi * r_tip * r_tip;
        const double p_ideal = thrust * std::sqrt(thrust / (2.0 * rho * disc_area));
        result.efficiency = p_ideal / result.power_w;
    }
    return result;
}

PropCoefficients thrust_power_coefficients(const BladeGeometry& geom, const OperatingPoint& op,
                                           double rho, const BemSettings& settings) {
    const BemResult r = bem_performance(geom, op, rho, settings);
    const double n = op.rpm / 60.0;
    if (n <= 0.0) return {0.0, 0.0};
    const double d = 2.0 * geom.tip_cm() / 100.0;
    const double d4 = d * d * d * d;
    return {r.thrust_n / (rho * n * n * d4), r.power_w / (rho * n * n * n * d4 * d)};
}

std::vector<SweepPoint> bem_sweep(const BladeGeometry& geom, const std::vector<double>& rpms,
                                  const std::vector<double>& pitches_deg,
                                  const std::vector<double>& airspeeds, double rho,
                                  const BemSettings& settings) {
    std::vector<SweepPoint> out;
    for (double rpm : rpms) {
        for (double pitch : pitches_deg) {
            for (double v : airspeeds) {
                const OperatingPoint op{rpm, pitch, v};
                const BemResult r = bem_performance(geom, op, rho, settings);
                const PropCoefficients c = thrust_power_coefficients(geom, op, rho, settings);
                out.push_back({rpm, pitch, v, r.thrust_n, r.power_w, r.efficiency, c.ct, c.cp});
            }
        }
    }
    return out;
}

void write_sweep_csv(const std::string& path, const std::vector<SweepPoint>& sweep) {
    CsvWriter csv(path, {"rpm", "pitch", "V", "T", "P", "eta", "CT", "CP"});
    for (const auto& s : sweep) {
        csv.row({s.rpm, s.pitch_deg, s.airspeed_ms, s.thrust_n, s.power_w, s.efficiency, s.ct,
                 s.cp});
    }
}

} // namespace rotorlab
