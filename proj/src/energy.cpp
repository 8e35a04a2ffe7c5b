#include "rotorlab/energy.hpp"

#include "rotorlab/csv.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rotorlab {

void MissionProfile::validate() const {
    if (segments.empty()) throw std::invalid_argument("invalid-profile: no segments");
    for (const auto& s : segments) {
        if (!(s.duration_s > 0.0)) throw std::invalid_argument("invalid-profile: duration must be > 0");
        if (s.current_a < 0.0) throw std::invalid_argument("invalid-profile: current must be >= 0");
    }
}

double MissionProfile::total_duration_s() const {
    double t = 0.0;
    for (const auto& s : segments) t += s.duration_s;
    return t;
}

double MissionProfile::total_charge_ah() const {
    double ah = 0.0;
    for (const auto& s : segments) ah += s.current_a * s.duration_s / 3600.0;
    return ah;
}

std::size_t MissionProfile::segment_at(double t) const {
    double acc = 0.0;
    for (std::size_t i = 0; i < segments.size(); ++i) {
        acc += segments[i].duration_s;
        if (t < acc) return i;
    }
    return segments.size() - 1;
}

MissionProfile build_mission_profile(double hover_current_a, double cruise_current_a,
                                     double wait_current_a) {
    if (hover_current_a < 0.0 || cruise_current_a < 0.0 || wait_current_a < 0.0) {
        throw std::invalid_argument("invalid-profile: currents must be >= 0");
    }
    MissionProfile p;
    p.segments = {{"takeoff_hover", 60.0, hover_current_a},
                  {"cruise_out", 29.0 * 60.0, cruise_current_a},
                  {"landing_hover", 60.0, hover_current_a},
                  {"wait", 3.0 * 60.0, wait_current_a},
                  {"takeoff_hover", 60.0, hover_current_a},
                  {"cruise_back", 29.0 * 60.0, cruise_current_a},
                  {"landing_hover", 60.0, hover_current_a}};
    return p;
}

void BatteryModel::validate() const {
    if (cells_series < 1) throw std::invalid_argument("invalid-battery: cells_series must be >= 1");
    if (!(capacity_ah > 0.0)) throw std::invalid_argument("invalid-battery: capacity must be > 0");
    if (internal_resistance_ohm < 0.0) {
        throw std::invalid_argument("invalid-battery: internal resistance must be >= 0");
    }
    if (ocv_curve.size() < 2) throw std::invalid_argument("invalid-battery: ocv curve too short");
    for (std::size_t i = 1; i < ocv_curve.size(); ++i) {
        if (!(ocv_curve[i].soc > ocv_curve[i - 1].soc) ||
            !(ocv_curve[i].volts > ocv_curve[i - 1].volts)) {
            throw std::invalid_argument("invalid-battery: ocv curve must strictly increase with soc");
        }
    }
}

double BatteryModel::ocv_cell(double soc) const {
    const double s = std::clamp(soc, ocv_curve.front().soc, ocv_curve.back().soc);
    for (std::size_t i = 1; i < ocv_curve.size(); ++i) {
        if (s <= ocv_curve[i].soc) {
            const auto& lo = ocv_curve[i - 1];
            const auto& hi = ocv_curve[i];
            const double w = (s - lo.soc) / (hi.soc - lo.soc);
            return lo.volts + w * (hi.volts - lo.volts);
        }
    }
    return ocv_curve.back().volts;
}

BatteryModel BatteryModel::lipo_default() {
    BatteryModel b;
    b.name = "lipo";
    b.cells_series = 6;
    b.capacity_ah = 14.5;
    b.internal_resistance_ohm = 0.005;
    b.cutoff_volts_per_cell = 3.0;
    b.ocv_curve = {{0.00, 3.30}, {0.10, 3.55}, {0.20, 3.65}, {0.30, 3.72}, {0.40, 3.78},
                   {0.50, 3.84}, {0.60, 3.90}, {0.75, 3.99}, {0.90, 4.10}, {1.00, 4.20}};
    return b;
}

BatteryModel BatteryModel::liion_default() {
    BatteryModel b;
    b.name = "liion";
    b.cells_series = 6;
    // 22% more charge than the lipo pack, but a much higher source impedance
    b.capacity_ah = 14.5 * 1.22;
    b.internal_resistance_ohm = 0.026;
    b.cutoff_volts_per_cell = 3.0;
    b.ocv_curve = {{0.00, 3.00}, {0.10, 3.25}, {0.20, 3.40}, {0.30, 3.50}, {0.40, 3.57},
                   {0.50, 3.63}, {0.60, 3.70}, {0.75, 3.82}, {0.90, 4.00}, {1.00, 4.15}};
    return b;
}

DischargeResult simulate_discharge(const BatteryModel& battery, const MissionProfile& profile,
                                   double dt_s) {
    battery.validate();
    profile.validate();
    if (!(dt_s > 0.0)) throw std::invalid_argument("invalid-params: dt must be > 0");

    DischargeResult res;
    const double t_end = profile.total_duration_s();
    const long steps = std::lround(t_end / dt_s);

    double soc = 1.0;
    double prev_terminal_w = 0.0, prev_loss_w = 0.0, prev_source_w = 0.0;
    bool have_prev = false;

    for (long k = 0; k <= steps; ++k) {
        const double t = k * dt_s;
        const std::size_t seg = profile.segment_at(std::min(t, t_end - 0.5 * dt_s));
        const double amps = profile.segments[seg].current_a;

        const double cell_v = battery.ocv_cell(soc) - amps * battery.internal_resistance_ohm;
        const double pack_v = cell_v * battery.cells_series;
        const double terminal_w = pack_v * amps;
        const double loss_w = amps * amps * battery.internal_resistance_ohm * battery.cells_series;
        const double source_w = battery.ocv_cell(soc) * battery.cells_series * amps;

        res.trace.push_back({t, soc, pack_v, amps, terminal_w});

        if (res.completed && cell_v < battery.cutoff_volts_per_cell) {
            res.completed = false;
            res.first_failure_s = t;
            res.failure_segment = static_cast<int>(seg);
            res.failure_segment_label = profile.segments[seg].label;
        }

        if (have_prev) {
            res.terminal_energy_j += 0.5 * (prev_terminal_w + terminal_w) * dt_s;
            res.loss_energy_j += 0.5 * (prev_loss_w + loss_w) * dt_s;
            res.source_energy_j += 0.5 * (prev_source_w + source_w) * dt_s;
        }
        prev_terminal_w = terminal_w;
        prev_loss_w = loss_w;
        prev_source_w = source_w;
        have_prev = true;

        if (k < steps) {
            soc = std::max(soc - amps * dt_s / 3600.0 / battery.capacity_ah, 0.0);
            res.charge_drawn_ah += amps * dt_s / 3600.0;
        }
    }
    return res;
}

void write_discharge_csv(const std::string& path, const DischargeResult& result) {
    CsvWriter csv(path, {"t", "soc", "volts", "amps", "watts"});
    for (const auto& s : result.trace) {
        csv.row({s.t, s.soc, s.volts, s.amps, s.watts});
    }
}

} // namespace rotorlab
