#pragma once

#include <string>
#include <vector>

namespace rotorlab {

struct MissionSegment {
    std::string label;
    double duration_s = 0.0;
    double current_a = 0.0;
};

struct MissionProfile {
    std::vector<MissionSegment> segments;

    void validate() const; // throws std::invalid_argument
    double total_duration_s() const;
    double total_charge_ah() const;
    // segment index active at time t, last segment at/after the end
    std::size_t segment_at(double t) const;
};

// Dual-leg mission: hover take-off, cruise out, hover landing, wait, then
// the identical return leg.
MissionProfile build_mission_profile(double hover_current_a, double cruise_current_a,
                                     double wait_current_a);

struct OcvPoint {
    double soc = 0.0;    // state of charge, 0..1
    double volts = 0.0;  // per cell, open circuit
};

// Zeroth-order Thevenin pack: per-cell OCV table with a series resistance.
struct BatteryModel {
    std::string name = "pack";
    int cells_series = 6;
    double capacity_ah = 14.5;
    double internal_resistance_ohm = 0.005; // per cell
    double cutoff_volts_per_cell = 3.0;
    std::vector<OcvPoint> ocv_curve; // strictly increasing in soc

    void validate() const;
    double ocv_cell(double soc) const; // clamped piecewise-linear lookup

    // shipped calibration placeholders, not measured cell data
    static BatteryModel lipo_default();
    static BatteryModel liion_default();
};

struct DischargeSample {
    double t = 0.0;
    double soc = 0.0;
    double volts = 0.0; // pack terminal voltage
    double amps = 0.0;
    double watts = 0.0; // terminal power
};

struct DischargeResult {
    std::vector<DischargeSample> trace;
    bool completed = true;
    double first_failure_s = -1.0;     // first instant below cutoff
    int failure_segment = -1;          // index into the profile
    std::string failure_segment_label;
    double charge_drawn_ah = 0.0;
    // energy bookkeeping over the run (trapezoidal, for the balance check)
    double terminal_energy_j = 0.0;
    double loss_energy_j = 0.0;
    double source_energy_j = 0.0; // OCV * I
};

// Integrates the pack through the profile. Undervoltage is reported as
// data, not as an exception; the trace always covers the whole profile.
DischargeResult simulate_discharge(const BatteryModel& battery, const MissionProfile& profile,
                                   double dt_s = 1.0);

void write_discharge_csv(const std::string& path, const DischargeResult& result);

} // namespace rotorlab
