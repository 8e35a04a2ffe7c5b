#include "rotorlab/scenario.hpp"

#include "rotorlab/aero.hpp"
#include "rotorlab/csv.hpp"
#include "rotorlab/energy.hpp"
#include "rotorlab/errors.hpp"
#include "rotorlab/math.hpp"
#include "rotorlab/propulsion.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace rotorlab {

namespace fs = std::filesystem;

ScenarioKind parse_scenario_kind(const std::string& name) {
    if (name == "doublet") return ScenarioKind::Doublet;
    if (name == "closed_loop") return ScenarioKind::ClosedLoop;
    if (name == "flap_only") return ScenarioKind::FlapOnly;
    if (name == "bem_sweep") return ScenarioKind::BemSweep;
    if (name == "power_curve") return ScenarioKind::PowerCurve;
    if (name == "mission_energy") return ScenarioKind::MissionEnergy;
    if (name == "fit_rates") return ScenarioKind::FitRates;
    if (name == "fit_planar") return ScenarioKind::FitPlanar;
    if (name == "fit_drag") return ScenarioKind::FitDrag;
    throw ConfigError("scenario: unknown kind '" + name + "'");
}

bool ScenarioResult::has(const std::string& key) const {
    for (const auto& [k, v] : summary) {
        if (k == key) return true;
    }
    return false;
}

std::string ScenarioResult::text(const std::string& key) const {
    for (const auto& [k, v] : summary) {
        if (k == key) return v;
    }
    throw InputError("summary: missing key '" + key + "'");
}

double ScenarioResult::value(const std::string& key) const {
    const std::string raw = text(key);
    try {
        return std::stod(raw);
    } catch (const std::exception&) {
        throw InputError("summary: key '" + key + "' is not numeric: " + raw);
    }
}

CoupledSimulator::CoupledSimulator(const CoupledVehicle& vehicle, double dt)
    : vehicle_(vehicle), dt_(dt) {
    vehicle_.validate();
    state_ = initial_hover_state(vehicle_);
    if (!(dt > 0.0) || dt * state_.omega >= 0.2) {
        throw ConfigError("simulator: dt violates the dt*omega < 0.2 resolution guard");
    }
}

void CoupledSimulator::step(const CyclicCommand& cmd) {
    state_ = step_coupled(state_, vehicle_, cmd, dt_);
    ++steps_;
}

CoupledVehicle vehicle_from_config(const Config& cfg) {
    CoupledVehicle v;
    v.rotor.radius_m = cfg.get_double("vehicle.rotor_radius_m", v.rotor.radius_m);
    v.rotor.blade_mass_kg = cfg.get_double("vehicle.blade_mass_kg", v.rotor.blade_mass_kg);
    v.rotor.flap_inertia_kgm2 = cfg.get_double("vehicle.flap_inertia_kgm2", v.rotor.flap_inertia_kgm2);
    v.rotor.hinge_spring_nm_per_rad =
        cfg.get_double("vehicle.hinge_spring_nm_per_rad", v.rotor.hinge_spring_nm_per_rad);
    v.rotor.lift_slope_per_rad = cfg.get_double("vehicle.lift_slope_per_rad", v.rotor.lift_slope_per_rad);
    v.rotor.mean_chord_m = cfg.get_double("vehicle.mean_chord_m", v.rotor.mean_chord_m);
    v.rotor.air_density_kgm3 = cfg.get_double("vehicle.air_density_kgm3", v.rotor.air_density_kgm3);
    v.rotor.rpm_nominal = cfg.get_double("vehicle.rpm", v.rotor.rpm_nominal);
    v.body.ixx_kgm2 = cfg.get_double("vehicle.ixx_kgm2", v.body.ixx_kgm2);
    v.body.iyy_kgm2 = cfg.get_double("vehicle.iyy_kgm2", v.body.iyy_kgm2);
    v.body.izz_kgm2 = cfg.get_double("vehicle.izz_kgm2", v.body.izz_kgm2);
    v.body.mass_kg = cfg.get_double("vehicle.mass_kg", v.body.mass_kg);
    v.body.rotor_offset_z_m = cfg.get_double("vehicle.rotor_offset_z_m", v.body.rotor_offset_z_m);
    v.thrust_n = cfg.get_double("vehicle.thrust_n", v.body.mass_kg * 9.81);
    v.actuator_lag_s = cfg.get_double("vehicle.actuator_lag_s", 0.0);
    v.rotor_spin_inertia_kgm2 =
        cfg.get_double("vehicle.rotor_spin_inertia_kgm2", 2.0 * v.rotor.flap_inertia_kgm2);
    v.validate();
    return v;
}

std::vector<LogFrame> run_identification_experiment(const CoupledVehicle& vehicle,
                                                    double duration_s, double amplitude,
                                                    double sim_dt_s, double sample_hz) {
    CoupledSimulator sim(vehicle, sim_dt_s);
    const long decim = std::max(1l, std::lround(1.0 / (sample_hz * sim_dt_s)));
    const long steps = std::lround(duration_s / sim_dt_s);

    auto excitation = [amplitude](double t) {
        CyclicCommand c;
        c.delta_p = amplitude * (std::sin(2.0 * kPi * 0.37 * t) +
                                 0.6 * std::sin(2.0 * kPi * 0.90 * t + 1.0));
        c.delta_q = amplitude * (std::sin(2.0 * kPi * 0.23 * t + 0.5) +
                                 0.6 * std::sin(2.0 * kPi * 0.71 * t + 2.1));
        return c;
    };

    std::vector<LogFrame> log;
    log.reserve(steps / decim + 2);
    CyclicCommand cmd = excitation(0.0);
    auto record = [&](double t) {
        LogFrame f;
        f.t = t;
        f.p = sim.state().p;
        f.q = sim.state().q;
        f.delta_x = cmd.delta_p;
        f.delta_y = cmd.delta_q;
        f.rpm = vehicle.rotor.rpm_nominal;
        log.push_back(f);
    };
    record(0.0);
    for (long k = 0; k < steps; ++k) {
        cmd = excitation(k * sim_dt_s);
        sim.step(cmd);
        if ((k + 1) % decim == 0) record((k + 1) * sim_dt_s);
    }
    return log;
}

ClosedLoopMetrics run_closed_loop_experiment(const CoupledVehicle& vehicle,
                                             const ClosedLoopOptions& opt) {
    ClosedLoopMetrics metrics;
    if (opt.identify_model) {
        metrics.id_log = run_identification_experiment(vehicle, opt.id_duration_s,
                                                       opt.id_amplitude, opt.sim_dt_s,
                                                       opt.id_sample_hz);
        metrics.fit = fit_rate_model(metrics.id_log, {opt.fit_cutoff_rad_s, 30.0});
    } else {
        metrics.fit.fp = opt.config_fp;
        metrics.fit.fq = opt.config_fq;
    }

    const RateModel model =
        RateModel::from_identification(metrics.fit.fp, metrics.fit.fq, opt.kc, opt.kp, opt.kq);
    RateController controller(model, opt.loop_hz, opt.feedback_cutoff_rad_s, kDefaultCommandLimit);

    CoupledSimulator sim(vehicle, opt.sim_dt_s);
    const long per_tick = std::max(1l, std::lround(1.0 / (opt.loop_hz * opt.sim_dt_s)));
    const double total_s = opt.doublet_duration_s + opt.settle_s;
    const long ticks = std::lround(total_s * opt.loop_hz);

    auto rate_command = [&](double t) {
        if (t < 0.5 * opt.doublet_duration_s) return opt.rate_amplitude_rad_s;
        if (t < opt.doublet_duration_s) return -opt.rate_amplitude_rad_s;
        return 0.0;
    };

    double sum_p2 = 0.0, sum_q2 = 0.0;
    long count = 0;
    metrics.trace.reserve(ticks + 1);
    for (long tick = 0; tick < ticks; ++tick) {
        const double t = tick * per_tick * opt.sim_dt_s;
        const double cmd_rate = rate_command(t);
        const double p_cmd = (opt.axis == Axis::Roll) ? cmd_rate : 0.0;
        const double q_cmd = (opt.axis == Axis::Pitch) ? cmd_rate : 0.0;

        const CyclicPair u = controller.update(p_cmd, q_cmd, sim.state().p, sim.state().q);
        const CyclicCommand cyc{u.delta_x, u.delta_y, 0.0};
        for (long s = 0; s < per_tick; ++s) sim.step(cyc);

        const auto& st = sim.state();
        metrics.trace.push_back({sim.time(), st.p, st.q, st.r, cyc.delta_p, cyc.delta_q});
        sum_p2 += st.p * st.p;
        sum_q2 += st.q * st.q;
        ++count;
    }

    const double rms_p = std::sqrt(sum_p2 / count);
    const double rms_q = std::sqrt(sum_q2 / count);
    metrics.rms_on_axis = (opt.axis == Axis::Pitch) ? rms_q : rms_p;
    metrics.rms_cross_axis = (opt.axis == Axis::Pitch) ? rms_p : rms_q;
    return metrics;
}

namespace {

double parse_csv_field(const std::string& raw, const char* what, std::size_t lineno) {
    try {
        std::size_t used = 0;
        const double v = std::stod(raw, &used);
        if (used != raw.size()) throw std::invalid_argument(raw);
        return v;
    } catch (const std::exception&) {
        throw InputError(std::string(what) + ": bad numeric field '" + raw + "' at line " +
                         std::to_string(lineno));
    }
}

void append(ScenarioResult& r, const std::string& key, double v) {
    r.summary.emplace_back(key, CsvWriter::format(v));
}

void append(ScenarioResult& r, const std::string& key, const std::string& v) {
    r.summary.emplace_back(key, v);
}

void write_summary(const ScenarioResult& r) {
    std::ofstream out(r.out_dir / "summary.txt");
    if (!out) throw InputError("scenario: cannot write summary.txt");
    for (const auto& [k, v] : r.summary) out << k << " = " << v << "\n";
}

Axis parse_axis(const std::string& s) {
    if (s == "pitch") return Axis::Pitch;
    if (s == "roll") return Axis::Roll;
    throw ConfigError("scenario: axis must be 'pitch' or 'roll', got '" + s + "'");
}

void append_fit(ScenarioResult& r, const RateModelFit& fit) {
    append(r, "fp_c_o", fit.fp.c_o);
    append(r, "fp_c_dx", fit.fp.c_dx);
    append(r, "fp_c_dy", fit.fp.c_dy);
    append(r, "fp_c_p", fit.fp.c_p);
    append(r, "fp_c_q", fit.fp.c_q);
    append(r, "fq_c_o", fit.fq.c_o);
    append(r, "fq_c_dx", fit.fq.c_dx);
    append(r, "fq_c_dy", fit.fq.c_dy);
    append(r, "fq_c_p", fit.fq.c_p);
    append(r, "fq_c_q", fit.fq.c_q);
    append(r, "residual_rms_p", fit.residual_rms_p);
    append(r, "residual_rms_q", fit.residual_rms_q);
    append(r, "orthogonality", fit.orthogonality);
}

void write_fit_csv(const fs::path& path, const RateModelFit& fit) {
    CsvWriter csv(path.string(), {"axis", "c_o", "c_dx", "c_dy", "c_p", "c_q", "residual_rms"});
    csv.raw_row({"p", CsvWriter::format(fit.fp.c_o), CsvWriter::format(fit.fp.c_dx),
                 CsvWriter::format(fit.fp.c_dy), CsvWriter::format(fit.fp.c_p),
                 CsvWriter::format(fit.fp.c_q), CsvWriter::format(fit.residual_rms_p)});
    csv.raw_row({"q", CsvWriter::format(fit.fq.c_o), CsvWriter::format(fit.fq.c_dx),
                 CsvWriter::format(fit.fq.c_dy), CsvWriter::format(fit.fq.c_p),
                 CsvWriter::format(fit.fq.c_q), CsvWriter::format(fit.residual_rms_q)});
}

// ---- per-kind runners ------------------------------------------------------

ScenarioResult run_flap_only(const Config& cfg, const fs::path& out) {
    const CoupledVehicle vehicle = vehicle_from_config(cfg);
    CyclicCommand cmd;
    cmd.collective_rad = deg2rad(cfg.get_double("experiment.collective_deg", 0.0));
    cmd.delta_p = cfg.get_double("experiment.delta_p", 0.0);
    cmd.delta_q = cfg.get_double("experiment.delta_q", 0.0);
    cmd = clamp_collective(cmd);
    validate_command(cmd);
    const double duration = cfg.get_double("experiment.duration_s", 2.0);
    const double dt = cfg.get_double("experiment.dt_s", 1e-4);
    const double beta0 = deg2rad(cfg.get_double("experiment.beta0_deg", 0.0));
    if (!(duration > 0.0)) throw ConfigError("flap_only: duration_s must be > 0");

    FlapState s0;
    s0.beta = beta0;
    s0.omega = vehicle.rotor.omega_nominal();
    const int steps = static_cast<int>(std::lround(duration / dt));
    const auto traj = integrate_flap(s0, vehicle.rotor, cmd, dt, steps);

    fs::create_directories(out);
    write_flap_csv((out / "flap.csv").string(), traj);

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("flap_only"));
    append(r, "lock_number", lock_number(vehicle.rotor));
    append(r, "final_beta_rad", traj.back().beta);
    append(r, "steady_state_beta_rad",
           flap_steady_state(vehicle.rotor, s0.omega, cmd.collective_rad));
    write_summary(r);
    return r;
}

ScenarioResult run_doublet(const Config& cfg, const fs::path& out) {
    const CoupledVehicle vehicle = vehicle_from_config(cfg);
    const Axis axis = parse_axis(cfg.get_string("experiment.axis", "pitch"));
    const double amplitude = cfg.get_double("experiment.amplitude", 0.1);
    const double duration = cfg.get_double("experiment.duration_s", 2.0);
    const double settle = cfg.get_double("experiment.settle_s", 2.0);
    const double dt = cfg.get_double("experiment.dt_s", 1.0 / 2048.0);
    if (!(duration > 0.0)) throw ConfigError("doublet: duration_s must be > 0");

    const auto trace = doublet_response(vehicle, axis, amplitude, duration, dt, settle);

    double peak_p = 0.0, peak_q = 0.0;
    for (const auto& s : trace) {
        peak_p = std::max(peak_p, std::abs(s.p));
        peak_q = std::max(peak_q, std::abs(s.q));
    }

    fs::create_directories(out);
    write_rate_csv((out / "rates.csv").string(), trace);

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("doublet"));
    append(r, "axis", std::string(axis == Axis::Pitch ? "pitch" : "roll"));
    append(r, "peak_p_rad_s", peak_p);
    append(r, "peak_q_rad_s", peak_q);
    const double on = (axis == Axis::Pitch) ? peak_q : peak_p;
    const double cross = (axis == Axis::Pitch) ? peak_p : peak_q;
    append(r, "peak_on_axis_rad_s", on);
    append(r, "peak_cross_axis_rad_s", cross);
    append(r, "cross_to_on_peak_ratio", on > 0.0 ? cross / on : 0.0);
    write_summary(r);
    return r;
}

ScenarioResult run_closed_loop(const Config& cfg, const fs::path& out) {
    const CoupledVehicle vehicle = vehicle_from_config(cfg);
    ClosedLoopOptions opt;
    opt.kc = cfg.get_double("experiment.kc", opt.kc);
    opt.kp = cfg.get_double("experiment.kp", opt.kp);
    opt.kq = cfg.get_double("experiment.kq", opt.kq);
    opt.loop_hz = cfg.get_double("experiment.loop_hz", opt.loop_hz);
    opt.feedback_cutoff_rad_s =
        cfg.get_double("experiment.feedback_cutoff_rad_s", opt.feedback_cutoff_rad_s);
    opt.fit_cutoff_rad_s = cfg.get_double("experiment.fit_cutoff_rad_s", opt.fit_cutoff_rad_s);
    opt.sim_dt_s = cfg.get_double("experiment.dt_s", opt.sim_dt_s);
    opt.axis = parse_axis(cfg.get_string("experiment.axis", "pitch"));
    opt.rate_amplitude_rad_s =
        cfg.get_double("experiment.rate_amplitude_rad_s", opt.rate_amplitude_rad_s);
    opt.doublet_duration_s = cfg.get_double("experiment.duration_s", opt.doublet_duration_s);
    opt.settle_s = cfg.get_double("experiment.settle_s", opt.settle_s);
    opt.id_duration_s = cfg.get_double("experiment.id_duration_s", opt.id_duration_s);
    opt.id_amplitude = cfg.get_double("experiment.id_amplitude", opt.id_amplitude);
    opt.id_sample_hz = cfg.get_double("experiment.id_sample_hz", opt.id_sample_hz);
    if (opt.kc < 0.0 || opt.kc > 1.0) throw ConfigError("closed_loop: kc must lie in [0, 1]");

    const std::string source = cfg.get_string("experiment.model_source", "identify");
    if (source == "config") {
        opt.identify_model = false;
        opt.config_fp = {cfg.get_double("model.fp_c_o"), cfg.get_double("model.fp_c_dx"),
                         cfg.get_double("model.fp_c_dy"), cfg.get_double("model.fp_c_p"),
                         cfg.get_double("model.fp_c_q")};
        opt.config_fq = {cfg.get_double("model.fq_c_o"), cfg.get_double("model.fq_c_dx"),
                         cfg.get_double("model.fq_c_dy"), cfg.get_double("model.fq_c_p"),
                         cfg.get_double("model.fq_c_q")};
    } else if (source != "identify") {
        throw ConfigError("closed_loop: model_source must be 'identify' or 'config'");
    }

    const ClosedLoopMetrics metrics = run_closed_loop_experiment(vehicle, opt);

    fs::create_directories(out);
    write_rate_csv((out / "rates.csv").string(), metrics.trace);
    if (!metrics.id_log.empty()) write_log_csv((out / "idlog.csv").string(), metrics.id_log);
    write_fit_csv(out / "model.csv", metrics.fit);

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("closed_loop"));
    append(r, "kc", opt.kc);
    append(r, "rms_on_axis_rad_s", metrics.rms_on_axis);
    append(r, "rms_cross_axis_rad_s", metrics.rms_cross_axis);
    append(r, "cross_to_on_rms_ratio",
           metrics.rms_on_axis > 0.0 ? metrics.rms_cross_axis / metrics.rms_on_axis : 0.0);
    append_fit(r, metrics.fit);
    write_summary(r);
    return r;
}

ScenarioResult run_bem_sweep(const Config& cfg, const fs::path& out) {
    const BladeGeometry geom = BladeGeometry::default_rotor();
    const double rho = cfg.get_double("sweep.rho", 1.225);
    std::vector<double> rpms = cfg.has("sweep.rpm") ? cfg.get_doubles("sweep.rpm")
                                                    : std::vector<double>{500, 910, 1140, 1500};
    std::vector<double> pitches = cfg.has("sweep.pitch_deg")
                                      ? cfg.get_doubles("sweep.pitch_deg")
                                      : std::vector<double>{10, 23, 30, 50};
    std::vector<double> speeds = cfg.has("sweep.airspeed_ms") ? cfg.get_doubles("sweep.airspeed_ms")
                                                              : std::vector<double>{0, 21.5};

    const auto sweep = bem_sweep(geom, rpms, pitches, speeds, rho);

    fs::create_directories(out);
    write_sweep_csv((out / "sweep.csv").string(), sweep);

    const BemResult hover = bem_performance(geom, {1500.0, 10.0, 0.0}, rho);
    const BemResult cruise = bem_performance(geom, {910.0, 30.0, 21.5}, rho);

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("bem_sweep"));
    append(r, "hover_thrust_n", hover.thrust_n);
    append(r, "hover_power_w", hover.power_w);
    append(r, "hover_figure_of_merit", hover.efficiency);
    append(r, "cruise_thrust_n", cruise.thrust_n);
    append(r, "cruise_power_w", cruise.power_w);
    append(r, "cruise_efficiency", cruise.efficiency);
    write_summary(r);
    return r;
}

AirframeAero aero_from_config(const Config& cfg) {
    AirframeAero a;
    a.wing_area_m2 = cfg.get_double("aero.wing_area_m2", a.wing_area_m2);
    a.aspect_ratio = cfg.get_double("aero.aspect_ratio", a.aspect_ratio);
    a.oswald_e = cfg.get_double("aero.oswald_e", a.oswald_e);
    a.cd0_clean = cfg.get_double("aero.cd0_clean", a.cd0_clean);
    a.cd0_protrusions = cfg.get_double("aero.cd0_protrusions", a.cd0_protrusions);
    a.cl_stall_clamp = cfg.get_double("aero.cl_stall_clamp", a.cl_stall_clamp);
    a.validate();
    return a;
}

ScenarioResult run_power_curve(const Config& cfg, const fs::path& out) {
    const AirframeAero aero = aero_from_config(cfg);
    const double mass = cfg.get_double("sweep.mass_kg", 4.5);
    const double rho = cfg.get_double("sweep.rho", 1.225);
    const double v_lo = cfg.get_double("sweep.v_lo_ms", 10.0);
    const double v_hi = cfg.get_double("sweep.v_hi_ms", 30.0);
    const double step = cfg.get_double("sweep.v_step_ms", 0.5);
    if (!(v_hi > v_lo) || !(step > 0.0)) throw ConfigError("power_curve: bad sweep bounds");

    const auto curve = power_curve(v_lo, v_hi, step, mass, rho, aero);

    fs::create_directories(out);
    write_power_curve_csv((out / "curve.csv").string(), curve);

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("power_curve"));
    append(r, "stall_speed_ms", stall_speed(mass, rho, aero));
    append(r, "min_power_speed_ms", min_power_speed(mass, rho, aero));
    append(r, "power_at_cruise_21p5_w",
           21.5 > stall_speed(mass, rho, aero) ? required_power(21.5, mass, rho, aero) : -1.0);
    write_summary(r);
    return r;
}

BatteryModel battery_from_config(const Config& cfg) {
    const std::string preset = cfg.get_string("battery.preset", "lipo");
    BatteryModel b;
    if (preset == "lipo") {
        b = BatteryModel::lipo_default();
    } else if (preset == "liion") {
        b = BatteryModel::liion_default();
    } else {
        throw ConfigError("mission_energy: battery.preset must be 'lipo' or 'liion'");
    }
    b.cells_series = static_cast<int>(cfg.get_int("battery.cells_series", b.cells_series));
    b.capacity_ah = cfg.get_double("battery.capacity_ah", b.capacity_ah);
    b.internal_resistance_ohm =
        cfg.get_double("battery.internal_resistance_ohm", b.internal_resistance_ohm);
    b.cutoff_volts_per_cell = cfg.get_double("battery.cutoff_volts_per_cell", b.cutoff_volts_per_cell);

    // optional per-cell OCV table override: two parallel lists
    if (cfg.has("battery.ocv_soc") || cfg.has("battery.ocv_volts")) {
        const auto socs = cfg.get_doubles("battery.ocv_soc");
        const auto volts = cfg.get_doubles("battery.ocv_volts");
        if (socs.size() != volts.size() || socs.size() < 2) {
            throw ConfigError("mission_energy: ocv_soc and ocv_volts must be equal-length lists");
        }
        b.ocv_curve.clear();
        for (std::size_t i = 0; i < socs.size(); ++i) b.ocv_curve.push_back({socs[i], volts[i]});
    }
    b.validate();
    return b;
}

ScenarioResult run_mission_energy(const Config& cfg, const fs::path& out) {
    const BatteryModel battery = battery_from_config(cfg);
    const MissionProfile profile =
        build_mission_profile(cfg.get_double("profile.hover_current_a", 23.0),
                              cfg.get_double("profile.cruise_current_a", 12.0),
                              cfg.get_double("profile.wait_current_a", 1.0));
    const double dt = cfg.get_double("profile.dt_s", 1.0);

    const DischargeResult sim = simulate_discharge(battery, profile, dt);

    fs::create_directories(out);
    write_discharge_csv((out / "discharge.csv").string(), sim);

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("mission_energy"));
    append(r, "battery", battery.name);
    append(r, "profile_duration_s", profile.total_duration_s());
    append(r, "profile_charge_ah", profile.total_charge_ah());
    append(r, "completed", std::string(sim.completed ? "true" : "false"));
    append(r, "failure_segment_index", static_cast<double>(sim.failure_segment));
    append(r, "failure_segment_label",
           sim.failure_segment >= 0 ? sim.failure_segment_label : std::string("none"));
    append(r, "first_failure_s", sim.first_failure_s);
    append(r, "charge_drawn_ah", sim.charge_drawn_ah);
    append(r, "terminal_energy_j", sim.terminal_energy_j);
    append(r, "loss_energy_j", sim.loss_energy_j);
    append(r, "source_energy_j", sim.source_energy_j);
    const double balance =
        std::abs(sim.terminal_energy_j + sim.loss_energy_j - sim.source_energy_j);
    append(r, "energy_balance_residual_j", balance);
    append(r, "energy_balance_relative",
           sim.source_energy_j > 0.0 ? balance / sim.source_energy_j : 0.0);
    write_summary(r);
    return r;
}

ScenarioResult run_fit_rates(const Config& cfg, const fs::path& out) {
    std::vector<LogFrame> log;
    bool synthetic = false;
    if (cfg.has("input.log")) {
        log = ingest_log(cfg.get_string("input.log"));
    } else {
        synthetic = true;
        SyntheticLogOptions o;
        o.duration_s = cfg.get_double("synthetic.duration_s", 60.0);
        o.sample_hz = cfg.get_double("synthetic.sample_hz", 100.0);
        o.accel_noise_fraction = cfg.get_double("synthetic.accel_noise_fraction", 0.0);
        o.seed = static_cast<unsigned long long>(cfg.get_int("seed", 1));
        log = make_synthetic_rate_log(RateModel::reference_fixture(), o);
    }
    RateFitOptions fo;
    fo.cutoff_rad_s = cfg.get_double("fit.cutoff_rad_s", 15.0);

    const RateModelFit fit = fit_rate_model(log, fo);

    fs::create_directories(out);
    if (synthetic) write_log_csv((out / "synthetic_log.csv").string(), log);
    write_fit_csv(out / "coefficients.csv", fit);

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("fit_rates"));
    append(r, "frames", static_cast<double>(log.size()));
    append_fit(r, fit);
    write_summary(r);
    return r;
}

ScenarioResult run_fit_planar(const Config& cfg, const fs::path& out) {
    std::vector<PlanarSample> samples;
    if (cfg.has("input.csv")) {
        const CsvTable t = read_csv(cfg.get_string("input.csv"));
        if (t.header != std::vector<std::string>{"pitch", "throttle", "power"}) {
            throw InputError("fit_planar: expected header pitch,throttle,power");
        }
        std::size_t lineno = 1;
        for (const auto& row : t.rows) {
            ++lineno;
            if (row.size() != 3) throw InputError("fit_planar: expected 3 fields per row");
            samples.push_back({parse_csv_field(row[0], "fit_planar", lineno),
                               parse_csv_field(row[1], "fit_planar", lineno),
                               parse_csv_field(row[2], "fit_planar", lineno)});
        }
    } else {
        const double a0 = cfg.get_double("synthetic.a0", 120.0);
        const double ap = cfg.get_double("synthetic.a_pitch", 14.0);
        const double at = cfg.get_double("synthetic.a_throttle", 310.0);
        const auto pitches = cfg.has("synthetic.pitch")
                                 ? cfg.get_doubles("synthetic.pitch")
                                 : std::vector<double>{10, 15, 20, 25, 30};
        const auto throttles = cfg.has("synthetic.throttle")
                                   ? cfg.get_doubles("synthetic.throttle")
                                   : std::vector<double>{0.3, 0.45, 0.6, 0.75, 0.9};
        for (double pch : pitches) {
            for (double thr : throttles) {
                samples.push_back({pch, thr, a0 + ap * pch + at * thr});
            }
        }
    }

    const PlanarFit fit = fit_planar_power(samples);

    fs::create_directories(out);
    {
        CsvWriter csv((out / "fit.csv").string(), {"a0", "a_pitch", "a_throttle", "residual_rms"});
        csv.row({fit.a0, fit.a_pitch, fit.a_throttle, fit.residual_rms});
    }

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("fit_planar"));
    append(r, "samples", static_cast<double>(samples.size()));
    append(r, "a0", fit.a0);
    append(r, "a_pitch", fit.a_pitch);
    append(r, "a_throttle", fit.a_throttle);
    append(r, "residual_rms_w", fit.residual_rms);
    write_summary(r);
    return r;
}

ScenarioResult run_fit_drag(const Config& cfg, const fs::path& out) {
    const double rho = cfg.get_double("fit.rho", 1.225);
    std::vector<DragSample> samples;
    if (cfg.has("input.csv")) {
        const CsvTable t = read_csv(cfg.get_string("input.csv"));
        if (t.header != std::vector<std::string>{"V", "drag"}) {
            throw InputError("fit_drag: expected header V,drag");
        }
        std::size_t lineno = 1;
        for (const auto& row : t.rows) {
            ++lineno;
            if (row.size() != 2) throw InputError("fit_drag: expected 2 fields per row");
            samples.push_back({parse_csv_field(row[0], "fit_drag", lineno),
                               parse_csv_field(row[1], "fit_drag", lineno)});
        }
    } else {
        const double k = cfg.get_double("synthetic.k", 0.195);
        const auto speeds = cfg.has("synthetic.airspeed_ms")
                                ? cfg.get_doubles("synthetic.airspeed_ms")
                                : std::vector<double>{15, 19, 24, 27};
        for (double v : speeds) samples.push_back({v, 0.5 * rho * v * v * k});
    }

    const double k_fit = fit_pole_drag(samples, rho);

    fs::create_directories(out);
    {
        CsvWriter csv((out / "fit.csv").string(), {"k", "rho"});
        csv.row({k_fit, rho});
    }

    ScenarioResult r;
    r.out_dir = out;
    append(r, "kind", std::string("fit_drag"));
    append(r, "samples", static_cast<double>(samples.size()));
    append(r, "k", k_fit);
    append(r, "drag_at_24_ms_n", 0.5 * rho * 24.0 * 24.0 * k_fit);
    write_summary(r);
    return r;
}

} // namespace

ScenarioResult run_scenario(const std::string& config_path, const std::string& output_root) {
    const Config cfg = Config::from_file(config_path);
    const ScenarioKind kind = parse_scenario_kind(cfg.get_string("kind"));

    const std::string rel = cfg.get_string("output.dir", cfg.get_string("kind"));
    const fs::path out = fs::path(output_root.empty() ? "." : output_root) / rel;

    switch (kind) {
        case ScenarioKind::FlapOnly: return run_flap_only(cfg, out);
        case ScenarioKind::Doublet: return run_doublet(cfg, out);
        case ScenarioKind::ClosedLoop: return run_closed_loop(cfg, out);
        case ScenarioKind::BemSweep: return run_bem_sweep(cfg, out);
        case ScenarioKind::PowerCurve: return run_power_curve(cfg, out);
        case ScenarioKind::MissionEnergy: return run_mission_energy(cfg, out);
        case ScenarioKind::FitRates: return run_fit_rates(cfg, out);
        case ScenarioKind::FitPlanar: return run_fit_planar(cfg, out);
        case ScenarioKind::FitDrag: return run_fit_drag(cfg, out);
    }
    throw ConfigError("scenario: unhandled kind");
}

} // namespace rotorlab
