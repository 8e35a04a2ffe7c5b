#include "rotorlab/csv.hpp"
#include "rotorlab/errors.hpp"
#include "rotorlab/scenario.hpp"
#include "rotorlab/sysid.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <iostream>

namespace {

int dispatch(int argc, char** argv) {
    CLI::App app{"rotorlab: single-rotor tail-sitter flight dynamics laboratory"};
    app.require_subcommand(1);

    std::string out_root;
    if (const char* env = std::getenv("ROTORLAB_OUT")) out_root = env;
    app.add_option("--out", out_root, "output root directory (default $ROTORLAB_OUT or .)");

    // run <scenario.cfg>
    auto* run = app.add_subcommand("run", "run a scenario config");
    std::string run_cfg;
    run->add_option("config", run_cfg, "scenario config file")->required();

    // fit <kind> <csv>
    auto* fit = app.add_subcommand("fit", "fit a model to a CSV input");
    std::string fit_kind, fit_csv;
    double fit_rho = 1.225;
    fit->add_option("kind", fit_kind, "rates | planar | drag")->required();
    fit->add_option("csv", fit_csv, "input CSV file")->required();
    fit->add_option("--rho", fit_rho, "air density for the drag fit");

    // sweep <kind> <config>
    auto* sweep = app.add_subcommand("sweep", "run a sweep config (bem | power)");
    std::string sweep_kind, sweep_cfg;
    sweep->add_option("kind", sweep_kind, "bem | power")->required();
    sweep->add_option("config", sweep_cfg, "sweep config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : rotorlab::kExitConfigError;
    }

    using namespace rotorlab;

    if (run->parsed()) {
        const ScenarioResult r = run_scenario(run_cfg, out_root);
        for (const auto& [k, v] : r.summary) std::printf("%s = %s\n", k.c_str(), v.c_str());
        std::printf("outputs: %s\n", r.out_dir.string().c_str());
        return 0;
    }

    if (fit->parsed()) {
        if (fit_kind == "rates") {
            const auto log = ingest_log(fit_csv);
            const RateModelFit f = fit_rate_model(log);
            std::printf("axis  c_o          c_dx         c_dy         c_p          c_q          rms\n");
            std::printf("p     %-12.6g %-12.6g %-12.6g %-12.6g %-12.6g %-12.6g\n", f.fp.c_o,
                        f.fp.c_dx, f.fp.c_dy, f.fp.c_p, f.fp.c_q, f.residual_rms_p);
            std::printf("q     %-12.6g %-12.6g %-12.6g %-12.6g %-12.6g %-12.6g\n", f.fq.c_o,
                        f.fq.c_dx, f.fq.c_dy, f.fq.c_p, f.fq.c_q, f.residual_rms_q);
            return 0;
        }
        if (fit_kind == "planar") {
            const CsvTable t = read_csv(fit_csv);
            if (t.header != std::vector<std::string>{"pitch", "throttle", "power"}) {
                throw InputError("fit planar: expected header pitch,throttle,power");
            }
            std::vector<PlanarSample> samples;
            for (const auto& row : t.rows) {
                if (row.size() != 3) throw InputError("fit planar: expected 3 fields per row");
                samples.push_back({std::stod(row[0]), std::stod(row[1]), std::stod(row[2])});
            }
            const PlanarFit f = fit_planar_power(samples);
            std::printf("P = %.6g + %.6g*pitch + %.6g*throttle   (residual rms %.6g W)\n", f.a0,
                        f.a_pitch, f.a_throttle, f.residual_rms);
            return 0;
        }
        if (fit_kind == "drag") {
            const CsvTable t = read_csv(fit_csv);
            if (t.header != std::vector<std::string>{"V", "drag"}) {
                throw InputError("fit drag: expected header V,drag");
            }
            std::vector<DragSample> samples;
            for (const auto& row : t.rows) {
                if (row.size() != 2) throw InputError("fit drag: expected 2 fields per row");
                samples.push_back({std::stod(row[0]), std::stod(row[1])});
            }
            const double k = fit_pole_drag(samples, fit_rho);
            std::printf("D = (rho/2) V^2 * %.6g   (rho = %.6g)\n", k, fit_rho);
            return 0;
        }
        throw ConfigError("fit: kind must be rates, planar or drag");
    }

    if (sweep->parsed()) {
        // thin alias onto the scenario runner for the two sweep kinds
        const Config cfg = Config::from_file(sweep_cfg);
        const std::string kind = cfg.get_string("kind");
        if ((sweep_kind == "bem" && kind != "bem_sweep") ||
            (sweep_kind == "power" && kind != "power_curve")) {
            throw ConfigError("sweep: config kind '" + kind + "' does not match '" + sweep_kind +
                              "'");
        }
        if (sweep_kind != "bem" && sweep_kind != "power") {
            throw ConfigError("sweep: kind must be bem or power");
        }
        const ScenarioResult r = run_scenario(sweep_cfg, out_root);
        for (const auto& [k, v] : r.summary) std::printf("%s = %s\n", k.c_str(), v.c_str());
        return 0;
    }

    return rotorlab::kExitConfigError;
}

} // namespace

int main(int argc, char** argv) {
    try {
        return dispatch(argc, argv);
    } catch (const rotorlab::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return rotorlab::kExitConfigError;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return rotorlab::kExitConfigError;
    } catch (const std::out_of_range& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return rotorlab::kExitConfigError;
    } catch (const rotorlab::InputError& e) {
        std::fprintf(stderr, "input error: %s\n", e.what());
        return rotorlab::kExitInputError;
    } catch (const rotorlab::NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return rotorlab::kExitNumericError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
