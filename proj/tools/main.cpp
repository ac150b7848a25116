// Command-line front end: scenario simulation, equilibrium analyses, sweeps,
// and gnuplot export.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pursuit/io.hpp"
#include "pursuit/linearize.hpp"
#include "pursuit/scenario.hpp"

namespace {

using nlohmann::json;
using namespace pursuit;

struct CommonOpts {
    std::string config;
    std::string out;
    std::string format = "csv";
    std::string equilibrium;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool serial = false;
    bool cross_check = false;
};

RunOptions make_run_options(const CommonOpts& opts) {
    RunOptions ro;
    ro.out_prefix = opts.out;
    if (opts.format == "json") ro.format = OutputFormat::json;
    else if (opts.format != "csv") throw config_error("--format must be csv or json");
    if (opts.seed_set) ro.seed = opts.seed;
    ro.cross_check = opts.cross_check;
    return ro;
}

/// Equilibrium file: {"bearings": [...], "r": signed radius, "v": ..., "k": ...}
std::pair<FleetRelativeState, ControlParams> load_equilibrium(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open equilibrium file '" + path + "'");
    try {
        const json j = json::parse(in);
        const auto bearings = j.at("bearings").get<std::vector<double>>();
        const double r = j.at("r").get<double>();
        ControlParams params{j.at("v").get<double>(), j.at("k").get<double>()};
        auto [xi, desc] = construct_circular_formation(bearings, r, params.v);
        return {std::move(xi), params};
    } catch (const json::exception& e) {
        throw config_error(std::string("equilibrium file: ") + e.what());
    }
}

Scenario scenario_for(const CommonOpts& opts, std::vector<AnalysisKind> analyses) {
    if (opts.config.empty()) throw config_error("provide --config SCENARIO");
    Scenario sc = load_scenario(opts.config);
    sc.analyses = std::move(analyses);
    return sc;
}

int run_single_analysis(const CommonOpts& opts, AnalysisKind kind) {
    const std::string prefix = opts.out.empty() ? "analysis" : opts.out;
    if (!opts.equilibrium.empty()) {
        auto [xi, params] = load_equilibrium(opts.equilibrium);
        if (kind == AnalysisKind::spectrum) {
            const LinearizedSystem lin = linearize(xi, params);
            const ReducedSystem red = reduce(xi, params);
            json out;
            out["sbar"] = red.sbar;
            out["A_hat"] = matrix_to_json(lin.assembled);
            out["A_R"] = matrix_to_json(red.assembled);
            json ev1 = json::array(), ev2 = json::array();
            for (const Complex& l : eigvals(lin.assembled)) ev1.push_back({l.real(), l.imag()});
            for (const Complex& l : eigvals(red.assembled)) ev2.push_back({l.real(), l.imag()});
            out["eig_A_hat"] = ev1;
            out["eig_A_R"] = ev2;
            std::ofstream(prefix + "_spectrum.json") << out.dump(2);
            std::ofstream ahat(prefix + "_A_hat.txt"), ar(prefix + "_A_R.txt");
            write_matrix_text(ahat, lin.assembled);
            write_matrix_text(ar, red.assembled);
            std::cout << "spectrum written to " << prefix << "_spectrum.json\n";
        } else if (kind == AnalysisKind::charpoly) {
            const auto desc = is_circular_formation(xi, 1e-6, params.v);
            const CharPoly cp = implicit_charpoly(desc->bearings, desc->rotation);
            std::ofstream(prefix + "_charpoly.json") << json(cp).dump(2);
            std::cout << "reduced polynomial (ascending coefficients):";
            for (double c : cp.reduced_coeffs) std::cout << ' ' << format_double(c);
            std::cout << "\nwritten to " << prefix << "_charpoly.json\n";
        } else {
            const StabilityVerdict verdict = stability_report(xi, params, opts.cross_check);
            std::ofstream(prefix + "_stability.json") << json(verdict).dump(2);
            std::cout << json(verdict)["classification"].get<std::string>() << " (method "
                      << json(verdict)["method"].get<std::string>() << ")\n";
            if (verdict.routh) print_routh_table(std::cout, *verdict.routh);
        }
        return 0;
    }
    const Scenario sc = scenario_for(opts, {kind});
    const ScenarioResult result = run_scenario(sc, make_run_options(opts));
    for (const std::string& f : result.files_written) std::cout << "wrote " << f << "\n";
    if (result.stability) {
        std::cout << json(*result.stability)["classification"].get<std::string>() << "\n";
        if (result.stability->routh) print_routh_table(std::cout, *result.stability->routh);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cyclic-pursuit circular-formation laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto add_common = [&](CLI::App* cmd, bool with_format = true) {
        cmd->add_option("--config", opts.config, "scenario JSON file or bundled name");
        cmd->add_option("--out", opts.out, "output file prefix");
        cmd->add_option("--seed", opts.seed, "override the random-init seed")
            ->each([&](const std::string&) { opts.seed_set = true; });
        if (with_format)
            cmd->add_option("--format", opts.format, "trajectory format: csv or json");
    };

    CLI::App* cmd_simulate = app.add_subcommand("simulate", "run a scenario's simulation");
    add_common(cmd_simulate);

    CLI::App* cmd_analyze =
        app.add_subcommand("analyze", "run a scenario with all its analyses");
    add_common(cmd_analyze);

    CLI::App* cmd_spectrum =
        app.add_subcommand("spectrum", "linearization matrices and eigenvalues");
    add_common(cmd_spectrum);
    cmd_spectrum->add_option("--equilibrium", opts.equilibrium,
                             "equilibrium JSON {bearings, r, v, k} instead of a scenario");

    CLI::App* cmd_charpoly =
        app.add_subcommand("charpoly", "implicit characteristic polynomial");
    add_common(cmd_charpoly);
    cmd_charpoly->add_option("--equilibrium", opts.equilibrium,
                             "equilibrium JSON {bearings, r, v, k} instead of a scenario");

    CLI::App* cmd_stability = app.add_subcommand("stability", "stability classification");
    add_common(cmd_stability);
    cmd_stability->add_option("--equilibrium", opts.equilibrium,
                              "equilibrium JSON {bearings, r, v, k} instead of a scenario");
    cmd_stability->add_flag("--cross-check", opts.cross_check,
                            "verify the full spectrum against the reduced one");

    CLI::App* cmd_sweep = app.add_subcommand("sweep", "parameter sweep over seeds");
    add_common(cmd_sweep, false);
    cmd_sweep->add_flag("--serial", opts.serial, "disable the OpenMP worker pool");

    CLI::App* cmd_plot =
        app.add_subcommand("plot", "write gnuplot-compatible two-column trajectory files");
    add_common(cmd_plot, false);

    CLI::App* cmd_scenarios = app.add_subcommand("scenarios", "bundled scenarios");
    CLI::App* cmd_list = cmd_scenarios->add_subcommand("list", "list bundled scenario names");
    std::string export_dir;
    CLI::App* cmd_export =
        cmd_scenarios->add_subcommand("export", "write bundled scenarios as JSON files");
    cmd_export->add_option("dir", export_dir, "target directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (cmd_simulate->parsed()) {
            const Scenario sc = scenario_for(opts, {});
            const ScenarioResult result = run_scenario(sc, make_run_options(opts));
            for (const std::string& f : result.files_written) std::cout << "wrote " << f << "\n";
            return 0;
        }
        if (cmd_analyze->parsed()) {
            if (opts.config.empty()) throw config_error("provide --config SCENARIO");
            const Scenario sc = load_scenario(opts.config);
            const ScenarioResult result = run_scenario(sc, make_run_options(opts));
            for (const std::string& f : result.files_written) std::cout << "wrote " << f << "\n";
            if (result.convergence) {
                std::cout << (result.convergence->converged ? "converged" : "not converged");
                if (result.convergence->formation) {
                    const FormationDescriptor& d = *result.convergence->formation;
                    std::cout << ": radius " << d.radius << ", "
                              << (d.rotation > 0 ? "ccw" : "cw") << ", p=" << d.arrangement_p
                              << ", settle t=" << result.convergence->settle_time;
                }
                std::cout << "\n";
            }
            return 0;
        }
        if (cmd_spectrum->parsed()) return run_single_analysis(opts, AnalysisKind::spectrum);
        if (cmd_charpoly->parsed()) return run_single_analysis(opts, AnalysisKind::charpoly);
        if (cmd_stability->parsed())
            return run_single_analysis(opts, AnalysisKind::stability_report);
        if (cmd_sweep->parsed()) {
            if (opts.config.empty()) throw config_error("sweep: provide --config SWEEP.json");
            std::ifstream in(opts.config);
            if (!in) throw config_error("cannot open '" + opts.config + "'");
            std::ostringstream buf;
            buf << in.rdbuf();
            const SweepSpec spec = sweep_from_json_text(buf.str());
            const std::vector<SweepRow> rows = run_sweep(spec, !opts.serial);
            const std::string path =
                (opts.out.empty() ? spec.base.out_prefix : opts.out) + "_sweep.csv";
            std::ofstream out(path);
            write_sweep_csv(out, spec.param, rows);
            write_sweep_csv(std::cout, spec.param, rows);
            std::cout << "wrote " << path << "\n";
            return 0;
        }
        if (cmd_plot->parsed()) {
            const Scenario sc = scenario_for(opts, {});
            RunOptions ro;
            if (opts.seed_set) ro.seed = opts.seed;
            ro.out_prefix = opts.out.empty() ? sc.out_prefix : opts.out;
            const ScenarioResult result = run_scenario(sc, ro);
            for (const std::string& f : write_plot_files(result.trajectory, ro.out_prefix))
                std::cout << "wrote " << f << "\n";
            return 0;
        }
        if (cmd_list->parsed()) {
            for (const auto& [name, text] : bundled_scenarios()) {
                const Scenario sc = scenario_from_json_text(text);
                std::cout << name << "  (n=" << sc.sim.n << ", k=" << sc.sim.params.k
                          << ", t_end=" << sc.sim.t_end << ")\n";
            }
            return 0;
        }
        if (cmd_export->parsed()) {
            for (const auto& [name, text] : bundled_scenarios()) {
                const std::string path = export_dir + "/" + name + ".json";
                std::ofstream out(path);
                if (!out) throw config_error("cannot write '" + path + "'");
                out << text << "\n";
                std::cout << "wrote " << path << "\n";
            }
            return 0;
        }
    } catch (const config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const simulation_error& e) {
        std::cerr << "simulation aborted at t=" << e.t << ": " << e.what() << "\n";
        return 3;
    } catch (const error& e) {
        std::cerr << "analysis error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
