#include "pursuit/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <nlohmann/json.hpp>
#include <ostream>
#include <random>
#include <sstream>

#include "pursuit/io.hpp"
#include "pursuit/linearize.hpp"
#include "pursuit/parallel.hpp"

namespace pursuit {

using nlohmann::json;

AnalysisKind parse_analysis(const std::string& name) {
    if (name == "converge-check") return AnalysisKind::converge_check;
    if (name == "spectrum") return AnalysisKind::spectrum;
    if (name == "charpoly") return AnalysisKind::charpoly;
    if (name == "stability-report") return AnalysisKind::stability_report;
    throw config_error("scenario: unknown analysis '" + name + "'");
}

std::string analysis_name(AnalysisKind kind) {
    switch (kind) {
        case AnalysisKind::converge_check: return "converge-check";
        case AnalysisKind::spectrum: return "spectrum";
        case AnalysisKind::charpoly: return "charpoly";
        default: return "stability-report";
    }
}

void Scenario::validate() const {
    if (name.empty()) throw config_error("scenario: name must not be empty");
    sim.validate();
    if (!(conv_tol > 0.0)) throw config_error("scenario: convergence tol must be positive");
    if (conv_window < 1) throw config_error("scenario: convergence window must be >= 1");
}

Scenario scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("scenario: invalid JSON: ") + e.what());
    }
    Scenario s;
    try {
        s.name = j.at("name").get<std::string>();
        s.sim = j.at("sim").get<SimConfig>();
        if (j.contains("analyses"))
            for (const json& a : j.at("analyses"))
                s.analyses.push_back(parse_analysis(a.get<std::string>()));
        s.out_prefix = j.value("out_prefix", s.name);
        if (j.contains("convergence")) {
            s.conv_tol = j.at("convergence").value("tol", 1e-3);
            s.conv_window = j.at("convergence").value("window", 50);
        }
    } catch (const json::exception& e) {
        throw config_error(std::string("scenario: ") + e.what());
    }
    s.validate();
    return s;
}

std::string scenario_to_json_text(const Scenario& s) {
    json j;
    j["name"] = s.name;
    j["sim"] = s.sim;
    json analyses = json::array();
    for (AnalysisKind a : s.analyses) analyses.push_back(analysis_name(a));
    j["analyses"] = analyses;
    j["out_prefix"] = s.out_prefix;
    j["convergence"] = {{"tol", s.conv_tol}, {"window", s.conv_window}};
    return j.dump(2);
}

const std::map<std::string, std::string>& bundled_scenarios() {
    static const std::map<std::string, std::string> registry = {
        {"fig_5vehicles", R"({
  "name": "fig_5vehicles",
  "sim": {
    "n": 5, "v": 1.0, "k": -5.0,
    "dt": 0.001, "t_end": 200.0, "record_stride": 100,
    "init": {"type": "random", "box": 20.0, "seed": 1}
  },
  "analyses": ["converge-check", "spectrum", "stability-report"],
  "out_prefix": "fig_5vehicles"
})"},
        {"fig_5vehicles_cw", R"({
  "name": "fig_5vehicles_cw",
  "sim": {
    "n": 5, "v": 1.0, "k": 5.0,
    "dt": 0.001, "t_end": 200.0, "record_stride": 100,
    "init": {"type": "random", "box": 20.0, "seed": 1}
  },
  "analyses": ["converge-check", "stability-report"],
  "out_prefix": "fig_5vehicles_cw"
})"},
        {"fig_2vehicles_switch", R"({
  "name": "fig_2vehicles_switch",
  "sim": {
    "n": 2, "v": 1.0, "k": 2.0,
    "dt": 0.001, "t_end": 400.0, "record_stride": 100,
    "init": {"type": "random", "box": 10.0, "seed": 7},
    "k_schedule": [{"t": 150.0, "k": -2.0}]
  },
  "analyses": ["converge-check", "stability-report"],
  "out_prefix": "fig_2vehicles_switch"
})"},
        {"fig_3vehicles", R"({
  "name": "fig_3vehicles",
  "sim": {
    "n": 3, "v": 1.0, "k": -2.0,
    "dt": 0.001, "t_end": 200.0, "record_stride": 100,
    "init": {"type": "random", "box": 20.0, "seed": 3}
  },
  "analyses": ["converge-check", "charpoly", "stability-report"],
  "out_prefix": "fig_3vehicles"
})"},
        {"fig_3vehicles_irregular", R"({
  "name": "fig_3vehicles_irregular",
  "sim": {
    "n": 3, "v": 1.0, "k": -2.0,
    "dt": 0.001, "t_end": 600.0, "record_stride": 100,
    "init": {"type": "absolute", "states": [
      {"x": 0.0, "y": 10.0, "theta": 3.141592653589793},
      {"x": 8.660254037844386, "y": -5.0, "theta": 1.0471975511965976},
      {"x": -8.660254037844386, "y": -4.8, "theta": -1.0471975511965976}
    ]}
  },
  "analyses": ["converge-check", "charpoly", "stability-report"],
  "out_prefix": "fig_3vehicles_irregular"
})"}};
    return registry;
}

Scenario load_scenario(const std::string& path_or_name) {
    const auto& bundled = bundled_scenarios();
    if (auto it = bundled.find(path_or_name); it != bundled.end())
        return scenario_from_json_text(it->second);
    std::ifstream in(path_or_name);
    if (!in) throw config_error("scenario: cannot open '" + path_or_name + "'");
    std::ostringstream buf;
    buf << in.rdbuf();

    // a bare sim config (no "sim" wrapper) is accepted too; the file name
    // doubles as the scenario name
    json probe;
    try {
        probe = json::parse(buf.str());
    } catch (const json::exception& e) {
        throw config_error(std::string("scenario: invalid JSON: ") + e.what());
    }
    if (!probe.contains("sim") && probe.contains("init")) {
        Scenario s;
        std::string stem = path_or_name;
        if (const auto slash = stem.find_last_of('/'); slash != std::string::npos)
            stem = stem.substr(slash + 1);
        if (const auto dot = stem.rfind(".json"); dot != std::string::npos)
            stem = stem.substr(0, dot);
        s.name = stem.empty() ? "sim" : stem;
        s.out_prefix = s.name;
        try {
            s.sim = probe.get<SimConfig>();
        } catch (const json::exception& e) {
            throw config_error(std::string("sim config: ") + e.what());
        }
        s.validate();
        return s;
    }
    return scenario_from_json_text(buf.str());
}

std::pair<FleetRelativeState, FormationDescriptor>
canonical_equilibrium(const FormationDescriptor& detected, double v) {
    const int p_signed = detected.rotation * detected.arrangement_p;
    double sum = 0.0;
    for (double b : detected.bearings) sum += b;
    if (sum == 0.0) throw analysis_error("canonical_equilibrium: degenerate bearing sum");
    const double scale = p_signed * pi / sum;
    std::vector<double> bearings = detected.bearings;
    for (double& b : bearings) b *= scale;
    const double r_signed = 1.0 / (2.0 * detected.ratio_s);
    return construct_circular_formation(bearings, r_signed, v);
}

namespace {

void write_text_file(const std::string& path, const std::string& content,
                     std::vector<std::string>& files) {
    std::ofstream out(path);
    if (!out) throw analysis_error("cannot write '" + path + "'");
    out << content;
    files.push_back(path);
}

double final_gain(const SimConfig& cfg) {
    double k = cfg.params.k;
    for (const GainSwitch& gs : cfg.k_schedule)
        if (gs.t <= cfg.t_end) k = gs.k;
    return k;
}

}  // namespace

ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options) {
    Scenario sc = scenario;
    sc.validate();
    if (!options.out_prefix.empty()) sc.out_prefix = options.out_prefix;
    if (options.seed) {
        if (auto* r = std::get_if<RandomInit>(&sc.sim.init)) r->seed = *options.seed;
        else throw config_error("run_scenario: --seed override requires a random init");
    }

    ScenarioResult result;
    result.trajectory = simulate(sc.sim);

    if (options.format == OutputFormat::csv) {
        std::ostringstream csv;
        write_trajectory_csv(csv, result.trajectory);
        write_text_file(sc.out_prefix + "_trajectory.csv", csv.str(), result.files_written);
    } else {
        write_text_file(sc.out_prefix + "_trajectory.json",
                        json(result.trajectory).dump(2), result.files_written);
    }

    const bool needs_equilibrium =
        std::any_of(sc.analyses.begin(), sc.analyses.end(), [](AnalysisKind a) {
            return a != AnalysisKind::converge_check;
        });
    const bool wants_convergence =
        needs_equilibrium ||
        std::find(sc.analyses.begin(), sc.analyses.end(), AnalysisKind::converge_check) !=
            sc.analyses.end();

    if (wants_convergence) {
        result.convergence = detect_convergence(result.trajectory, sc.conv_tol, sc.conv_window,
                                                sc.sim.params.v);
        write_text_file(sc.out_prefix + "_convergence.json",
                        json(*result.convergence).dump(2), result.files_written);
    }

    if (!needs_equilibrium) return result;
    if (!result.convergence->converged)
        throw analysis_error("run_scenario: no circular formation detected; equilibrium "
                             "analyses are unavailable");

    const ControlParams params{sc.sim.params.v, final_gain(sc.sim)};
    auto [xi_bar, desc] = canonical_equilibrium(*result.convergence->formation, params.v);

    for (AnalysisKind a : sc.analyses) {
        switch (a) {
            case AnalysisKind::converge_check:
                break;
            case AnalysisKind::spectrum: {
                const LinearizedSystem lin = linearize(xi_bar, params);
                const ReducedSystem red = reduce(xi_bar, params);
                json out;
                out["sbar"] = red.sbar;
                out["A_hat"] = matrix_to_json(lin.assembled);
                out["A_R"] = matrix_to_json(red.assembled);
                json ev1 = json::array(), ev2 = json::array();
                for (const Complex& l : eigvals(lin.assembled)) ev1.push_back({l.real(), l.imag()});
                for (const Complex& l : eigvals(red.assembled)) ev2.push_back({l.real(), l.imag()});
                out["eig_A_hat"] = ev1;
                out["eig_A_R"] = ev2;
                write_text_file(sc.out_prefix + "_spectrum.json", out.dump(2),
                                result.files_written);
                std::ostringstream m1, m2;
                write_matrix_text(m1, lin.assembled);
                write_matrix_text(m2, red.assembled);
                write_text_file(sc.out_prefix + "_A_hat.txt", m1.str(), result.files_written);
                write_text_file(sc.out_prefix + "_A_R.txt", m2.str(), result.files_written);
                break;
            }
            case AnalysisKind::charpoly: {
                const CharPoly cp = implicit_charpoly(desc.bearings, desc.rotation);
                write_text_file(sc.out_prefix + "_charpoly.json", json(cp).dump(2),
                                result.files_written);
                break;
            }
            case AnalysisKind::stability_report: {
                result.stability = stability_report(xi_bar, params, options.cross_check);
                write_text_file(sc.out_prefix + "_stability.json",
                                json(*result.stability).dump(2), result.files_written);
                break;
            }
        }
    }
    return result;
}

void SweepSpec::validate() const {
    base.validate();
    if (values.empty()) throw config_error("sweep: empty value list");
    if (param == SweepParam::bearing_perturbation &&
        !std::holds_alternative<FleetRelativeState>(base.sim.init))
        throw config_error("sweep: bearing_perturbation requires a relative init");
    if ((param == SweepParam::n || param == SweepParam::seed) &&
        !std::holds_alternative<RandomInit>(base.sim.init))
        throw config_error("sweep: n/seed sweeps require a random init");
    if (param == SweepParam::n)
        for (double v : values)
            if (v < 2.0 || v != std::floor(v)) throw config_error("sweep: n values must be integers >= 2");
}

SweepSpec sweep_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw config_error(std::string("sweep: invalid JSON: ") + e.what());
    }
    SweepSpec spec;
    try {
        spec.base = scenario_from_json_text(j.at("base").dump());
        const std::string p = j.at("param").get<std::string>();
        if (p == "k") spec.param = SweepParam::k;
        else if (p == "n") spec.param = SweepParam::n;
        else if (p == "seed") spec.param = SweepParam::seed;
        else if (p == "bearing_perturbation") spec.param = SweepParam::bearing_perturbation;
        else throw config_error("sweep: unknown param '" + p + "'");
        spec.values = j.at("values").get<std::vector<double>>();
        if (j.contains("seeds")) spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    } catch (const json::exception& e) {
        throw config_error(std::string("sweep: ") + e.what());
    }
    if (spec.seeds.empty()) spec.seeds = {0};
    spec.validate();
    return spec;
}

namespace {

struct RunOutcome {
    bool ok = false;
    bool converged = false;
    double settle = 0.0;
    double max_re = std::numeric_limits<double>::quiet_NaN();
    int p_signed = 0;
    std::string error;
};

SimConfig configure_run(const SweepSpec& spec, double value, std::uint64_t seed) {
    SimConfig cfg = spec.base.sim;
    switch (spec.param) {
        case SweepParam::k:
            cfg.params.k = value;
            cfg.k_schedule.clear();
            break;
        case SweepParam::n:
            cfg.n = static_cast<int>(value);
            break;
        case SweepParam::seed:
            seed = static_cast<std::uint64_t>(value);
            break;
        case SweepParam::bearing_perturbation: {
            auto xi = std::get<FleetRelativeState>(cfg.init);
            std::mt19937_64 rng(seed);
            for (RelativeState& l : xi.links)
                l.alpha = wrap_angle(l.alpha + (2.0 * uniform01(rng()) - 1.0) * value);
            cfg.init = std::move(xi);
            break;
        }
    }
    if (auto* r = std::get_if<RandomInit>(&cfg.init)) r->seed = seed;
    return cfg;
}

RunOutcome execute_run(const SweepSpec& spec, double value, std::uint64_t seed) {
    RunOutcome out;
    try {
        const SimConfig cfg = configure_run(spec, value, seed);
        cfg.validate();
        const Trajectory traj = simulate(cfg);
        const ConvergenceReport report =
            detect_convergence(traj, spec.base.conv_tol, spec.base.conv_window, cfg.params.v);
        out.ok = true;
        out.converged = report.converged;
        if (report.converged) {
            out.settle = report.settle_time;
            out.p_signed = report.formation->rotation * report.formation->arrangement_p;
            try {
                auto [xi_bar, desc] = canonical_equilibrium(*report.formation, cfg.params.v);
                const ControlParams params{cfg.params.v, final_gain(cfg)};
                out.max_re = stability_report(xi_bar, params).max_re_nondiscarded;
            } catch (const error& e) {
                out.error = e.what();  // analysis failed; run still counts as converged
            }
        }
    } catch (const error& e) {
        out.error = e.what();
    }
    return out;
}

}  // namespace

std::vector<SweepRow> run_sweep(const SweepSpec& spec, bool parallel) {
    spec.validate();
    const std::vector<std::uint64_t> seeds =
        spec.param == SweepParam::seed ? std::vector<std::uint64_t>{0} : spec.seeds;
    const std::size_t per_value = seeds.size();
    const std::size_t total = spec.values.size() * per_value;

    std::vector<RunOutcome> outcomes(total);
    parallel_for(total, parallel, [&](std::size_t idx) {
        const std::size_t vi = idx / per_value;
        const std::size_t si = idx % per_value;
        const double value = spec.values[vi];
        const std::uint64_t seed =
            spec.param == SweepParam::seed ? static_cast<std::uint64_t>(value) : seeds[si];
        outcomes[idx] = execute_run(spec, value, seed);
    });

    std::vector<SweepRow> rows(spec.values.size());
    for (std::size_t vi = 0; vi < spec.values.size(); ++vi) {
        SweepRow& row = rows[vi];
        row.value = spec.values[vi];
        row.runs = static_cast<int>(per_value);
        double settle_sum = 0.0;
        double max_re = -std::numeric_limits<double>::infinity();
        std::map<int, int> p_counts;
        for (std::size_t si = 0; si < per_value; ++si) {
            const RunOutcome& out = outcomes[vi * per_value + si];
            if (!out.ok) {
                ++row.failed;
                if (row.note.empty()) row.note = out.error;
                continue;
            }
            if (out.converged) {
                ++row.converged;
                settle_sum += out.settle;
                ++p_counts[out.p_signed];
                if (std::isfinite(out.max_re)) max_re = std::max(max_re, out.max_re);
                if (!out.error.empty() && row.note.empty()) row.note = out.error;
            }
        }
        row.rate = static_cast<double>(row.converged) / row.runs;
        row.mean_settle = row.converged ? settle_sum / row.converged : 0.0;
        row.max_re = std::isfinite(max_re) ? max_re : std::numeric_limits<double>::quiet_NaN();
        int best_count = 0;
        for (const auto& [p, count] : p_counts)
            if (count > best_count || (count == best_count && std::abs(p) < std::abs(row.p_mode))) {
                best_count = count;
                row.p_mode = p;
            }
    }
    return rows;
}

void write_sweep_csv(std::ostream& os, SweepParam param, const std::vector<SweepRow>& rows) {
    const char* name = param == SweepParam::k ? "k"
                       : param == SweepParam::n ? "n"
                       : param == SweepParam::seed ? "seed"
                                                   : "bearing_perturbation";
    os << name << ",runs,converged,failed,rate,mean_settle,max_re,p_mode,note\n";
    for (const SweepRow& r : rows) {
        os << format_double(r.value) << ',' << r.runs << ',' << r.converged << ',' << r.failed
           << ',' << format_double(r.rate) << ',' << format_double(r.mean_settle) << ','
           << format_double(r.max_re) << ',' << r.p_mode << ',' << r.note << '\n';
    }
}

std::vector<std::string> write_plot_files(const Trajectory& traj, const std::string& prefix) {
    std::vector<std::string> files;
    const int n = traj.relative.empty() ? 0 : traj.relative.front().size();
    if (traj.absolute) {
        for (int i = 0; i < n; ++i) {
            std::ofstream out(prefix + "_vehicle" + std::to_string(i + 1) + ".dat");
            if (!out) throw analysis_error("cannot write plot file");
            for (const auto& snapshot : *traj.absolute)
                out << format_double(snapshot[i].x) << ' ' << format_double(snapshot[i].y)
                    << '\n';
            files.push_back(prefix + "_vehicle" + std::to_string(i + 1) + ".dat");
        }
    }
    std::ofstream out(prefix + "_rho.dat");
    if (!out) throw analysis_error("cannot write plot file");
    for (int s = 0; s < traj.snapshots(); ++s) {
        out << format_double(traj.times[s]);
        for (const RelativeState& l : traj.relative[s].links) out << ' ' << format_double(l.rho);
        out << '\n';
    }
    files.push_back(prefix + "_rho.dat");
    return files;
}

}  // namespace pursuit
