#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pursuit/sim.hpp"
#include "pursuit/spectral.hpp"

namespace pursuit {

enum class AnalysisKind { converge_check, spectrum, charpoly, stability_report };

AnalysisKind parse_analysis(const std::string& name);
std::string analysis_name(AnalysisKind kind);

/// A named simulation run plus the analyses to perform on its outcome.
struct Scenario {
    std::string name;
    SimConfig sim;
    std::vector<AnalysisKind> analyses;
    std::string out_prefix;
    double conv_tol = 1e-3;
    int conv_window = 50;

    void validate() const;
};

Scenario scenario_from_json_text(const std::string& text);
std::string scenario_to_json_text(const Scenario& s);

/// Bundled figure scenarios, by name.
const std::map<std::string, std::string>& bundled_scenarios();

/// Load a scenario from a file path or a bundled name.
Scenario load_scenario(const std::string& path_or_name);

struct ScenarioResult {
    Trajectory trajectory;
    std::optional<ConvergenceReport> convergence;
    std::optional<StabilityVerdict> stability;
    std::vector<std::string> files_written;
};

enum class OutputFormat { csv, json };

struct RunOptions {
    std::string out_prefix;               // overrides the scenario's prefix when nonempty
    OutputFormat format = OutputFormat::csv;
    std::optional<std::uint64_t> seed;    // overrides a random init's seed
    bool cross_check = false;             // stability: verify full vs reduced spectra
};

/// Simulate, detect convergence, run the requested analyses, and write the
/// output files. Spectrum/charpoly/stability analyses operate on the
/// canonical equilibrium rebuilt from the detected formation.
ScenarioResult run_scenario(const Scenario& scenario, const RunOptions& options = {});

/// Rebuild the exact equilibrium nearest a detected formation: bearings are
/// rescaled to an exact multiple of pi and fed to the canonical factory.
std::pair<FleetRelativeState, FormationDescriptor>
canonical_equilibrium(const FormationDescriptor& detected, double v);

enum class SweepParam { k, n, seed, bearing_perturbation };

struct SweepSpec {
    Scenario base;
    SweepParam param = SweepParam::k;
    std::vector<double> values;
    std::vector<std::uint64_t> seeds;  // aggregation seeds; ignored when param == seed

    void validate() const;
};

SweepSpec sweep_from_json_text(const std::string& text);

struct SweepRow {
    double value = 0.0;
    int runs = 0;
    int converged = 0;
    int failed = 0;
    double rate = 0.0;
    double mean_settle = 0.0;   // over converged runs
    double max_re = 0.0;        // max over converged runs of max Re(lambda) at equilibrium
    int p_mode = 0;             // modal signed arrangement index (rotation * p)
    std::string note;           // first failure message, if any
};

/// One row per swept value, aggregated over the seed list. Per-run failures
/// are recorded in the row and do not stop the sweep. parallel selects the
/// OpenMP worker pool; results are identical either way.
std::vector<SweepRow> run_sweep(const SweepSpec& spec, bool parallel = true);

void write_sweep_csv(std::ostream& os, SweepParam param, const std::vector<SweepRow>& rows);

/// Two-column gnuplot-friendly trajectory files: one <prefix>_vehicle<i>.dat
/// per vehicle with x y pairs (absolute runs), plus <prefix>_rho.dat with
/// t rho_1 ... rho_n.
std::vector<std::string> write_plot_files(const Trajectory& traj, const std::string& prefix);

}  // namespace pursuit
