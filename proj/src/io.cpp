#include "pursuit/io.hpp"

#include <cstdio>
#include <nlohmann/json.hpp>
#include <ostream>

namespace pursuit {

using nlohmann::json;

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void to_json(json& j, const AgentState& q) { j = {{"x", q.x}, {"y", q.y}, {"theta", q.theta}}; }

void from_json(const json& j, AgentState& q) {
    j.at("x").get_to(q.x);
    j.at("y").get_to(q.y);
    j.at("theta").get_to(q.theta);
}

void to_json(json& j, const RelativeState& l) {
    j = {{"rho", l.rho}, {"alpha", l.alpha}, {"beta", l.beta}};
}

void from_json(const json& j, RelativeState& l) {
    j.at("rho").get_to(l.rho);
    j.at("alpha").get_to(l.alpha);
    j.at("beta").get_to(l.beta);
}

void to_json(json& j, const FleetRelativeState& xi) { j = {{"links", xi.links}}; }

void from_json(const json& j, FleetRelativeState& xi) { j.at("links").get_to(xi.links); }

void to_json(json& j, const ConstraintResidual& r) {
    j = {{"g1", r.g1}, {"g2", r.g2}, {"g3", r.g3}, {"gammas", r.gammas}};
}

void to_json(json& j, const FormationDescriptor& d) {
    j = {{"radius", d.radius},
         {"rotation", d.rotation},
         {"ratio_s", d.ratio_s},
         {"arrangement_p", d.arrangement_p},
         {"bearings", d.bearings},
         {"angular_speed", d.angular_speed}};
}

void from_json(const json& j, FormationDescriptor& d) {
    j.at("radius").get_to(d.radius);
    j.at("rotation").get_to(d.rotation);
    j.at("ratio_s").get_to(d.ratio_s);
    j.at("arrangement_p").get_to(d.arrangement_p);
    j.at("bearings").get_to(d.bearings);
    j.at("angular_speed").get_to(d.angular_speed);
}

void to_json(json& j, const SimConfig& c) {
    j = {{"n", c.n},
         {"v", c.params.v},
         {"k", c.params.k},
         {"law", c.law == ControlLaw::main ? "main" : "variant"},
         {"dt", c.dt},
         {"t_end", c.t_end},
         {"record_stride", c.record_stride},
         {"rho_min", c.rho_min}};
    if (const auto* fleet = std::get_if<std::vector<AgentState>>(&c.init)) {
        j["init"] = {{"type", "absolute"}, {"states", *fleet}};
    } else if (const auto* xi = std::get_if<FleetRelativeState>(&c.init)) {
        j["init"] = {{"type", "relative"}, {"links", xi->links}};
    } else {
        const auto& r = std::get<RandomInit>(c.init);
        j["init"] = {{"type", "random"}, {"box", r.box}, {"seed", r.seed}};
    }
    if (!c.k_schedule.empty()) {
        json sched = json::array();
        for (const GainSwitch& gs : c.k_schedule) sched.push_back({{"t", gs.t}, {"k", gs.k}});
        j["k_schedule"] = sched;
    }
}

void from_json(const json& j, SimConfig& c) {
    try {
        c.n = j.at("n").get<int>();
        c.params.v = j.at("v").get<double>();
        c.params.k = j.at("k").get<double>();
        const std::string law = j.value("law", "main");
        if (law == "main") c.law = ControlLaw::main;
        else if (law == "variant") c.law = ControlLaw::variant;
        else throw config_error("sim config: unknown law '" + law + "'");
        c.dt = j.value("dt", 1e-3);
        c.t_end = j.at("t_end").get<double>();
        c.record_stride = j.value("record_stride", 100);

        const json& init = j.at("init");
        const std::string type = init.at("type").get<std::string>();
        double box = 20.0;
        if (type == "absolute") {
            c.init = init.at("states").get<std::vector<AgentState>>();
        } else if (type == "relative") {
            FleetRelativeState xi;
            xi.links = init.at("links").get<std::vector<RelativeState>>();
            c.init = std::move(xi);
        } else if (type == "random") {
            RandomInit r;
            r.box = init.value("box", 20.0);
            if (!init.contains("seed"))
                throw config_error("sim config: random init requires a seed");
            r.seed = init.at("seed").get<std::uint64_t>();
            box = r.box;
            c.init = r;
        } else {
            throw config_error("sim config: unknown init type '" + type + "'");
        }
        c.rho_min = j.value("rho_min", 1e-6 * box);

        c.k_schedule.clear();
        if (j.contains("k_schedule"))
            for (const json& e : j.at("k_schedule"))
                c.k_schedule.push_back({e.at("t").get<double>(), e.at("k").get<double>()});
    } catch (const json::exception& e) {
        throw config_error(std::string("sim config: ") + e.what());
    }
    c.validate();
}

void to_json(json& j, const Trajectory& t) {
    j = {{"times", t.times},
         {"relative", t.relative},
         {"controls", t.controls},
         {"residuals", t.residuals}};
    if (t.absolute) j["absolute"] = *t.absolute;
}

void to_json(json& j, const ConvergenceReport& r) {
    j = {{"converged", r.converged},
         {"settle_time", r.settle_time},
         {"final_residuals",
          {{"bearing_condition", r.final_residuals.bearing_condition},
           {"beta_sum", r.final_residuals.beta_sum},
           {"ratio_spread", r.final_residuals.ratio_spread}}}};
    if (r.formation) j["formation"] = *r.formation;
    else j["formation"] = nullptr;
}

void to_json(json& j, const CharPoly& p) {
    j = {{"coeffs", p.coeffs},
         {"reduced_coeffs", p.reduced_coeffs},
         {"z_values", p.z_values}};
}

namespace {

const char* verdict_name(RouthVerdict v) {
    switch (v) {
        case RouthVerdict::hurwitz: return "hurwitz";
        case RouthVerdict::not_hurwitz: return "not-hurwitz";
        default: return "marginal";
    }
}

const char* class_name(StabilityClass c) {
    switch (c) {
        case StabilityClass::asymptotically_stable: return "asymptotically-stable";
        case StabilityClass::unstable: return "unstable";
        default: return "inconclusive";
    }
}

const char* method_name(StabilityMethod m) {
    switch (m) {
        case StabilityMethod::trace_n2: return "trace-n2";
        case StabilityMethod::routh_n3: return "routh-n3";
        case StabilityMethod::circulant_roots: return "circulant-roots";
        default: return "generic-eigen";
    }
}

}  // namespace

void to_json(json& j, const RouthTable& t) {
    j = {{"rows", t.rows},
         {"verdict", verdict_name(t.verdict)},
         {"sign_changes", t.sign_changes},
         {"zero_pivot", t.zero_pivot}};
}

void to_json(json& j, const StabilityVerdict& v) {
    json evs = json::array();
    for (const Complex& l : v.eigenvalues) evs.push_back({l.real(), l.imag()});
    j = {{"classification", class_name(v.classification)},
         {"method", method_name(v.method)},
         {"eigenvalues", evs},
         {"discarded_modes", v.discarded_modes},
         {"max_re_nondiscarded", v.max_re_nondiscarded}};
    if (v.routh) j["routh"] = *v.routh;
}

json matrix_to_json(const Eigen::MatrixXd& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_matrix_text(std::ostream& os, const Eigen::MatrixXd& M) {
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) os << ' ';
            os << format_double(M(i, j));
        }
        os << '\n';
    }
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    const int n = traj.relative.empty() ? 0 : traj.relative.front().size();
    os << 't';
    if (traj.absolute)
        for (int i = 1; i <= n; ++i)
            os << ",x_" << i << ",y_" << i << ",theta_" << i;
    for (int i = 1; i <= n; ++i) os << ",rho_" << i << ",alpha_" << i << ",beta_" << i;
    for (int i = 1; i <= n; ++i) os << ",omega_" << i;
    os << ",g1,g2,g3\n";

    for (int s = 0; s < traj.snapshots(); ++s) {
        os << format_double(traj.times[s]);
        if (traj.absolute)
            for (const AgentState& q : (*traj.absolute)[s])
                os << ',' << format_double(q.x) << ',' << format_double(q.y) << ','
                   << format_double(q.theta);
        for (const RelativeState& l : traj.relative[s].links)
            os << ',' << format_double(l.rho) << ',' << format_double(l.alpha) << ','
               << format_double(l.beta);
        for (double w : traj.controls[s]) os << ',' << format_double(w);
        const ConstraintResidual& r = traj.residuals[s];
        os << ',' << format_double(r.g1) << ',' << format_double(r.g2) << ','
           << format_double(r.g3) << '\n';
    }
}

void print_routh_table(std::ostream& os, const RouthTable& table) {
    const int deg = static_cast<int>(table.rows.size()) - 1;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        char label[16];
        std::snprintf(label, sizeof(label), "s^%-3d", deg - static_cast<int>(r));
        os << label << " |";
        for (double x : table.rows[r]) {
            char cell[32];
            std::snprintf(cell, sizeof(cell), " %12.6g", x);
            os << cell;
        }
        os << '\n';
    }
    os << "verdict: " << verdict_name(table.verdict)
       << " (sign changes: " << table.sign_changes
       << (table.zero_pivot ? ", zero pivot encountered" : "") << ")\n";
}

}  // namespace pursuit
