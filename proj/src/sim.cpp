#include "pursuit/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace pursuit {

void SimConfig::validate() const {
    if (n < 2) throw config_error("sim config: n must be >= 2");
    if (!params.is_valid()) throw config_error("sim config: invalid control params (v > 0)");
    if (!(dt > 0.0)) throw config_error("sim config: dt must be positive");
    if (!(t_end >= dt)) throw config_error("sim config: t_end must be >= dt");
    if (record_stride < 1) throw config_error("sim config: record_stride must be >= 1");
    if (law == ControlLaw::variant && n != 2)
        throw config_error("sim config: variant law is defined for n = 2 only");
    if (!(rho_min > 0.0)) throw config_error("sim config: rho_min must be positive");
    double prev = 0.0;
    for (const GainSwitch& gs : k_schedule) {
        if (gs.t < prev || gs.t > t_end)
            throw config_error("sim config: k_schedule times must be nondecreasing and in [0, t_end]");
        prev = gs.t;
    }
    if (const auto* fleet = std::get_if<std::vector<AgentState>>(&init)) {
        if (static_cast<int>(fleet->size()) != n)
            throw config_error("sim config: absolute init size does not match n");
        for (const AgentState& q : *fleet)
            if (!q.is_valid()) throw config_error("sim config: non-finite absolute init");
    } else if (const auto* xi = std::get_if<FleetRelativeState>(&init)) {
        if (xi->size() != n) throw config_error("sim config: relative init size does not match n");
        if (!xi->is_valid()) throw config_error("sim config: invalid relative init");
    }
}

std::array<double, 3> absolute_rhs(const AgentState& q, double omega, double v) {
    return {v * std::cos(q.theta), v * std::sin(q.theta), omega};
}

void step_rk4(std::vector<double>& y, double t, double dt,
              const std::function<void(double, std::span<const double>, std::span<double>)>& rhs) {
    const std::size_t d = y.size();
    std::vector<double> k1(d), k2(d), k3(d), k4(d), tmp(d);

    rhs(t, y, k1);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < d; ++i) tmp[i] = y[i] + dt * k3[i];
    rhs(t + dt, tmp, k4);
    for (std::size_t i = 0; i < d; ++i) {
        y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        if (!std::isfinite(y[i]))
            throw simulation_error("rk4: state went non-finite", t + dt);
    }
}

std::vector<AgentState> random_fleet(int n, const RandomInit& spec) {
    std::mt19937_64 rng(spec.seed);
    std::vector<AgentState> fleet(n);
    for (AgentState& q : fleet) {
        q.x = (uniform01(rng()) - 0.5) * spec.box;
        q.y = (uniform01(rng()) - 0.5) * spec.box;
        q.theta = uniform01(rng()) * two_pi - pi;
    }
    return fleet;
}

namespace {

/// RK4 stage buffers reused across steps; step_rk4 above allocates per call
/// and stays the simple reference entry point.
class Rk4Workspace {
public:
    explicit Rk4Workspace(std::size_t d) : k1_(d), k2_(d), k3_(d), k4_(d), tmp_(d) {}

    template <class Rhs>
    void step(std::vector<double>& y, double t, double dt, Rhs&& rhs) {
        const std::size_t d = y.size();
        rhs(t, y, k1_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * dt * k1_[i];
        rhs(t + 0.5 * dt, tmp_, k2_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + 0.5 * dt * k2_[i];
        rhs(t + 0.5 * dt, tmp_, k3_);
        for (std::size_t i = 0; i < d; ++i) tmp_[i] = y[i] + dt * k3_[i];
        rhs(t + dt, tmp_, k4_);
        for (std::size_t i = 0; i < d; ++i) {
            y[i] += dt / 6.0 * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
            if (!std::isfinite(y[i]))
                throw simulation_error("simulate: state went non-finite", t + dt);
        }
    }

private:
    std::vector<double> k1_, k2_, k3_, k4_, tmp_;
};

double gain_at(const SimConfig& config, double t) {
    double k = config.params.k;
    for (const GainSwitch& gs : config.k_schedule) {
        if (gs.t <= t) k = gs.k;
        else break;
    }
    return k;
}

void record_absolute(const SimConfig& config, double t, std::span<const double> y,
                     Trajectory& traj) {
    const int n = config.n;
    std::vector<AgentState> fleet(n);
    for (int i = 0; i < n; ++i) fleet[i] = {y[3 * i], y[3 * i + 1], y[3 * i + 2]};
    FleetRelativeState xi = to_relative(fleet);
    ControlParams p{config.params.v, gain_at(config, t)};
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = omega(config.law, xi.links[i], p);
    traj.times.push_back(t);
    traj.absolute->push_back(std::move(fleet));
    traj.residuals.push_back(constraint_residuals(xi));
    traj.relative.push_back(std::move(xi));
    traj.controls.push_back(std::move(w));
}

void record_relative(const SimConfig& config, double t, std::span<const double> y,
                     Trajectory& traj) {
    const int n = config.n;
    FleetRelativeState xi;
    xi.links.resize(n);
    for (int i = 0; i < n; ++i)
        xi.links[i] = {y[3 * i], wrap_angle(y[3 * i + 1]), wrap_angle(y[3 * i + 2])};
    ControlParams p{config.params.v, gain_at(config, t)};
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = omega(config.law, xi.links[i], p);
    traj.times.push_back(t);
    traj.residuals.push_back(constraint_residuals(xi));
    traj.relative.push_back(std::move(xi));
    traj.controls.push_back(std::move(w));
}

}  // namespace

Trajectory simulate(const SimConfig& config) {
    config.validate();
    const int n = config.n;
    const bool relative_mode = std::holds_alternative<FleetRelativeState>(config.init);
    const long steps = std::lround(config.t_end / config.dt);

    std::vector<double> y(3 * n);
    Trajectory traj;
    if (relative_mode) {
        const auto& xi = std::get<FleetRelativeState>(config.init);
        for (int i = 0; i < n; ++i) {
            y[3 * i] = xi.links[i].rho;
            y[3 * i + 1] = xi.links[i].alpha;
            y[3 * i + 2] = xi.links[i].beta;
        }
    } else {
        std::vector<AgentState> fleet;
        if (const auto* explicit_fleet = std::get_if<std::vector<AgentState>>(&config.init))
            fleet = *explicit_fleet;
        else
            fleet = random_fleet(n, std::get<RandomInit>(config.init));
        for (int i = 0; i < n; ++i) {
            y[3 * i] = fleet[i].x;
            y[3 * i + 1] = fleet[i].y;
            y[3 * i + 2] = fleet[i].theta;
        }
        traj.absolute.emplace();
    }

    // scratch shared by the absolute-mode rhs
    std::vector<AgentState> fleet_scratch(n);
    std::vector<double> omega_scratch(n);

    auto absolute_mode_rhs = [&](double t, std::span<const double> state,
                                 std::span<double> dydt) {
        const ControlParams p{config.params.v, gain_at(config, t)};
        for (int i = 0; i < n; ++i)
            fleet_scratch[i] = {state[3 * i], state[3 * i + 1], state[3 * i + 2]};
        const FleetRelativeState xi = to_relative(fleet_scratch);
        for (int i = 0; i < n; ++i) omega_scratch[i] = omega(config.law, xi.links[i], p);
        for (int i = 0; i < n; ++i) {
            dydt[3 * i] = p.v * std::cos(state[3 * i + 2]);
            dydt[3 * i + 1] = p.v * std::sin(state[3 * i + 2]);
            dydt[3 * i + 2] = omega_scratch[i];
        }
    };

    auto relative_mode_rhs = [&](double t, std::span<const double> state,
                                 std::span<double> dydt) {
        const ControlParams p{config.params.v, gain_at(config, t)};
        closed_loop_rhs_flat(state, p, config.law, dydt);
    };

    auto check_collision = [&](double t, std::span<const double> state) {
        for (int i = 0; i < n; ++i) {
            double rho;
            if (relative_mode) {
                rho = state[3 * i];
            } else {
                const int j = (i + 1) % n;
                rho = std::hypot(state[3 * j] - state[3 * i],
                                 state[3 * j + 1] - state[3 * i + 1]);
            }
            if (rho < config.rho_min)
                throw simulation_error("simulate: adjacent vehicles " + std::to_string(i + 1) +
                                           "," + std::to_string((i + 1) % n + 1) +
                                           " closer than rho_min",
                                       t);
        }
    };

    check_collision(0.0, y);
    if (relative_mode) record_relative(config, 0.0, y, traj);
    else record_absolute(config, 0.0, y, traj);

    Rk4Workspace ws(3 * n);
    for (long step = 0; step < steps; ++step) {
        const double t = step * config.dt;
        if (relative_mode) {
            ws.step(y, t, config.dt, relative_mode_rhs);
            for (int i = 0; i < n; ++i) {
                y[3 * i + 1] = wrap_angle(y[3 * i + 1]);
                y[3 * i + 2] = wrap_angle(y[3 * i + 2]);
            }
        } else {
            ws.step(y, t, config.dt, absolute_mode_rhs);
        }
        const double t_next = (step + 1) * config.dt;
        check_collision(t_next, y);
        if ((step + 1) % config.record_stride == 0 || step + 1 == steps) {
            if (relative_mode) record_relative(config, t_next, y, traj);
            else record_absolute(config, t_next, y, traj);
        }
    }
    return traj;
}

namespace {

bool consistent_with(const FormationDescriptor& ref,
                     const std::optional<FormationDescriptor>& snap, double tol) {
    if (!snap) return false;
    if (snap->rotation != ref.rotation || snap->arrangement_p != ref.arrangement_p) return false;
    if (std::abs(snap->radius - ref.radius) / ref.radius > tol) return false;
    for (std::size_t i = 0; i < ref.bearings.size(); ++i)
        if (!angles_equal(snap->bearings[i], ref.bearings[i], tol)) return false;
    return true;
}

}  // namespace

ConvergenceReport detect_convergence(const Trajectory& traj, double tol, int window, double v) {
    if (traj.snapshots() == 0) throw analysis_error("detect_convergence: empty trajectory");
    const int m = traj.snapshots();
    const int w = std::min(window, m);

    std::vector<std::optional<FormationDescriptor>> descs(m);
    for (int j = 0; j < m; ++j) descs[j] = is_circular_formation(traj.relative[j], tol, v);

    ConvergenceReport report;
    const FleetRelativeState& last = traj.relative.back();
    {
        const int n = last.size();
        double beta_sum = 0.0, smin = 1e300, smax = -1e300, smean = 0.0;
        for (const RelativeState& l : last.links) {
            report.final_residuals.bearing_condition =
                std::max(report.final_residuals.bearing_condition,
                         std::abs(wrap_angle(2.0 * l.alpha + l.beta - pi)));
            beta_sum += l.beta;
            const double s = std::sin(l.alpha) / l.rho;
            smin = std::min(smin, s);
            smax = std::max(smax, s);
            smean += s;
        }
        smean /= n;
        report.final_residuals.beta_sum = std::abs(wrap_angle(beta_sum + n * pi));
        report.final_residuals.ratio_spread =
            smean == 0.0 ? std::numeric_limits<double>::infinity() : (smax - smin) / std::abs(smean);
    }

    if (!descs[m - 1]) return report;
    const FormationDescriptor& ref = *descs[m - 1];
    for (int j = m - w; j < m; ++j)
        if (!consistent_with(ref, descs[j], tol)) return report;
    report.converged = true;
    report.formation = descs[m - 1];

    // earliest snapshot from which the final formation is held continuously
    int first = m - 1;
    while (first > 0 && consistent_with(ref, descs[first - 1], tol)) --first;
    report.settle_time = traj.times[first];
    return report;
}

VariantTrajectory n2_variant_simulate(double beta0, double alpha0, double rho0,
                                      const ControlParams& params, double dt, double t_end,
                                      int record_stride) {
    if (!(rho0 > 0.0)) throw geometry_error("n2_variant_simulate: rho0 must be positive");
    if (!params.is_valid()) throw config_error("n2_variant_simulate: invalid params");
    if (!(dt > 0.0) || !(t_end >= dt))
        throw config_error("n2_variant_simulate: need dt > 0 and t_end >= dt");

    auto rhs = [&](double, std::span<const double> y, std::span<double> dydt) {
        const double common = std::cos(y[1]) + std::cos(y[1] + beta0);
        dydt[0] = -params.v * common;
        dydt[1] = -params.k * common;
    };

    VariantTrajectory traj;
    traj.beta0 = beta0;
    std::vector<double> y = {rho0, alpha0};
    const long steps = std::lround(t_end / dt);
    auto record = [&](double t) {
        traj.times.push_back(t);
        traj.rho.push_back(y[0]);
        traj.alpha.push_back(y[1]);
    };
    record(0.0);
    Rk4Workspace ws(2);
    for (long step = 0; step < steps; ++step) {
        ws.step(y, step * dt, dt, rhs);
        if (y[0] <= 0.0)
            throw simulation_error("n2_variant_simulate: rho collapsed", (step + 1) * dt);
        if ((step + 1) % record_stride == 0 || step + 1 == steps) record((step + 1) * dt);
    }
    return traj;
}

}  // namespace pursuit
