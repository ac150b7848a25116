#pragma once

#include <Eigen/Dense>
#include <complex>
#include <random>
#include <vector>

#include "pursuit/control.hpp"
#include "pursuit/geometry.hpp"
#include "pursuit/sim.hpp"

namespace pursuit::testing {

/// Bearings of one rotation sense summing to exactly p*pi, each inside
/// (min_bearing, pi - 0.1). rotation = +1 draws counterclockwise bearings.
/// The draw spread is sized to the headroom around the mean bearing p*pi/n so
/// every valid (n, p) pair samples without starving.
inline std::vector<double> random_formation_bearings(std::mt19937_64& rng, int n, int p = 1,
                                                     int rotation = +1,
                                                     double min_bearing = 0.15) {
    const double mu = p * pi / n;
    min_bearing = std::min(min_bearing, 0.5 * mu);
    const double headroom = std::min(pi - 0.1 - mu, mu - min_bearing);
    const double spread = std::max(0.05, 0.8 * headroom / mu);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        std::vector<double> b(n);
        double sum = 0.0;
        for (double& x : b) {
            x = mu * (1.0 + spread * u(rng));
            sum += x;
        }
        const double scale = p * pi / sum;
        bool ok = true;
        for (double& x : b) {
            x *= scale;
            if (x < min_bearing || x > pi - 0.1) ok = false;
        }
        if (!ok) continue;
        if (rotation < 0)
            for (double& x : b) x = -x;
        return b;
    }
}

inline std::vector<AgentState> random_poses(std::mt19937_64& rng, int n, double box = 20.0) {
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    std::uniform_real_distribution<double> ang(-pi, pi);
    std::vector<AgentState> fleet(n);
    for (AgentState& q : fleet) q = {u(rng) * box, u(rng) * box, ang(rng)};
    return fleet;
}

/// Greedy multiset pairing: repeatedly match the globally closest pair and
/// return the largest matched distance (infinity on size mismatch).
inline double multiset_match_distance(std::vector<std::complex<double>> a,
                                      std::vector<std::complex<double>> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    while (!a.empty()) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j) {
                const double d = std::abs(a[i] - b[j]);
                if (d < best) {
                    best = d;
                    bi = i;
                    bj = j;
                }
            }
        worst = std::max(worst, best);
        a.erase(a.begin() + bi);
        b.erase(b.begin() + bj);
    }
    return worst;
}

/// Central-difference Jacobian of the closed-loop field; the independent
/// oracle for the analytic linearization.
inline Eigen::MatrixXd fd_jacobian(const FleetRelativeState& xi, const ControlParams& params,
                                   double h = 1e-6) {
    const int n = xi.size();
    std::vector<double> flat(3 * n);
    for (int i = 0; i < n; ++i) {
        flat[3 * i] = xi.links[i].rho;
        flat[3 * i + 1] = xi.links[i].alpha;
        flat[3 * i + 2] = xi.links[i].beta;
    }
    Eigen::MatrixXd J(3 * n, 3 * n);
    std::vector<double> plus(3 * n), minus(3 * n), work = flat;
    for (int j = 0; j < 3 * n; ++j) {
        work[j] = flat[j] + h;
        closed_loop_rhs_flat(work, params, ControlLaw::main, plus);
        work[j] = flat[j] - h;
        closed_loop_rhs_flat(work, params, ControlLaw::main, minus);
        work[j] = flat[j];
        for (int i = 0; i < 3 * n; ++i) J(i, j) = (plus[i] - minus[i]) / (2.0 * h);
    }
    return J;
}

/// Absolute poses realizing a circular formation: chord i subtends arc
/// 2*alpha_i, headings tangent. Independent of construct_circular_formation.
inline std::vector<AgentState> poses_on_circle(std::span<const double> bearings, double r) {
    std::vector<AgentState> fleet(bearings.size());
    double psi = 0.0;
    const int rot = bearings[0] > 0 ? +1 : -1;
    for (std::size_t i = 0; i < bearings.size(); ++i) {
        fleet[i] = {std::abs(r) * std::cos(psi), std::abs(r) * std::sin(psi),
                    wrap_angle(psi + rot * pi / 2.0)};
        psi += 2.0 * bearings[i];
    }
    return fleet;
}

}  // namespace pursuit::testing
