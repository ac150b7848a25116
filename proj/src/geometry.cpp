#include "pursuit/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace pursuit {

bool AgentState::is_valid() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta);
}

bool RelativeState::is_valid() const {
    return std::isfinite(rho) && rho > 0.0 && alpha >= -pi && alpha < pi && beta >= -pi &&
           beta < pi;
}

bool FleetRelativeState::is_valid() const {
    if (links.size() < 2) return false;
    return std::all_of(links.begin(), links.end(),
                       [](const RelativeState& l) { return l.is_valid(); });
}

FleetRelativeState to_relative(std::span<const AgentState> fleet) {
    const int n = static_cast<int>(fleet.size());
    if (n < 2) throw geometry_error("to_relative: need at least 2 vehicles");

    FleetRelativeState xi;
    xi.links.resize(n);
    for (int i = 0; i < n; ++i) {
        const AgentState& a = fleet[i];
        const AgentState& b = fleet[(i + 1) % n];
        const double dx = b.x - a.x;
        const double dy = b.y - a.y;
        const double c = std::cos(a.theta), s = std::sin(a.theta);
        // rotate the offset into vehicle i's body frame
        const double xb = c * dx + s * dy;
        const double yb = -s * dx + c * dy;
        const double rho = std::hypot(xb, yb);
        if (rho == 0.0)
            throw geometry_error("to_relative: vehicles " + std::to_string(i + 1) + " and " +
                                 std::to_string((i + 1) % n + 1) + " are coincident");
        xi.links[i].rho = rho;
        xi.links[i].alpha = std::atan2(yb, xb);
        xi.links[i].beta = wrap_angle(a.theta - b.theta - pi);
    }
    return xi;
}

ConstraintResidual constraint_residuals(const FleetRelativeState& xi) {
    const int n = xi.size();
    ConstraintResidual r;
    r.gammas.resize(n);
    double beta_sum = 0.0;
    double gamma = 0.0;  // gamma_1 = 0; accumulated unwrapped
    for (int i = 0; i < n; ++i) {
        r.gammas[i] = gamma;
        const double phase = xi.links[i].alpha + gamma;
        r.g1 += xi.links[i].rho * std::sin(phase);
        r.g2 += xi.links[i].rho * std::cos(phase);
        beta_sum += xi.links[i].beta;
        gamma += pi - xi.links[i].beta;
    }
    r.g3 = wrap_angle(beta_sum + n * pi);
    return r;
}

std::optional<FormationDescriptor> is_circular_formation(const FleetRelativeState& xi,
                                                         double tol, double v) {
    if (tol <= 0.0) throw geometry_error("is_circular_formation: tol must be positive");
    const int n = xi.size();

    double beta_sum = 0.0;
    for (const RelativeState& l : xi.links) beta_sum += l.beta;
    if (std::abs(wrap_angle(beta_sum + n * pi)) > tol) return std::nullopt;

    for (const RelativeState& l : xi.links)
        if (!angles_equal(2.0 * l.alpha + l.beta, pi, tol)) return std::nullopt;

    double s_min = std::numeric_limits<double>::infinity();
    double s_max = -s_min;
    double s_mean = 0.0;
    for (const RelativeState& l : xi.links) {
        const double s = std::sin(l.alpha) / l.rho;
        s_min = std::min(s_min, s);
        s_max = std::max(s_max, s);
        s_mean += s;
    }
    s_mean /= n;
    if (s_mean == 0.0) return std::nullopt;
    if ((s_max - s_min) / std::abs(s_mean) > tol) return std::nullopt;

    const int rotation = s_mean > 0.0 ? +1 : -1;
    double alpha_sum = 0.0;
    for (const RelativeState& l : xi.links) {
        // bearings of one rotation sense only
        if (l.alpha * rotation <= 0.0) return std::nullopt;
        alpha_sum += l.alpha;
    }
    const long p_signed = std::lround(alpha_sum / pi);
    if (std::abs(alpha_sum - static_cast<double>(p_signed) * pi) > 0.1 * pi) return std::nullopt;
    const long p = std::abs(p_signed);
    if (p < 1 || p > n - 1 || (p_signed > 0) != (rotation > 0)) return std::nullopt;

    FormationDescriptor d;
    d.ratio_s = s_mean;
    d.rotation = rotation;
    d.radius = 1.0 / (2.0 * std::abs(s_mean));
    d.arrangement_p = static_cast<int>(p);
    d.bearings.reserve(n);
    for (const RelativeState& l : xi.links) d.bearings.push_back(l.alpha);
    d.angular_speed = 2.0 * v * s_mean;
    return d;
}

bool equivalent_condition_check(const FleetRelativeState& xi, double tol) {
    if (tol <= 0.0) throw geometry_error("equivalent_condition_check: tol must be positive");
    for (const RelativeState& l : xi.links) {
        const double ab = l.alpha + l.beta;
        if (std::abs(std::sin(l.alpha) - std::sin(ab)) > tol) return false;
        if (std::abs(std::cos(l.alpha) + std::cos(ab)) > tol) return false;
    }
    return true;
}

int bearing_sum_index(std::span<const double> bearings) {
    const int n = static_cast<int>(bearings.size());
    const double sum = std::accumulate(bearings.begin(), bearings.end(), 0.0);
    const long p = std::lround(sum / pi);
    if (std::abs(sum - static_cast<double>(p) * pi) > 0.1 * pi)
        throw geometry_error("bearing_sum_index: bearing sum is not a multiple of pi");
    if (std::abs(p) < 1 || std::abs(p) > n - 1)
        throw geometry_error("bearing_sum_index: index " + std::to_string(p) +
                             " outside [1, n-1]");
    return static_cast<int>(p);
}

int bearing_sum_index(const FleetRelativeState& xi) {
    std::vector<double> b;
    b.reserve(xi.links.size());
    for (const RelativeState& l : xi.links) b.push_back(l.alpha);
    return bearing_sum_index(b);
}

double cot_bearing_sum(std::span<const double> bearings) {
    double sum = 0.0;
    for (double a : bearings) {
        const double s = std::sin(a);
        if (std::abs(s) < 1e-12)
            throw geometry_error("cot_bearing_sum: singular cotangent at bearing " +
                                 std::to_string(a));
        sum += std::cos(a) / s;
    }
    return sum;
}

std::uint64_t count_arrangements(int n) {
    if (n < 2) throw geometry_error("count_arrangements: need n >= 2");
    if (n > 21) throw geometry_error("count_arrangements: (n-1)! overflows 64 bits for n > 21");
    std::uint64_t f = 1;
    for (int i = 2; i <= n - 1; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}

std::pair<FleetRelativeState, FormationDescriptor>
construct_circular_formation(std::span<const double> bearings, double r, double v) {
    const int n = static_cast<int>(bearings.size());
    if (n < 2) throw geometry_error("construct_circular_formation: need n >= 2");
    if (r == 0.0 || !std::isfinite(r))
        throw geometry_error("construct_circular_formation: radius must be nonzero");

    const int p = bearing_sum_index(bearings);  // validates sum = p*pi
    for (double a : bearings) {
        if (std::abs(std::sin(a)) < 1e-12)
            throw geometry_error("construct_circular_formation: zero-sine bearing");
        if ((a > 0.0) != (p > 0))
            throw geometry_error("construct_circular_formation: bearings of mixed sign");
    }
    if ((r > 0.0) != (p > 0))
        throw geometry_error(
            "construct_circular_formation: sign(r) must match the bearing sign");

    FleetRelativeState xi;
    xi.links.resize(n);
    for (int i = 0; i < n; ++i) {
        xi.links[i].rho = 2.0 * r * std::sin(bearings[i]);
        xi.links[i].alpha = bearings[i];
        xi.links[i].beta = wrap_angle(pi - 2.0 * bearings[i]);
    }

    FormationDescriptor d;
    d.radius = std::abs(r);
    d.rotation = r > 0.0 ? +1 : -1;
    d.ratio_s = 1.0 / (2.0 * r);
    d.arrangement_p = std::abs(p);
    d.bearings.assign(bearings.begin(), bearings.end());
    d.angular_speed = v / r;
    return {std::move(xi), std::move(d)};
}

std::pair<std::vector<AgentState>, FleetRelativeState>
construct_equally_spaced(int n, double r, int rotation, double v) {
    (void)v;
    if (n < 2) throw geometry_error("construct_equally_spaced: need n >= 2");
    if (r <= 0.0) throw geometry_error("construct_equally_spaced: radius must be positive");
    if (rotation != 1 && rotation != -1)
        throw geometry_error("construct_equally_spaced: rotation must be +1 or -1");

    std::vector<AgentState> fleet(n);
    for (int i = 0; i < n; ++i) {
        const double psi = rotation * two_pi * i / n;
        fleet[i].x = r * std::cos(psi);
        fleet[i].y = r * std::sin(psi);
        fleet[i].theta = wrap_angle(psi + rotation * pi / 2.0);
    }

    FleetRelativeState xi;
    xi.links.resize(n);
    for (int i = 0; i < n; ++i) {
        xi.links[i].rho = 2.0 * r * std::sin(pi / n);
        xi.links[i].alpha = rotation * pi / n;
        xi.links[i].beta = wrap_angle(rotation * (pi - two_pi / n));
    }
    return {std::move(fleet), std::move(xi)};
}

}  // namespace pursuit
