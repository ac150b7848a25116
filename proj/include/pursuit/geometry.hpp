#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pursuit/angles.hpp"
#include "pursuit/errors.hpp"

namespace pursuit {

/// Absolute pose of one unicycle. theta is an unbounded heading in radians;
/// wrap on demand.
struct AgentState {
    double x = 0.0;
    double y = 0.0;
    double theta = 0.0;

    bool is_valid() const;
};

/// One pursuit link in relative coordinates: distance rho to the pursued
/// vehicle, bearing alpha from own heading to the line of sight, and heading
/// difference beta = theta_i - theta_{i+1} - pi (wrapped).
struct RelativeState {
    double rho = 0.0;    // > 0
    double alpha = 0.0;  // [-pi, pi)
    double beta = 0.0;   // [-pi, pi)

    bool is_valid() const;
};

/// Relative state of the whole fleet; link i points from vehicle i to vehicle
/// i+1 (cyclic).
struct FleetRelativeState {
    std::vector<RelativeState> links;

    int size() const { return static_cast<int>(links.size()); }
    bool is_valid() const;
};

/// Residuals of the three closure constraints. gammas holds the accumulators
/// gamma_i = (i-1)*pi - sum_{j<i} beta_j used inside the g1/g2 sums.
struct ConstraintResidual {
    double g1 = 0.0;
    double g2 = 0.0;
    double g3 = 0.0;  // wrapped value of sum(beta_i) + n*pi
    std::vector<double> gammas;
};

/// A detected circular formation.
struct FormationDescriptor {
    double radius = 0.0;        // |r| of the common circle
    int rotation = +1;          // +1 counterclockwise, -1 clockwise
    double ratio_s = 0.0;       // common ratio sin(alpha_i)/rho_i = 1/(2r_signed)
    int arrangement_p = 1;      // |sum(alpha_i)/pi|, in [1, n-1]
    std::vector<double> bearings;
    double angular_speed = 0.0; // 2*v*ratio_s
};

/// Relative coordinates of a fleet of absolute poses. Throws geometry_error
/// when n < 2 or two cyclically adjacent vehicles coincide.
FleetRelativeState to_relative(std::span<const AgentState> fleet);

/// Evaluate the three closure constraints on a relative state. The gamma
/// accumulators are used unwrapped; g3 is wrapped.
ConstraintResidual constraint_residuals(const FleetRelativeState& xi);

/// Test the three circular-formation conditions within tol:
///   sum(beta_i) + n*pi = 0 (mod 2pi),
///   2*alpha_i + beta_i = pi (mod 2pi) for all i,
///   sin(alpha_i)/rho_i equal and nonzero (relative spread <= tol).
/// Returns the descriptor on success, empty otherwise. v only scales the
/// reported angular speed.
std::optional<FormationDescriptor> is_circular_formation(const FleetRelativeState& xi,
                                                         double tol, double v = 1.0);

/// Per-link pair-equality form of the bearing condition:
/// sin(a_i) - sin(a_i+b_i) = 0 and cos(a_i) + cos(a_i+b_i) = 0 within tol.
/// Agrees with the 2*alpha_i + beta_i = pi (mod 2pi) test.
bool equivalent_condition_check(const FleetRelativeState& xi, double tol);

/// Signed arrangement index p = round(sum(alpha_i)/pi). Positive for
/// counterclockwise motion. Throws geometry_error when the sum is farther
/// than 0.1*pi from any integer multiple or |p| falls outside [1, n-1].
int bearing_sum_index(std::span<const double> bearings);
int bearing_sum_index(const FleetRelativeState& xi);

/// Sum of cot(alpha_i). Throws geometry_error on a singular cotangent
/// (bearing at 0 or pi).
double cot_bearing_sum(std::span<const double> bearings);

/// Number of distinct cyclic arrangements of n vehicles on a circle, (n-1)!.
/// Throws geometry_error when the value is not representable (n > 21).
std::uint64_t count_arrangements(int n);

/// Canonical equilibrium factory: from bearings with sum(alpha_i) = p*pi
/// (all of one sign) and a signed radius r, build the relative state with
/// rho_i = 2*r*sin(alpha_i), beta_i = wrap(pi - 2*alpha_i).
/// sign(r) must match the bearing sign. v only enters the descriptor.
std::pair<FleetRelativeState, FormationDescriptor>
construct_circular_formation(std::span<const double> bearings, double r, double v);

/// Equally spaced formation on a circle of radius r > 0: vehicle i sits at
/// polar angle rotation*2*pi*(i-1)/n with tangent heading, so that
/// |alpha_i| = pi/n, rho_i = 2*r*sin(pi/n), beta_i = rotation*(pi - 2*pi/n).
/// rotation: +1 ccw, -1 cw.
std::pair<std::vector<AgentState>, FleetRelativeState>
construct_equally_spaced(int n, double r, int rotation, double v = 1.0);

}  // namespace pursuit
