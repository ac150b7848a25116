#pragma once

#include <array>
#include <span>
#include <vector>

#include "pursuit/geometry.hpp"

namespace pursuit {

/// Forward speed and steering gain shared by all vehicles.
struct ControlParams {
    double v = 1.0;  // > 0
    double k = 0.0;  // nonzero wherever a law is applied

    bool is_valid() const;
};

enum class ControlLaw { main, variant };

/// Main steering law:
///   omega = (v/rho)*2*sin(alpha) + (k/rho)*(cos(alpha) + cos(alpha+beta)).
double omega_main(const RelativeState& link, const ControlParams& params);

/// Variant law (analyzed for n = 2 only):
///   omega = (v/rho)*(sin(alpha) + sin(alpha+beta)) + k*(cos(alpha) + cos(alpha+beta)).
double omega_variant(const RelativeState& link, const ControlParams& params);

double omega(ControlLaw law, const RelativeState& link, const ControlParams& params);

/// Time derivative (rho_dot, alpha_dot, beta_dot) of every link under the
/// closed loop. beta_dot is formed as omega_i - omega_{i+1} (cyclic).
/// The variant law is restricted to n = 2.
std::vector<std::array<double, 3>> closed_loop_rhs(const FleetRelativeState& xi,
                                                   const ControlParams& params,
                                                   ControlLaw law = ControlLaw::main);

/// Same vector field on a flat state [rho_1, alpha_1, beta_1, rho_2, ...];
/// used by the integrator and the finite-difference Jacobian.
void closed_loop_rhs_flat(std::span<const double> xi, const ControlParams& params,
                          ControlLaw law, std::span<double> out);

/// Max-norm of the closed-loop vector field; equilibrium admission metric.
double equilibrium_residual(const FleetRelativeState& xi, const ControlParams& params,
                            ControlLaw law = ControlLaw::main);

}  // namespace pursuit
