#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "pursuit/control.hpp"
#include "pursuit/geometry.hpp"

namespace pursuit {

/// Linearization of the closed loop about an equilibrium: per-link blocks and
/// the assembled 3n x 3n matrix with A_i on the diagonal, the coupling block
/// of link i+1 on the superdiagonal and the wrap-around block bottom-left.
struct LinearizedSystem {
    int n = 0;
    std::vector<Eigen::Matrix3d> A_blocks;
    /// B_blocks[i] couples link i to link i+1 (built from link i+1's values);
    /// it occupies block row i, block column (i+1) mod n.
    std::vector<Eigen::Matrix3d> B_blocks;
    Eigen::MatrixXd assembled;
    std::vector<double> sbar_values;  // sin(alpha_i)/rho_i
    std::vector<double> cbar_values;  // cos(alpha_i)/rho_i
};

/// Reduction of the linearization at a circular equilibrium to the 2n x 2n
/// core in (scaled rho, 2*alpha+beta) coordinates.
struct ReducedSystem {
    int n = 0;
    std::vector<Eigen::Matrix2d> Abar_blocks;
    Eigen::Matrix2d Bbar;
    Eigen::MatrixXd assembled;
    double sbar = 0.0;
    Eigen::MatrixXd U;  // block-diagonal scaling / coordinate-mix transform
    Eigen::MatrixXd V;  // block-diagonal column-elimination transform
};

/// Assemble the linearization at an equilibrium of the main law. The input
/// must satisfy ||closed_loop_rhs||_inf <= 1e-8, otherwise analysis_error.
LinearizedSystem linearize(const FleetRelativeState& xi_bar, const ControlParams& params);

/// The n+1 known kernel vectors at a circular equilibrium: the orbit-scaling
/// vector [rho_1,0,0,...,rho_n,0,0] and one drift vector per vehicle with
/// triple i equal to [rho_i*cot(alpha_i), 1, -2].
std::vector<Eigen::VectorXd> kernel_basis_circular(const FleetRelativeState& xi_bar,
                                                   const ControlParams& params);

/// The kernel vector [0, 1/c_1, -2/c_1, 0, ...] at a collinear equilibrium.
Eigen::VectorXd kernel_vector_collinear(const FleetRelativeState& xi_bar,
                                        const ControlParams& params);

/// Build the reduced system twice -- from the closed-form blocks and through
/// the explicit U, V similarity transforms plus permutation -- and require
/// entrywise agreement to 1e-10. Throws analysis_error away from a circular
/// equilibrium.
ReducedSystem reduce(const FleetRelativeState& xi_bar, const ControlParams& params);

/// trace of the reduced matrix: n*k*sbar - 2*v*sbar*sum(cot alpha_i).
double trace_reduced(std::span<const double> bearings, const ControlParams& params,
                     double sbar);

}  // namespace pursuit
