#include "pursuit/linearize.hpp"

#include <cmath>
#include <string>

namespace pursuit {

namespace {

constexpr double kEquilibriumTol = 1e-8;

void require_equilibrium(const FleetRelativeState& xi_bar, const ControlParams& params) {
    const double r = equilibrium_residual(xi_bar, params, ControlLaw::main);
    if (r > kEquilibriumTol)
        throw analysis_error("linearize: input is not an equilibrium (|rhs| = " +
                             std::to_string(r) + ")");
}

}  // namespace

LinearizedSystem linearize(const FleetRelativeState& xi_bar, const ControlParams& params) {
    require_equilibrium(xi_bar, params);
    const int n = xi_bar.size();
    const double v = params.v, k = params.k;

    LinearizedSystem sys;
    sys.n = n;
    sys.A_blocks.resize(n);
    sys.B_blocks.resize(n);
    sys.sbar_values.resize(n);
    sys.cbar_values.resize(n);

    for (int i = 0; i < n; ++i) {
        const double rho = xi_bar.links[i].rho;
        const double alpha = xi_bar.links[i].alpha;
        sys.sbar_values[i] = std::sin(alpha) / rho;
        sys.cbar_values[i] = std::cos(alpha) / rho;
    }

    for (int i = 0; i < n; ++i) {
        const double rho = xi_bar.links[i].rho;
        const double s = sys.sbar_values[i];
        const double c = sys.cbar_values[i];
        sys.A_blocks[i] << 0.0, 2.0 * v * s * rho, v * s * rho,
            0.0, 2.0 * k * s - 2.0 * v * c, k * s - v * c,
            -2.0 * v * s / rho, 2.0 * v * c - 2.0 * k * s, -k * s;

        const int j = (i + 1) % n;  // coupling block is built from the pursued link
        const double rho_j = xi_bar.links[j].rho;
        const double s_j = sys.sbar_values[j];
        const double c_j = sys.cbar_values[j];
        sys.B_blocks[i] << 0.0, 0.0, 0.0,
            0.0, 0.0, 0.0,
            2.0 * v * s_j / rho_j, 2.0 * k * s_j - 2.0 * v * c_j, k * s_j;
    }

    sys.assembled = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int i = 0; i < n; ++i) {
        sys.assembled.block<3, 3>(3 * i, 3 * i) = sys.A_blocks[i];
        sys.assembled.block<3, 3>(3 * i, 3 * ((i + 1) % n)) = sys.B_blocks[i];
    }
    return sys;
}

std::vector<Eigen::VectorXd> kernel_basis_circular(const FleetRelativeState& xi_bar,
                                                   const ControlParams& params) {
    require_equilibrium(xi_bar, params);
    const int n = xi_bar.size();
    std::vector<Eigen::VectorXd> basis;
    basis.reserve(n + 1);

    Eigen::VectorXd scaling = Eigen::VectorXd::Zero(3 * n);
    for (int i = 0; i < n; ++i) scaling(3 * i) = xi_bar.links[i].rho;
    basis.push_back(std::move(scaling));

    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd drift = Eigen::VectorXd::Zero(3 * n);
        const double alpha = xi_bar.links[i].alpha;
        drift(3 * i) = xi_bar.links[i].rho * std::cos(alpha) / std::sin(alpha);
        drift(3 * i + 1) = 1.0;
        drift(3 * i + 2) = -2.0;
        basis.push_back(std::move(drift));
    }
    return basis;
}

Eigen::VectorXd kernel_vector_collinear(const FleetRelativeState& xi_bar,
                                        const ControlParams& params) {
    require_equilibrium(xi_bar, params);
    const int n = xi_bar.size();
    double rho_cos_sum = 0.0, rho_sum = 0.0;
    for (const RelativeState& l : xi_bar.links) {
        if (std::abs(std::sin(l.alpha)) > 1e-8 || std::abs(wrap_angle(l.beta + pi)) > 1e-8)
            throw analysis_error("kernel_vector_collinear: state is not collinear");
        rho_cos_sum += l.rho * std::cos(l.alpha);
        rho_sum += l.rho;
    }
    if (std::abs(rho_cos_sum) > 1e-8 * rho_sum)
        throw analysis_error("kernel_vector_collinear: sum(rho_i cos alpha_i) != 0");

    Eigen::VectorXd v = Eigen::VectorXd::Zero(3 * n);
    for (int i = 0; i < n; ++i) {
        const double c = std::cos(xi_bar.links[i].alpha) / xi_bar.links[i].rho;
        v(3 * i + 1) = 1.0 / c;
        v(3 * i + 2) = -2.0 / c;
    }
    return v;
}

ReducedSystem reduce(const FleetRelativeState& xi_bar, const ControlParams& params) {
    const auto desc = is_circular_formation(xi_bar, 1e-6, params.v);
    if (!desc) throw analysis_error("reduce: input is not a circular equilibrium");
    LinearizedSystem lin = linearize(xi_bar, params);

    const int n = lin.n;
    const double v = params.v, k = params.k;
    double sbar = 0.0;
    for (double s : lin.sbar_values) sbar += s;
    sbar /= n;

    ReducedSystem red;
    red.n = n;
    red.sbar = sbar;
    red.Bbar << 0.0, 0.0, 2.0 * v, k;
    red.Bbar *= sbar;
    red.Abar_blocks.resize(n);
    red.assembled = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    for (int i = 0; i < n; ++i) {
        const double ct = 1.0 / std::tan(xi_bar.links[i].alpha);
        red.Abar_blocks[i] << 0.0, v * ct * ct - k * ct + v, -2.0 * v, k - 2.0 * v * ct;
        red.Abar_blocks[i] *= sbar;
        red.assembled.block<2, 2>(2 * i, 2 * i) = red.Abar_blocks[i];
        red.assembled.block<2, 2>(2 * i, 2 * ((i + 1) % n)) = red.Bbar;
    }

    // Independent route: scale rho by 1/rho_i and swap beta for 2*alpha+beta,
    // eliminate the cot-proportional column, then permute the dead alpha
    // coordinates to the tail.
    red.U = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    red.V = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    Eigen::MatrixXd U_inv = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    Eigen::MatrixXd V_inv = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int i = 0; i < n; ++i) {
        const double rho = xi_bar.links[i].rho;
        const double ct = 1.0 / std::tan(xi_bar.links[i].alpha);
        Eigen::Matrix3d Ui, Ui_inv, Vi, Vi_inv;
        Ui << 1.0 / rho, 0, 0, 0, 1, 0, 0, 2, 1;
        Ui_inv << rho, 0, 0, 0, 1, 0, 0, -2, 1;
        Vi << 1, -ct, 0, 0, 1, 0, 0, 0, 1;
        Vi_inv << 1, ct, 0, 0, 1, 0, 0, 0, 1;
        red.U.block<3, 3>(3 * i, 3 * i) = Ui;
        U_inv.block<3, 3>(3 * i, 3 * i) = Ui_inv;
        red.V.block<3, 3>(3 * i, 3 * i) = Vi;
        V_inv.block<3, 3>(3 * i, 3 * i) = Vi_inv;
    }
    const Eigen::MatrixXd transformed =
        red.V * red.U * lin.assembled * U_inv * V_inv;

    // permutation: (rho_i, eta_i) pairs first in vehicle order, alphas last
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(3 * n, 3 * n);
    for (int i = 0; i < n; ++i) {
        P(2 * i, 3 * i) = 1.0;
        P(2 * i + 1, 3 * i + 2) = 1.0;
        P(2 * n + i, 3 * i + 1) = 1.0;
    }
    const Eigen::MatrixXd permuted = P * transformed * P.transpose();
    const Eigen::MatrixXd from_transform = permuted.topLeftCorner(2 * n, 2 * n);

    const double scale = std::max(1.0, red.assembled.cwiseAbs().maxCoeff());
    const double mismatch = (from_transform - red.assembled).cwiseAbs().maxCoeff();
    if (mismatch > 1e-10 * scale)
        throw analysis_error("reduce: closed-form and transform-derived blocks disagree (" +
                             std::to_string(mismatch) + ")");
    return red;
}

double trace_reduced(std::span<const double> bearings, const ControlParams& params,
                     double sbar) {
    return static_cast<double>(bearings.size()) * params.k * sbar -
           2.0 * params.v * sbar * cot_bearing_sum(bearings);
}

}  // namespace pursuit
