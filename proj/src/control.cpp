#include "pursuit/control.hpp"

#include <cmath>

namespace pursuit {

bool ControlParams::is_valid() const {
    return std::isfinite(v) && v > 0.0 && std::isfinite(k);
}

namespace {

inline double omega_main_raw(double rho, double alpha, double beta, double v, double k) {
    return (v / rho) * 2.0 * std::sin(alpha) +
           (k / rho) * (std::cos(alpha) + std::cos(alpha + beta));
}

inline double omega_variant_raw(double rho, double alpha, double beta, double v, double k) {
    const double ab = alpha + beta;
    return (v / rho) * (std::sin(alpha) + std::sin(ab)) +
           k * (std::cos(alpha) + std::cos(ab));
}

inline void check_rho(double rho) {
    if (!(rho > 0.0)) throw geometry_error("control law: rho must be positive");
}

}  // namespace

double omega_main(const RelativeState& link, const ControlParams& params) {
    check_rho(link.rho);
    return omega_main_raw(link.rho, link.alpha, link.beta, params.v, params.k);
}

double omega_variant(const RelativeState& link, const ControlParams& params) {
    check_rho(link.rho);
    return omega_variant_raw(link.rho, link.alpha, link.beta, params.v, params.k);
}

double omega(ControlLaw law, const RelativeState& link, const ControlParams& params) {
    return law == ControlLaw::main ? omega_main(link, params) : omega_variant(link, params);
}

void closed_loop_rhs_flat(std::span<const double> xi, const ControlParams& params,
                          ControlLaw law, std::span<double> out) {
    const int n = static_cast<int>(xi.size() / 3);
    if (law == ControlLaw::variant && n != 2)
        throw geometry_error("closed_loop_rhs: variant law is defined for n = 2 only");

    // omega of every vehicle first, then per-link derivatives
    double omega_buf[2];
    std::vector<double> omega_heap;
    double* w = omega_buf;
    if (n > 2) {
        omega_heap.resize(n);
        w = omega_heap.data();
    }
    for (int i = 0; i < n; ++i) {
        const double rho = xi[3 * i];
        check_rho(rho);
        const double alpha = xi[3 * i + 1];
        const double beta = xi[3 * i + 2];
        w[i] = law == ControlLaw::main
                   ? omega_main_raw(rho, alpha, beta, params.v, params.k)
                   : omega_variant_raw(rho, alpha, beta, params.v, params.k);
    }
    for (int i = 0; i < n; ++i) {
        const double rho = xi[3 * i];
        const double alpha = xi[3 * i + 1];
        const double beta = xi[3 * i + 2];
        const double ab = alpha + beta;
        out[3 * i] = -params.v * (std::cos(alpha) + std::cos(ab));
        out[3 * i + 1] = (params.v / rho) * (std::sin(alpha) + std::sin(ab)) - w[i];
        out[3 * i + 2] = w[i] - w[(i + 1) % n];
    }
}

std::vector<std::array<double, 3>> closed_loop_rhs(const FleetRelativeState& xi,
                                                   const ControlParams& params,
                                                   ControlLaw law) {
    const int n = xi.size();
    std::vector<double> flat(3 * n), deriv(3 * n);
    for (int i = 0; i < n; ++i) {
        flat[3 * i] = xi.links[i].rho;
        flat[3 * i + 1] = xi.links[i].alpha;
        flat[3 * i + 2] = xi.links[i].beta;
    }
    closed_loop_rhs_flat(flat, params, law, deriv);
    std::vector<std::array<double, 3>> result(n);
    for (int i = 0; i < n; ++i)
        result[i] = {deriv[3 * i], deriv[3 * i + 1], deriv[3 * i + 2]};
    return result;
}

double equilibrium_residual(const FleetRelativeState& xi, const ControlParams& params,
                            ControlLaw law) {
    double r = 0.0;
    for (const auto& d : closed_loop_rhs(xi, params, law))
        for (double c : d) r = std::max(r, std::abs(c));
    return r;
}

}  // namespace pursuit
