#include "pursuit/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pursuit/linearize.hpp"

namespace pursuit {

std::vector<Complex> eigvals(const Eigen::MatrixXd& M) {
    if (M.rows() != M.cols()) throw analysis_error("eigvals: matrix must be square");
    if (!M.allFinite()) throw analysis_error("eigvals: non-finite entries");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(M, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
        throw analysis_error("eigvals: QR iteration did not converge");
    std::vector<Complex> evs(M.rows());
    for (Eigen::Index i = 0; i < M.rows(); ++i) evs[i] = solver.eigenvalues()(i);
    std::sort(evs.begin(), evs.end(), [](const Complex& a, const Complex& b) {
        if (a.real() != b.real()) return a.real() < b.real();
        if (std::abs(a.imag()) != std::abs(b.imag()))
            return std::abs(a.imag()) < std::abs(b.imag());
        return a.imag() > b.imag();
    });
    return evs;
}

namespace poly {

std::vector<double> multiply(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) return {};
    std::vector<double> out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

std::pair<std::vector<double>, std::vector<double>> divide(std::span<const double> numerator,
                                                           std::span<const double> denominator) {
    if (denominator.empty() || denominator.back() == 0.0)
        throw analysis_error("poly::divide: zero leading coefficient in divisor");
    std::vector<double> rem(numerator.begin(), numerator.end());
    const int dn = static_cast<int>(numerator.size()) - 1;
    const int dd = static_cast<int>(denominator.size()) - 1;
    if (dn < dd) return {{0.0}, std::move(rem)};
    std::vector<double> quo(dn - dd + 1, 0.0);
    for (int i = dn - dd; i >= 0; --i) {
        const double q = rem[i + dd] / denominator[dd];
        quo[i] = q;
        for (int j = 0; j <= dd; ++j) rem[i + j] -= q * denominator[j];
    }
    rem.resize(dd);
    return {std::move(quo), std::move(rem)};
}

double eval(std::span<const double> coeffs, double x) {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * x + *it;
    return acc;
}

std::vector<Complex> roots(std::span<const double> coeffs) {
    std::vector<double> c(coeffs.begin(), coeffs.end());
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.size() < 2) return {};
    const int d = static_cast<int>(c.size()) - 1;
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(d, d);
    for (int i = 1; i < d; ++i) companion(i, i - 1) = 1.0;
    for (int i = 0; i < d; ++i) companion(i, d - 1) = -c[i] / c[d];
    return eigvals(companion);
}

}  // namespace poly

CharPoly implicit_charpoly(std::span<const double> bearings, int rotation_sign) {
    const int n = static_cast<int>(bearings.size());
    if (n < 2) throw analysis_error("implicit_charpoly: need n >= 2");
    if (rotation_sign != 1 && rotation_sign != -1)
        throw analysis_error("implicit_charpoly: rotation sign must be +1 or -1");

    CharPoly cp;
    cp.z_values.resize(n);
    for (int i = 0; i < n; ++i) {
        const double s = std::sin(bearings[i]);
        if (std::abs(s) < 1e-12)
            throw analysis_error("implicit_charpoly: bearing with singular cotangent");
        cp.z_values[i] = 1.0 + rotation_sign * std::cos(bearings[i]) / s;
    }

    std::vector<double> grow = {1.0};
    std::vector<double> decay = {1.0};
    for (double z : cp.z_values) {
        const double quad[3] = {2.0 * z * z, 2.0 * z, 1.0};
        const double lin[2] = {2.0 * z * z, -2.0};
        grow = poly::multiply(grow, quad);
        decay = poly::multiply(decay, lin);
    }
    cp.coeffs = std::move(grow);
    for (std::size_t i = 0; i < decay.size(); ++i) cp.coeffs[i] -= decay[i];

    double scale = 0.0;
    for (double c : cp.coeffs) {
        if (!std::isfinite(c)) throw analysis_error("implicit_charpoly: coefficient overflow");
        scale = std::max(scale, std::abs(c));
    }

    const double factor[4] = {0.0, 4.0, 0.0, 1.0};  // lambda^3 + 4*lambda
    auto [quotient, remainder] = poly::divide(cp.coeffs, factor);
    double rem_norm = 0.0;
    for (double r : remainder) rem_norm = std::max(rem_norm, std::abs(r));
    if (rem_norm > 1e-8 * std::max(1.0, scale))
        throw analysis_error(
            "implicit_charpoly: polynomial is not divisible by lambda^3 + 4*lambda "
            "(bearings outside the lemma's regime?)");
    cp.reduced_coeffs = std::move(quotient);
    return cp;
}

namespace {

RouthTable routh_run(const std::vector<double>& desc, double epsilon) {
    const int deg = static_cast<int>(desc.size()) - 1;
    RouthTable table;
    const int width = deg / 2 + 1;
    std::vector<double> r0(width, 0.0), r1(width, 0.0);
    for (int i = 0; i <= deg; i += 2) r0[i / 2] = desc[i];
    for (int i = 1; i <= deg; i += 2) r1[(i - 1) / 2] = desc[i];
    table.rows.push_back(r0);
    if (deg >= 1) table.rows.push_back(r1);

    for (int k = 2; k <= deg; ++k) {
        const std::vector<double>& above = table.rows[k - 1];
        const std::vector<double>& above2 = table.rows[k - 2];
        std::vector<double> row(width, 0.0);
        double pivot = above[0];
        if (pivot == 0.0) {
            bool all_zero = true;
            for (double x : above)
                if (x != 0.0) all_zero = false;
            if (all_zero) {
                // auxiliary polynomial from the row above, differentiated
                const int aux_deg = deg - (k - 2);
                std::vector<double>& editable = table.rows[k - 1];
                for (int j = 0; j < width; ++j) {
                    const int power = aux_deg - 2 * j;
                    editable[j] = power > 0 ? above2[j] * power : 0.0;
                }
                table.zero_pivot = true;
                pivot = editable[0];
                if (pivot == 0.0) break;
            } else {
                double row_scale = 0.0;
                for (double x : above) row_scale = std::max(row_scale, std::abs(x));
                table.rows[k - 1][0] = epsilon * std::max(1.0, row_scale);
                table.zero_pivot = true;
                pivot = table.rows[k - 1][0];
            }
        }
        const std::vector<double>& prev = table.rows[k - 1];
        for (int j = 0; j + 1 < width; ++j)
            row[j] = (pivot * above2[j + 1] - above2[0] * prev[j + 1]) / pivot;
        table.rows.push_back(std::move(row));
    }

    int changes = 0;
    double last = 0.0;
    for (const auto& row : table.rows) {
        const double x = row[0];
        if (x == 0.0) continue;
        if (last != 0.0 && (x > 0.0) != (last > 0.0)) ++changes;
        last = x;
    }
    table.sign_changes = changes;
    return table;
}

}  // namespace

RouthTable routh_hurwitz(std::span<const double> coeffs) {
    std::vector<double> c(coeffs.begin(), coeffs.end());
    while (!c.empty() && c.back() == 0.0) c.pop_back();
    if (c.empty()) throw analysis_error("routh_hurwitz: zero polynomial");
    if (c.back() < 0.0)
        for (double& x : c) x = -x;

    std::vector<double> desc(c.rbegin(), c.rend());
    RouthTable plus = routh_run(desc, 1e-20);
    if (!plus.zero_pivot) {
        plus.verdict = plus.sign_changes == 0 ? RouthVerdict::hurwitz : RouthVerdict::not_hurwitz;
        return plus;
    }
    RouthTable minus = routh_run(desc, -1e-20);
    // a zero pivot rules Hurwitz out; consistent sign changes certify RHP roots
    plus.verdict = (plus.sign_changes > 0 && plus.sign_changes == minus.sign_changes)
                       ? RouthVerdict::not_hurwitz
                       : RouthVerdict::marginal;
    return plus;
}

N3Coefficients n3_coefficients(double z1, double z2, double z3) {
    const double e1 = z1 + z2 + z3;
    const double b5 = 2.0 * e1;
    const double b4 = 2.0 * e1 * e1;
    const double b3 = 4.0 * z1 * z1 * (z2 + z3) + 4.0 * z2 * z2 * (z1 + z3) +
                      4.0 * z3 * z3 * (z1 + z2) + 8.0 * (z1 * z2 * z3 + 1.0);
    const double e2 = z1 * z2 + z2 * z3 + z1 * z3;
    const double b1 = 8.0 * z1 * z2 * z3 * e2 +
                      8.0 * (z1 * z1 * z2 * z2 + z2 * z2 * z3 * z3 + z1 * z1 * z3 * z3);

    N3Coefficients out;
    out.a2 = b5;
    out.a1 = b4 - 4.0;
    out.a0 = b3 - 4.0 * b5;
    const double a0_alt = b1 / 4.0;
    if (std::abs(out.a0 - a0_alt) > 1e-8 * std::max({1.0, std::abs(out.a0), std::abs(a0_alt)}))
        throw analysis_error(
            "n3_coefficients: the two a0 expressions disagree; z-values are not from a "
            "regular sum-pi bearing triple");
    out.gap = out.a2 * out.a1 - out.a0;
    return out;
}

namespace {

FormationDescriptor require_circular(const FleetRelativeState& xi_bar,
                                     const ControlParams& params) {
    const auto desc = is_circular_formation(xi_bar, 1e-6, params.v);
    if (!desc) throw analysis_error("stability: input is not a circular equilibrium");
    const double r = equilibrium_residual(xi_bar, params, ControlLaw::main);
    if (r > 1e-8)
        throw analysis_error("stability: closed-loop residual " + std::to_string(r) +
                             " exceeds the equilibrium tolerance");
    return *desc;
}

}  // namespace

StabilityVerdict n2_stability(const FleetRelativeState& xi_bar, const ControlParams& params) {
    if (xi_bar.size() != 2) throw analysis_error("n2_stability: n must be 2");
    const FormationDescriptor desc = require_circular(xi_bar, params);

    StabilityVerdict verdict;
    verdict.method = StabilityMethod::trace_n2;
    verdict.discarded_modes = 2 + 3;
    const double lambda6 = 2.0 * params.k * desc.ratio_s;
    verdict.max_re_nondiscarded = lambda6;
    verdict.eigenvalues = eigvals(linearize(xi_bar, params).assembled);
    if (lambda6 < 0.0) verdict.classification = StabilityClass::asymptotically_stable;
    else if (lambda6 > 0.0) verdict.classification = StabilityClass::unstable;
    else verdict.classification = StabilityClass::inconclusive;
    return verdict;
}

CirculantRoots circulant_roots(int n) {
    if (n < 3) throw analysis_error("circulant_roots: need n >= 3");
    CirculantRoots out;
    out.z = 1.0 + 1.0 / std::tan(pi / n);
    const double z = out.z;
    out.roots.reserve(2 * n);
    out.cases.reserve(n);
    for (int i = 1; i <= n; ++i) {
        RootCaseRecord rec;
        rec.index = i;
        rec.phi = 2.0 * (i - 1) * pi / n;
        rec.omega_root = Complex(std::cos(rec.phi), std::sin(rec.phi));
        const Complex b = z + rec.omega_root;
        rec.a1 = -b.real();
        rec.b1 = -b.imag();
        rec.Phi = b * b - 2.0 * z * z * (1.0 - rec.omega_root);
        const Complex sq = std::sqrt(rec.Phi);  // principal branch, Re >= 0
        rec.a2 = sq.real();
        rec.b2 = sq.imag();
        // Re(sqrt(Phi)) ~ 0 means Phi is (numerically) negative real: the +-
        // branches then just swap a conjugate pair. Flag it; the root multiset
        // is unaffected. Happens at phi = pi for even n.
        rec.branch_ambiguous = std::abs(rec.a2) <= 1e-12 * std::max(1.0, std::abs(sq));
        const double re_phi = -z * z + 2.0 * std::cos(rec.phi) * (z * z + z) +
                              std::cos(2.0 * rec.phi);
        const double im_phi = 2.0 * std::sin(rec.phi) * (z * z + z) + std::sin(2.0 * rec.phi);
        const double lead = 2.0 * (z + std::cos(rec.phi)) * (z + std::cos(rec.phi)) - re_phi;
        rec.Delta = lead * lead - re_phi * re_phi - im_phi * im_phi;
        out.roots.push_back(-b + sq);
        out.roots.push_back(-b - sq);
        out.cases.push_back(rec);
    }
    return out;
}

double variant_equilibrium_bearing(double beta0, double k) {
    const double b = wrap_angle(beta0);
    if (std::abs(b + pi) < 1e-12)
        throw analysis_error("variant_equilibrium_bearing: beta0 = -pi means identical "
                             "headings; no circular equilibrium");
    if (k == 0.0) throw analysis_error("variant_equilibrium_bearing: k must be nonzero");
    return k < 0.0 ? (pi - b) / 2.0 : (-pi - b) / 2.0;
}

std::pair<double, double> lyapunov_variant(double alpha, double beta0, double k) {
    const double abar = variant_equilibrium_bearing(beta0, k);
    const double c = std::cos(alpha) + std::cos(alpha + beta0);
    const double s = std::sin(alpha) + std::sin(alpha + beta0) - 2.0 * std::sin(abar);
    const double V = 0.5 * c * c + 0.5 * s * s;
    const double Vdot = 2.0 * k * std::sin(abar) * c * c;
    return {V, Vdot};
}

namespace {

// greedy nearest pairing; the largest matched distance
double max_pair_distance(std::vector<Complex> a, std::vector<Complex> b) {
    if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
    double worst = 0.0;
    while (!a.empty()) {
        std::size_t bi = 0, bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < a.size(); ++i)
            for (std::size_t j = 0; j < b.size(); ++j)
                if (std::abs(a[i] - b[j]) < best) {
                    best = std::abs(a[i] - b[j]);
                    bi = i;
                    bj = j;
                }
        worst = std::max(worst, best);
        a.erase(a.begin() + bi);
        b.erase(b.begin() + bj);
    }
    return worst;
}

}  // namespace

StabilityVerdict stability_report(const FleetRelativeState& xi_bar, const ControlParams& params,
                                  bool cross_check_full) {
    const FormationDescriptor desc = require_circular(xi_bar, params);
    const int n = xi_bar.size();

    if (cross_check_full) {
        std::vector<Complex> expected = eigvals(reduce(xi_bar, params).assembled);
        expected.insert(expected.end(), n, Complex(0, 0));
        const std::vector<Complex> full = eigvals(linearize(xi_bar, params).assembled);
        double radius = 0.0;
        for (const Complex& l : full) radius = std::max(radius, std::abs(l));
        const double mismatch = max_pair_distance(full, expected);
        if (mismatch > 1e-6 * std::max(1.0, radius))
            throw analysis_error(
                "stability_report: full and reduced spectra disagree beyond tolerance (" +
                std::to_string(mismatch) + ")");
    }

    if (n == 2) return n2_stability(xi_bar, params);

    const double sbar = desc.ratio_s;
    const bool lemma_regime = std::abs(std::abs(params.k) - 2.0 * params.v) <= 1e-12 &&
                              params.k * (sbar > 0 ? 1.0 : -1.0) < 0.0;

    StabilityVerdict verdict;
    verdict.discarded_modes = n + 3;

    if (lemma_regime && n == 3 && desc.arrangement_p == 1) {
        double z[3];
        for (int i = 0; i < 3; ++i) {
            const double a = std::abs(desc.bearings[i]);
            z[i] = 1.0 + std::cos(a) / std::sin(a);
        }
        const N3Coefficients c3 = n3_coefficients(z[0], z[1], z[2]);
        const double cubic[4] = {c3.a0, c3.a1, c3.a2, 1.0};
        verdict.routh = routh_hurwitz(cubic);
        verdict.method = StabilityMethod::routh_n3;
        verdict.eigenvalues = eigvals(reduce(xi_bar, params).assembled);
        verdict.max_re_nondiscarded = -std::numeric_limits<double>::infinity();
        switch (verdict.routh->verdict) {
            case RouthVerdict::hurwitz:
                verdict.classification = StabilityClass::asymptotically_stable;
                break;
            case RouthVerdict::not_hurwitz:
                verdict.classification = StabilityClass::unstable;
                break;
            case RouthVerdict::marginal:
                verdict.classification = StabilityClass::inconclusive;
                break;
        }
        for (const Complex& root : poly::roots(cubic))
            verdict.max_re_nondiscarded =
                std::max(verdict.max_re_nondiscarded, sbar * root.real());
        return verdict;
    }

    bool equally_spaced = true;
    for (double b : desc.bearings)
        if (std::abs(std::abs(b) - pi / n) > 1e-9) equally_spaced = false;

    if (lemma_regime && n > 3 && equally_spaced) {
        const CirculantRoots cr = circulant_roots(n);
        verdict.method = StabilityMethod::circulant_roots;
        verdict.eigenvalues.reserve(2 * n);
        double max_re = -std::numeric_limits<double>::infinity();
        const double axis_tol = 1e-9 * std::max(1.0, 2.0 * cr.z * cr.z);
        for (const Complex& root : cr.roots) {
            verdict.eigenvalues.push_back(sbar * root);
            const bool axis_mode = std::abs(root) <= axis_tol ||
                                   std::abs(root - Complex(0, 2)) <= axis_tol ||
                                   std::abs(root - Complex(0, -2)) <= axis_tol;
            if (!axis_mode) max_re = std::max(max_re, std::abs(sbar) * root.real());
        }
        verdict.max_re_nondiscarded = max_re;
        verdict.classification = max_re < 0.0 ? StabilityClass::asymptotically_stable
                                              : StabilityClass::unstable;
        return verdict;
    }

    // generic route: spectrum of the reduced matrix, expected imaginary-axis
    // modes (one zero, the +-j*2vs pair) set aside
    const ReducedSystem red = reduce(xi_bar, params);
    verdict.method = StabilityMethod::generic_eigen;
    verdict.eigenvalues = eigvals(red.assembled);

    double radius = 0.0;
    for (const Complex& l : verdict.eigenvalues) radius = std::max(radius, std::abs(l));
    const double thr = 1e-6 * std::max(1.0, radius);
    const double omega_bar = 2.0 * params.v * sbar;

    auto discard_nearest = [&](std::vector<Complex>& pool, Complex target) -> bool {
        int best = -1;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < pool.size(); ++i) {
            const double d = std::abs(pool[i] - target);
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(i);
            }
        }
        if (best < 0 || best_d > thr) return false;
        pool.erase(pool.begin() + best);
        return true;
    };

    std::vector<Complex> working = verdict.eigenvalues;  // evidence keeps the full set
    const bool found_expected = discard_nearest(working, Complex(0, 0)) &&
                                discard_nearest(working, Complex(0, omega_bar)) &&
                                discard_nearest(working, Complex(0, -omega_bar));
    if (!found_expected) {
        verdict.classification = StabilityClass::inconclusive;
        verdict.max_re_nondiscarded = std::numeric_limits<double>::quiet_NaN();
        return verdict;
    }

    double max_re = -std::numeric_limits<double>::infinity();
    bool near_axis = false;
    for (const Complex& l : working) {
        max_re = std::max(max_re, l.real());
        if (std::abs(l.real()) <= thr) near_axis = true;
    }
    verdict.max_re_nondiscarded = max_re;
    if (near_axis) verdict.classification = StabilityClass::inconclusive;
    else if (max_re < 0.0) verdict.classification = StabilityClass::asymptotically_stable;
    else verdict.classification = StabilityClass::unstable;
    return verdict;
}

}  // namespace pursuit
