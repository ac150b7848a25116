#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "pursuit/control.hpp"
#include "pursuit/geometry.hpp"

namespace pursuit {

using Complex = std::complex<double>;

/// Eigenvalues of a dense real matrix, sorted so conjugate pairs sit next to
/// each other (ascending real part, then ascending |imag|, + before -).
/// Throws analysis_error if the solver fails to converge.
std::vector<Complex> eigvals(const Eigen::MatrixXd& M);

/// Polynomial helpers on coefficient vectors in ascending order
/// (coeffs[i] multiplies lambda^i).
namespace poly {

std::vector<double> multiply(std::span<const double> a, std::span<const double> b);

/// Long division; returns {quotient, remainder}.
std::pair<std::vector<double>, std::vector<double>> divide(std::span<const double> numerator,
                                                           std::span<const double> denominator);

double eval(std::span<const double> coeffs, double x);

/// Roots via the companion matrix of the monic normalization.
std::vector<Complex> roots(std::span<const double> coeffs);

}  // namespace poly

/// The implicit characteristic polynomial
///   P(lambda) = prod(lambda^2 + 2 z_i lambda + 2 z_i^2) - prod(2 z_i^2 - 2 lambda)
/// with z_i = 1 + sign(s) * cot(alpha_i), together with the cofactor of the
/// guaranteed (lambda^3 + 4 lambda) factor. Valid in the k = +-2v, v = 1,
/// k*sign(s) < 0 regime; eigenvalues of the reduced system equal s * roots.
struct CharPoly {
    std::vector<double> coeffs;          // degree 2n, ascending, leading 1
    std::vector<double> reduced_coeffs;  // P / (lambda^3 + 4 lambda), degree 2n-3, monic
    std::vector<double> z_values;
};

/// Expand the products, subtract, and divide out lambda^3 + 4*lambda. A
/// nonvanishing remainder (relative to the coefficient scale) signals bearings
/// outside the regime and raises analysis_error.
CharPoly implicit_charpoly(std::span<const double> bearings, int rotation_sign);

enum class RouthVerdict { hurwitz, not_hurwitz, marginal };

struct RouthTable {
    std::vector<std::vector<double>> rows;
    RouthVerdict verdict = RouthVerdict::marginal;
    int sign_changes = 0;
    bool zero_pivot = false;
};

/// Routh array of a polynomial given in ascending coefficients. Zero pivots
/// are continued with +-epsilon substitution: a consistent positive
/// sign-change count means not-Hurwitz, anything else is marginal. An all-zero
/// row is replaced by the auxiliary-polynomial derivative.
RouthTable routh_hurwitz(std::span<const double> coeffs);

/// Closed-form coefficients of the reduced cubic for n = 3, plus the gap
/// a2*a1 - a0. The two equivalent expressions for a0 must agree to 1e-8
/// relative, otherwise analysis_error.
struct N3Coefficients {
    double a2 = 0.0, a1 = 0.0, a0 = 0.0;
    double gap = 0.0;  // a2*a1 - a0
};

N3Coefficients n3_coefficients(double z1, double z2, double z3);

enum class StabilityClass { asymptotically_stable, unstable, inconclusive };
enum class StabilityMethod { trace_n2, routh_n3, circulant_roots, generic_eigen };

struct StabilityVerdict {
    StabilityClass classification = StabilityClass::inconclusive;
    StabilityMethod method = StabilityMethod::generic_eigen;
    std::vector<Complex> eigenvalues;  // evidence (reduced-system spectrum)
    std::optional<RouthTable> routh;
    int discarded_modes = 0;  // n+1 zeros plus the +-j*2vs pair
    double max_re_nondiscarded = 0.0;
};

/// n = 2: the single eigenvalue off the imaginary axis equals the trace
/// 2*k*sbar; stable iff k*sign(sbar) < 0.
StabilityVerdict n2_stability(const FleetRelativeState& xi_bar, const ControlParams& params);

/// Per-root bookkeeping of the equally-spaced closed-form solution.
struct RootCaseRecord {
    int index = 0;       // i in 1..n
    double phi = 0.0;    // 2*(i-1)*pi/n
    Complex omega_root;  // e^{j*phi}
    double a1 = 0.0, b1 = 0.0;  // -(z + omega^{i-1})
    Complex Phi;                // (z + w)^2 - 2 z^2 (1 - w)
    double a2 = 0.0, b2 = 0.0;  // principal sqrt(Phi), a2 >= 0
    double Delta = 0.0;         // middle-case positivity certificate
    /// Re(sqrt(Phi)) ~ 0, i.e. the +- branches merely swap a conjugate pair
    /// (phi = pi with even n); the root multiset is unaffected.
    bool branch_ambiguous = false;
};

struct CirculantRoots {
    double z = 0.0;  // 1 + cot(pi/n)
    std::vector<Complex> roots;  // 2n roots of P
    std::vector<RootCaseRecord> cases;
};

/// All 2n roots lambda = -(z+w) +- sqrt((z+w)^2 - 2 z^2 (1-w)) over the n-th
/// roots of unity w, for the equally spaced formation in the v=1, |k|=2v,
/// k*sign(s)<0 regime. Reduced-system eigenvalues are sbar times these.
CirculantRoots circulant_roots(int n);

/// Equilibrium bearing of the n = 2 variant law: (pi - beta0)/2 for k < 0,
/// (-pi - beta0)/2 for k > 0. beta0 = -pi (identical headings) is rejected.
double variant_equilibrium_bearing(double beta0, double k);

/// Lyapunov certificate of the variant law: value and time derivative at
/// bearing alpha.
std::pair<double, double> lyapunov_variant(double alpha, double beta0, double k);

/// Classify a circular equilibrium, choosing the sharpest applicable method:
/// trace for n=2, the reduced cubic's Routh test for regular n=3 at k=+-2v,
/// the closed-form roots for equally spaced n>3 at k=+-2v, and otherwise the
/// spectrum of the reduced matrix with the analytically known imaginary-axis
/// modes set aside. cross_check_full additionally verifies that the full
/// 3n x 3n spectrum equals the reduced one plus n zeros and throws
/// analysis_error when it does not.
StabilityVerdict stability_report(const FleetRelativeState& xi_bar, const ControlParams& params,
                                  bool cross_check_full = false);

}  // namespace pursuit
