#pragma once

#include <cmath>
#include <numbers>

#include "pursuit/errors.hpp"

namespace pursuit {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Wrap an angle into [-pi, pi).
///
/// std::remainder is exact in IEEE arithmetic and lands in [-pi, pi]; only the
/// closed upper endpoint needs folding.
inline double wrap_angle(double x) {
    if (!std::isfinite(x)) throw geometry_error("wrap_angle: non-finite angle");
    double r = std::remainder(x, two_pi);
    if (r >= pi) r -= two_pi;
    return r;
}

/// |wrap(a - b)| <= tol, i.e. equality of angles modulo 2*pi.
inline bool angles_equal(double a, double b, double tol) {
    return std::abs(wrap_angle(a - b)) <= tol;
}

}  // namespace pursuit
