#pragma once

// Real roots of low-degree polynomials on the unit interval.
//
// Cubics use the closed-form (trigonometric / Cardano) solution followed by a
// Newton polish. Quartics are split into monotone pieces at the critical
// points of their derivative (again a closed-form cubic) and each bracketed
// root is refined with safeguarded Newton.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

namespace mcuq {

/// p(t) = c[0] + c[1] t + c[2] t^2 + c[3] t^3 + c[4] t^4
using Poly4 = std::array<double, 5>;

inline constexpr double kRootWindowSlack = 1e-9;

inline double poly_eval(const Poly4& c, double t) {
  return (((c[4] * t + c[3]) * t + c[2]) * t + c[1]) * t + c[0];
}

inline double poly_derivative(const Poly4& c, double t) {
  return ((4.0 * c[4] * t + 3.0 * c[3]) * t + 2.0 * c[2]) * t + c[1];
}

inline int poly_degree(const Poly4& c) {
  double scale = 0.0;
  for (double v : c) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) return -1;
  for (int d = 4; d > 0; --d)
    if (std::abs(c[static_cast<std::size_t>(d)]) > 1e-13 * scale) return d;
  return 0;
}

namespace detail {

inline void push_quadratic_roots(double a, double b, double c, std::vector<double>& out) {
  if (a == 0.0) {
    if (b != 0.0) out.push_back(-c / b);
    return;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) {
    // Near-tangent: keep the vertex if it is numerically a double root.
    if (disc > -1e-14 * (b * b + std::abs(4.0 * a * c))) out.push_back(-b / (2.0 * a));
    return;
  }
  const double s = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(s, b));
  if (q != 0.0) {
    out.push_back(q / a);
    out.push_back(c / q);
  } else {
    out.push_back(0.0);
  }
}

}  // namespace detail

/// All real roots of a t^3 + b t^2 + c t + d, unsorted. Lower-degree inputs
/// (vanishing leading coefficients) fall through to the quadratic/linear case.
inline std::vector<double> solve_cubic_real(double a, double b, double c, double d) {
  std::vector<double> roots;
  const double scale = std::max({std::abs(a), std::abs(b), std::abs(c), std::abs(d)});
  if (scale == 0.0) return roots;
  if (std::abs(a) <= 1e-13 * scale) {
    detail::push_quadratic_roots(std::abs(b) <= 1e-13 * scale ? 0.0 : b, c, d, roots);
    return roots;
  }
  const double B = b / a, C = c / a, D = d / a;
  const double shift = B / 3.0;
  const double p = C - B * B / 3.0;
  const double q = 2.0 * B * B * B / 27.0 - B * C / 3.0 + D;
  const double half_q = q / 2.0;
  const double third_p = p / 3.0;
  const double disc = half_q * half_q + third_p * third_p * third_p;

  if (p == 0.0) {
    roots.push_back(std::cbrt(-q) - shift);
  } else if (disc > 0.0) {
    const double s = std::sqrt(disc);
    const double u = std::cbrt(-half_q + (half_q <= 0.0 ? s : -s));
    const double v = u != 0.0 ? -third_p / u : 0.0;
    roots.push_back(u + v - shift);
  } else {
    const double m = 2.0 * std::sqrt(-third_p);
    double arg = 3.0 * q / (p * m);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    for (int k = 0; k < 3; ++k) roots.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) - shift);
  }

  // Newton polish against the original coefficients.
  for (double& r : roots) {
    for (int it = 0; it < 3; ++it) {
      const double f = ((a * r + b) * r + c) * r + d;
      const double df = (3.0 * a * r + 2.0 * b) * r + c;
      if (df == 0.0) break;
      const double next = r - f / df;
      if (!std::isfinite(next)) break;
      if (std::abs(((a * next + b) * next + c) * next + d) > std::abs(f)) break;
      r = next;
    }
  }
  return roots;
}

namespace detail {

/// Root of a monotone p on [lo, hi] with p(lo), p(hi) of opposite sign.
inline double bracketed_root(const Poly4& c, double lo, double hi) {
  double flo = poly_eval(c, lo);
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = poly_eval(c, t);
    if (f == 0.0) return t;
    if ((f < 0.0) == (flo < 0.0)) {
      lo = t;
      flo = f;
    } else {
      hi = t;
    }
    const double df = poly_derivative(c, t);
    double next = df != 0.0 ? t - f / df : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 || hi - lo <= 1e-15) return next;
    t = next;
  }
  return t;
}

inline std::vector<double> finalize_roots(std::vector<double> roots, double slack) {
  std::vector<double> kept;
  for (double r : roots) {
    if (!std::isfinite(r) || r < -slack || r > 1.0 + slack) continue;
    kept.push_back(std::clamp(r, 0.0, 1.0));
  }
  std::sort(kept.begin(), kept.end());
  std::vector<double> unique;
  for (double r : kept)
    if (unique.empty() || r - unique.back() > 1e-10) unique.push_back(r);
  return unique;
}

}  // namespace detail

/// Sorted distinct real roots of p in [0, 1], accepting roots within `slack`
/// of the interval and clamping them onto it.
inline std::vector<double> roots_in_unit_interval(const Poly4& c, double slack = kRootWindowSlack) {
  const int deg = poly_degree(c);
  if (deg <= 0) return {};
  if (deg <= 3) return detail::finalize_roots(solve_cubic_real(c[3], c[2], c[1], c[0]), slack);

  std::vector<double> breaks{-slack};
  for (double r : solve_cubic_real(4.0 * c[4], 3.0 * c[3], 2.0 * c[2], c[1]))
    if (r > -slack && r < 1.0 + slack) breaks.push_back(r);
  breaks.push_back(1.0 + slack);
  std::sort(breaks.begin(), breaks.end());

  std::vector<double> roots;
  for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
    const double lo = breaks[s], hi = breaks[s + 1];
    const double flo = poly_eval(c, lo), fhi = poly_eval(c, hi);
    if (flo == 0.0) roots.push_back(lo);
    if (fhi == 0.0) roots.push_back(hi);
    if (flo != 0.0 && fhi != 0.0 && (flo < 0.0) != (fhi < 0.0)) roots.push_back(detail::bracketed_root(c, lo, hi));
  }
  // Tangential roots at critical points (even multiplicity).
  const double scale = std::max({std::abs(c[0]), std::abs(c[1]), std::abs(c[2]), std::abs(c[3]), std::abs(c[4])});
  for (std::size_t s = 1; s + 1 < breaks.size(); ++s)
    if (std::abs(poly_eval(c, breaks[s])) <= 1e-14 * scale) roots.push_back(breaks[s]);
  return detail::finalize_roots(std::move(roots), slack);
}

/// Middle element of a sorted root list (lower middle for even counts).
inline double median_root(const std::vector<double>& sorted_roots) {
  return sorted_roots[(sorted_roots.size() - 1) / 2];
}

}  // namespace mcuq
