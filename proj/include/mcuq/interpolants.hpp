#pragma once

// 1D edge kernels (divided differences and the three crossing solvers) and
// the tri-cubic Lagrange evaluator used for cell refinement.
//
// All crossing parameters are normalized: alpha = (x - x_i) / h in [0, 1].

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mcuq/errors.hpp"
#include "mcuq/roots.hpp"
#include "mcuq/stencil.hpp"
#include "mcuq/volume.hpp"

namespace mcuq {

enum class Method : std::uint8_t { Linear, Cubic, Weno };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Linear: return "linear";
    case Method::Cubic: return "cubic";
    case Method::Weno: return "weno";
  }
  return "unknown";
}

inline char method_letter(Method m) {
  switch (m) {
    case Method::Linear: return 'L';
    case Method::Cubic: return 'C';
    case Method::Weno: return 'W';
  }
  return '?';
}

inline Method parse_method(std::string_view s) {
  if (s == "linear" || s == "L" || s == "l") return Method::Linear;
  if (s == "cubic" || s == "C" || s == "c") return Method::Cubic;
  if (s == "weno" || s == "WENO" || s == "W" || s == "w") return Method::Weno;
  throw std::invalid_argument("unknown interpolation method '" + std::string(s) + "'");
}

struct CrossingSolution {
  double alpha = 0.5;
  Method method = Method::Linear;
  /// False when a high-order solver found no root in [0,1] and the linear
  /// crossing was substituted, or when the edge is degenerate.
  bool valid = true;
  /// Both endpoints equal: alpha is the midpoint by convention.
  bool degenerate = false;
};

/// Newton divided difference U[x_0, ..., x_n] of the given (x, f) pairs.
inline double divided_difference(std::span<const std::pair<double, double>> points) {
  if (points.empty()) throw std::invalid_argument("divided_difference: need at least one point");
  for (std::size_t a = 0; a < points.size(); ++a)
    for (std::size_t b = a + 1; b < points.size(); ++b)
      if (points[a].first == points[b].first)
        throw std::invalid_argument("divided_difference: duplicate abscissa");
  std::vector<double> table(points.size());
  for (std::size_t a = 0; a < points.size(); ++a) table[a] = points[a].second;
  for (std::size_t order = 1; order < points.size(); ++order)
    for (std::size_t a = 0; a + order < points.size(); ++a)
      table[a] = (table[a + 1] - table[a]) / (points[a + order].first - points[a].first);
  return table[0];
}

inline double divided_difference(std::initializer_list<std::pair<double, double>> points) {
  return divided_difference(std::span<const std::pair<double, double>>(points.begin(), points.size()));
}

namespace detail {

inline void check_crossing(double f0, double f1, double k, const char* who) {
  if (f0 == f1) throw DegenerateEdgeError(std::string(who) + ": endpoint values are equal");
  if ((f0 - k) * (f1 - k) > 0.0) throw NoCrossingError(std::string(who) + ": isovalue not bracketed by the edge");
}

inline double linear_alpha(double f0, double f1, double k) {
  const double a = (k - f0) / (f1 - f0);
  return std::clamp(a, 0.0, 1.0);
}

inline CrossingSolution pick_root(const Poly4& p, double k, double f0, double f1, Method method) {
  Poly4 shifted = p;
  shifted[0] -= k;
  const auto roots = roots_in_unit_interval(shifted);
  if (roots.empty()) return {linear_alpha(f0, f1, k), method, false, false};
  return {median_root(roots), method, true, false};
}

}  // namespace detail

inline CrossingSolution linear_crossing(double f0, double f1, double k) {
  detail::check_crossing(f0, f1, k, "linear_crossing");
  return {detail::linear_alpha(f0, f1, k), Method::Linear, true, false};
}

/// Endpoint derivative scheme for the Hermite cubic.
enum class DerivativeScheme : std::uint8_t {
  /// Derivative of the cubic through f_{i-1..i+2}; the Hermite cubic then
  /// coincides with that Lagrange cubic (fourth-order crossings).
  FourPoint,
  /// Centered second-order differences (Catmull-Rom; third-order crossings).
  Centered,
};

/// Hermite cubic on [0,1] from endpoint values and h-scaled derivatives.
inline Poly4 hermite_poly(double f0, double f1, double d0, double d1) {
  return {f0, d0, -3.0 * f0 + 3.0 * f1 - 2.0 * d0 - d1, 2.0 * f0 - 2.0 * f1 + d0 + d1, 0.0};
}

inline Poly4 cubic_edge_poly(const EdgeStencil& s, DerivativeScheme scheme = DerivativeScheme::FourPoint) {
  const double fm1 = s.at(-1), f0 = s.at(0), f1 = s.at(1), f2 = s.at(2);
  double d0 = 0.0, d1 = 0.0;
  if (scheme == DerivativeScheme::FourPoint) {
    d0 = (-2.0 * fm1 - 3.0 * f0 + 6.0 * f1 - f2) / 6.0;
    d1 = (fm1 - 6.0 * f0 + 3.0 * f1 + 2.0 * f2) / 6.0;
  } else {
    d0 = 0.5 * (f1 - fm1);
    d1 = 0.5 * (f2 - f0);
  }
  return hermite_poly(f0, f1, d0, d1);
}

/// Crossing of the Hermite cubic through the edge endpoints. Several roots in
/// [0,1] resolve to the median; no root falls back to linear with valid=false.
inline CrossingSolution cubic_crossing(const EdgeStencil& s, double k,
                                       DerivativeScheme scheme = DerivativeScheme::FourPoint) {
  const double f0 = s.at(0), f1 = s.at(1);
  detail::check_crossing(f0, f1, k, "cubic_crossing");
  return detail::pick_root(cubic_edge_poly(s, scheme), k, f0, f1, Method::Cubic);
}

/// Crossing of a Hermite cubic with caller-supplied h-scaled derivatives.
inline CrossingSolution hermite_crossing(double f0, double f1, double d0, double d1, double k) {
  detail::check_crossing(f0, f1, k, "hermite_crossing");
  return detail::pick_root(hermite_poly(f0, f1, d0, d1), k, f0, f1, Method::Cubic);
}

// ---------------------------------------------------------------------------
// WENO

struct WenoDiagnostics {
  static constexpr std::array<double, 3> gammas{0.1, 0.6, 0.3};
  static constexpr double epsilon = 1e-6;

  std::array<double, 3> betas{};
  /// Unnormalized weights gamma_j / (epsilon + beta_j)^2.
  std::array<double, 3> alphas{};
  std::array<double, 3> weights{};
};

/// Monomial coefficients (in t) of the polynomial interpolating values[m] at
/// the integer nodes first_node + m, m = 0..4.
inline Poly4 lagrange_quartic(int first_node, const std::array<double, 5>& values) {
  // Newton form on nodes t_m, expanded into monomials.
  std::array<double, 5> dd = values;
  for (int order = 1; order < 5; ++order)
    for (int m = 4; m >= order; --m) dd[static_cast<std::size_t>(m)] = (dd[static_cast<std::size_t>(m)] - dd[static_cast<std::size_t>(m - 1)]) / order;
  Poly4 result{};
  Poly4 basis{1.0, 0.0, 0.0, 0.0, 0.0};  // prod_{l<m} (t - t_l)
  for (int m = 0; m < 5; ++m) {
    for (std::size_t d = 0; d < 5; ++d) result[d] += dd[static_cast<std::size_t>(m)] * basis[d];
    const double node = first_node + m;
    Poly4 next{};
    for (std::size_t d = 0; d < 5; ++d) {
      if (d + 1 < 5) next[d + 1] += basis[d];
      next[d] -= node * basis[d];
    }
    basis = next;
  }
  return result;
}

/// Smoothness indicators and nonlinear weights of the five-point window
/// f_{i-2..i+2}.
inline WenoDiagnostics weno_weights(const WenoStencil& s) {
  const double fm2 = s.at(-2), fm1 = s.at(-1), f0 = s.at(0), f1 = s.at(1), f2 = s.at(2);
  auto sq = [](double v) { return v * v; };
  WenoDiagnostics d;
  d.betas = {13.0 / 12.0 * sq(fm2 - 2.0 * fm1 + f0) + 0.25 * sq(fm2 - 4.0 * fm1 + 3.0 * f0),
             13.0 / 12.0 * sq(fm1 - 2.0 * f0 + f1) + 0.25 * sq(fm1 - f1),
             13.0 / 12.0 * sq(f0 - 2.0 * f1 + f2) + 0.25 * sq(3.0 * f0 - 4.0 * f1 + f2)};
  double total = 0.0;
  for (std::size_t j = 0; j < 3; ++j) {
    d.alphas[j] = WenoDiagnostics::gammas[j] / sq(WenoDiagnostics::epsilon + d.betas[j]);
    total += d.alphas[j];
  }
  for (std::size_t j = 0; j < 3; ++j) d.weights[j] = d.alphas[j] / total;
  return d;
}

/// WENO interpolant on the edge: convex combination of the quartic Lagrange
/// interpolants on the left-biased {i-3..i+1}, central {i-2..i+2} and
/// right-biased {i-1..i+3} substencils. Each substencil contains both edge
/// endpoints, so the combination interpolates f_i and f_{i+1} for any weights.
inline std::pair<Poly4, WenoDiagnostics> weno_poly(const WenoStencil& s) {
  const WenoDiagnostics d = weno_weights(s);
  Poly4 p{};
  for (int j = 0; j < 3; ++j) {
    std::array<double, 5> vals{};
    for (int m = 0; m < 5; ++m) vals[static_cast<std::size_t>(m)] = s.at(j - 3 + m);
    const Poly4 sub = lagrange_quartic(j - 3, vals);
    for (std::size_t c = 0; c < 5; ++c) p[c] += d.weights[static_cast<std::size_t>(j)] * sub[c];
  }
  return {p, d};
}

inline std::pair<CrossingSolution, WenoDiagnostics> weno_crossing(const WenoStencil& s, double k) {
  const double f0 = s.at(0), f1 = s.at(1);
  detail::check_crossing(f0, f1, k, "weno_crossing");
  auto [p, diag] = weno_poly(s);
  return {detail::pick_root(p, k, f0, f1, Method::Weno), diag};
}

// ---------------------------------------------------------------------------
// Tri-cubic Lagrange

/// Cubic Lagrange basis on nodes -1, 0, 1, 2 and its derivative at t.
inline void cubic_lagrange_basis(double t, std::array<double, 4>& w, std::array<double, 4>& dw) {
  const double a = t + 1.0, b = t, c = t - 1.0, e = t - 2.0;
  w = {-b * c * e / 6.0, a * c * e / 2.0, -a * b * e / 2.0, a * b * c / 6.0};
  dw = {-(c * e + b * e + b * c) / 6.0, (c * e + a * e + a * c) / 2.0, -(b * e + a * e + a * b) / 2.0,
        (b * c + a * c + a * b) / 6.0};
}

struct TricubicSample {
  double value = 0.0;
  /// Partial derivatives with respect to the local cell coordinates.
  Vec3 gradient_local{};
};

inline void check_cell(const ScalarGrid& grid, const CellId& cell) {
  const Dims d = grid.dims();
  if (d.nx < 2 || d.ny < 2 || d.nz < 2 || cell.i + 1 >= d.nx || cell.j + 1 >= d.ny || cell.k + 1 >= d.nz)
    throw std::out_of_range("cell outside grid");
}

/// Tensor-product cubic Lagrange interpolant of the 4x4x4 node block around
/// the cell, evaluated at local coordinates (0..1 spans the cell).
inline TricubicSample tricubic_sample(const ScalarGrid& grid, const CellId& cell, const Vec3& local,
                                      BoundaryPolicy policy = BoundaryPolicy::Clamp) {
  check_cell(grid, cell);
  std::array<double, 4> wx, wy, wz, dx, dy, dz;
  cubic_lagrange_basis(local.x, wx, dx);
  cubic_lagrange_basis(local.y, wy, dy);
  cubic_lagrange_basis(local.z, wz, dz);
  const auto ci = static_cast<std::ptrdiff_t>(cell.i), cj = static_cast<std::ptrdiff_t>(cell.j),
             ck = static_cast<std::ptrdiff_t>(cell.k);
  TricubicSample out;
  for (std::size_t c = 0; c < 4; ++c) {
    double v_y = 0.0, gx_y = 0.0, gy_y = 0.0;
    for (std::size_t b = 0; b < 4; ++b) {
      double v_x = 0.0, gx_x = 0.0;
      for (std::size_t a = 0; a < 4; ++a) {
        const double f = grid.at_resolved(ci - 1 + static_cast<std::ptrdiff_t>(a), cj - 1 + static_cast<std::ptrdiff_t>(b),
                                          ck - 1 + static_cast<std::ptrdiff_t>(c), policy);
        v_x += wx[a] * f;
        gx_x += dx[a] * f;
      }
      v_y += wy[b] * v_x;
      gx_y += wy[b] * gx_x;
      gy_y += dy[b] * v_x;
    }
    out.value += wz[c] * v_y;
    out.gradient_local.x += wz[c] * gx_y;
    out.gradient_local.y += wz[c] * gy_y;
    out.gradient_local.z += dz[c] * v_y;
  }
  return out;
}

inline double tricubic_eval(const ScalarGrid& grid, const CellId& cell, const Vec3& local,
                            BoundaryPolicy policy = BoundaryPolicy::Clamp) {
  return tricubic_sample(grid, cell, local, policy).value;
}

/// Trilinear interpolation of the 8 cell corners, with local gradient.
inline TricubicSample trilinear_sample(const ScalarGrid& grid, const CellId& cell, const Vec3& local) {
  check_cell(grid, cell);
  TricubicSample out;
  for (std::size_t c = 0; c < 2; ++c)
    for (std::size_t b = 0; b < 2; ++b)
      for (std::size_t a = 0; a < 2; ++a) {
        const double wx = a ? local.x : 1.0 - local.x, wy = b ? local.y : 1.0 - local.y, wz = c ? local.z : 1.0 - local.z;
        const double sx = a ? 1.0 : -1.0, sy = b ? 1.0 : -1.0, sz = c ? 1.0 : -1.0;
        const double f = grid.at(cell.i + a, cell.j + b, cell.k + c);
        out.value += wx * wy * wz * f;
        out.gradient_local.x += sx * wy * wz * f;
        out.gradient_local.y += wx * sy * wz * f;
        out.gradient_local.z += wx * wy * sz * f;
      }
  return out;
}

inline double trilinear_eval(const ScalarGrid& grid, const CellId& cell, const Vec3& local) {
  return trilinear_sample(grid, cell, local).value;
}

}  // namespace mcuq
