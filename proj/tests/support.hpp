#pragma once

// Shared fixtures for the test suites and the acceptance binary.

#include <chrono>
#include <cmath>
#include <vector>

#include "mcuq/mcuq.hpp"

namespace mcuq::testing {

inline ScalarGrid field_grid(FieldKind kind, std::size_t n, std::map<std::string, double> params = {}) {
  return sample_to_grid(make_field(kind, params), Dims{n, n, n}, default_domain(kind));
}

inline ScalarGrid field_grid(FieldKind kind, std::size_t n, const Box& domain, std::map<std::string, double> params = {}) {
  return sample_to_grid(make_field(kind, params), Dims{n, n, n}, domain);
}

/// f = x - 0.5 on [0,1]^3.
inline ScalarGrid plane_grid(std::size_t n) {
  return field_grid(FieldKind::AxisLinear, n, Box{{0, 0, 0}, {1, 1, 1}}, {{"d", -0.5}});
}

/// Box around the teardrop neck used by the recovery checks.
inline Box teardrop_neck_box() { return {{-0.4, -0.25, -0.25}, {0.4, 0.25, 0.25}}; }

inline IndexedMesh triangles_in_box(const IndexedMesh& mesh, const Box& box) {
  return filter_triangles(mesh, [&](std::size_t t) { return box.contains(triangle_centroid(mesh, mesh.triangles[t])); });
}

template <class Fn>
double time_ms(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

/// Best of `reps` runs, in ms.
template <class Fn>
double best_ms(int reps, Fn&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) best = std::min(best, time_ms(fn));
  return best;
}

/// 1D crossing harness on f = sin(x) with nodes x_i = i h. For each target
/// root x*, the edge containing it is solved for k = sin(x*) and the
/// position error |x_i + alpha h - x*| is recorded; returns the max.
inline double sin_crossing_error(Method method, double h) {
  static const double targets[] = {0.31, 0.47, 0.73, 0.89, 1.07};
  double worst = 0.0;
  for (double xs : targets) {
    const double k = std::sin(xs);
    const auto i = static_cast<long>(std::floor(xs / h));
    auto f = [&](long m) { return std::sin(static_cast<double>(i + m) * h); };
    double alpha = 0.0;
    switch (method) {
      case Method::Linear: alpha = linear_crossing(f(0), f(1), k).alpha; break;
      case Method::Cubic: alpha = cubic_crossing(EdgeStencil(f(-1), f(0), f(1), f(2), h), k).alpha; break;
      case Method::Weno:
        alpha = weno_crossing(WenoStencil({f(-3), f(-2), f(-1), f(0), f(1), f(2), f(3)}, h), k).first.alpha;
        break;
    }
    worst = std::max(worst, std::abs((static_cast<double>(i) + alpha) * h - xs));
  }
  return worst;
}

/// Least-squares slope of log(error) against log(h) over `levels` dyadic
/// refinements of h0.
inline double fitted_order(Method method, double h0 = 0.4, int levels = 6) {
  std::vector<double> lx, ly;
  for (int m = 0; m < levels; ++m) {
    const double h = h0 / std::pow(2.0, m);
    lx.push_back(std::log(h));
    ly.push_back(std::log(sin_crossing_error(method, h)));
  }
  const double n = static_cast<double>(lx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t q = 0; q < lx.size(); ++q) {
    sx += lx[q];
    sy += ly[q];
    sxx += lx[q] * lx[q];
    sxy += lx[q] * ly[q];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace mcuq::testing
