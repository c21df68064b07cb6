#pragma once

// Edge-crossing error of linear interpolation, estimated from second divided
// differences, plus the classical h^2 bound and CDF / threshold helpers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "mcuq/extractor.hpp"
#include "mcuq/stencil.hpp"

namespace mcuq {

struct EdgeErrorEstimate {
  double e_approx = 0.0;
  double e_bound = 0.0;
  double u_second_left = 0.0;   // U[i-1, i+1]
  double u_second_right = 0.0;  // U[i, i+2]
  double u_slope = 0.0;         // U[i, i+1]
  bool fallback_used = false;
  bool slope_near_zero = false;
};

enum ErrorFlag : std::uint32_t {
  kFlagFallback = 1u << 0,
  kFlagSlopeNearZero = 1u << 1,
  kFlagDegenerate = 1u << 2,
};

/// alpha_bar is the linear crossing parameter on the edge. Estimates are in
/// world units along the edge axis. Slopes at or below slope_floor clamp both
/// values to one edge length.
inline EdgeErrorEstimate estimate_edge_error(const EdgeStencil& s, double alpha_bar, double slope_floor = 0.0) {
  const double h = s.h;
  EdgeErrorEstimate e;
  e.u_slope = (s.at(1) - s.at(0)) / h;
  e.u_second_left = (s.at(1) - 2.0 * s.at(0) + s.at(-1)) / (2.0 * h * h);
  e.u_second_right = (s.at(2) - 2.0 * s.at(1) + s.at(0)) / (2.0 * h * h);
  if (!(std::abs(e.u_slope) > slope_floor)) {
    e.slope_near_zero = true;
    e.e_approx = e.e_bound = h;
    return e;
  }
  const double ratio = std::max(std::abs(e.u_second_left), std::abs(e.u_second_right)) / std::abs(e.u_slope);
  const double a = std::clamp(alpha_bar, 0.0, 1.0);
  // |(x - x_i)(x - x_{i+1})| with x = x_i + a h
  e.e_approx = ratio * a * (1.0 - a) * h * h;
  e.e_bound = ratio * h * h;
  return e;
}

inline double default_slope_floor(const ScalarGrid& grid) { return 1e-12 * grid.max_abs(); }

/// Adds "approx_error", "bound_error" and "error_flags" to an extraction. The
/// estimate always models the linear crossing of each vertex's edge.
inline void add_error_channels(DetailedExtraction& ex, const ScalarGrid& grid, const ExtractionConfig& cfg) {
  const std::size_t n = ex.edges.size();
  std::vector<double> approx(n), bound(n), flags(n);
  const double floor = default_slope_floor(grid);
  parallel_chunks(n, cfg.threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t v = b; v < e; ++v) {
      const EdgeStencil st = edge_stencil(grid, ex.edges[v], cfg.boundary);
      const double f0 = st.at(0), f1 = st.at(1);
      const double alpha = f0 == f1 ? 0.5 : detail::linear_alpha(f0, f1, cfg.isovalue);
      EdgeErrorEstimate est = estimate_edge_error(st, alpha, floor);
      const CrossingSolution& cs = ex.crossings[v];
      est.fallback_used = !cs.valid && !cs.degenerate;
      std::uint32_t bits = 0;
      if (est.fallback_used) bits |= kFlagFallback;
      if (est.slope_near_zero) bits |= kFlagSlopeNearZero;
      if (cs.degenerate) bits |= kFlagDegenerate;
      approx[v] = est.e_approx;
      bound[v] = est.e_bound;
      flags[v] = static_cast<double>(bits);
    }
  });
  ex.mesh.channels["approx_error"] = std::move(approx);
  ex.mesh.channels["bound_error"] = std::move(bound);
  ex.mesh.channels["error_flags"] = std::move(flags);
}

inline IndexedMesh attach_error_channel(const ScalarGrid& grid, const ExtractionConfig& cfg) {
  DetailedExtraction ex = extract_detailed(grid, cfg);
  add_error_channels(ex, grid, cfg);
  return std::move(ex.mesh);
}

// ---------------------------------------------------------------------------
// CDF and thresholds

struct ErrorCdf {
  std::vector<double> values;     // ascending
  std::vector<double> fractions;  // (rank + 1) / N
};

inline ErrorCdf cdf(std::span<const double> channel) {
  ErrorCdf out;
  out.values.assign(channel.begin(), channel.end());
  std::sort(out.values.begin(), out.values.end());
  const double n = static_cast<double>(out.values.size());
  out.fractions.resize(out.values.size());
  for (std::size_t r = 0; r < out.values.size(); ++r) out.fractions[r] = static_cast<double>(r + 1) / n;
  return out;
}

/// 1 where value > t, else 0.
inline std::vector<double> threshold_classify(std::span<const double> channel, double t) {
  std::vector<double> out(channel.size());
  for (std::size_t v = 0; v < channel.size(); ++v) out[v] = channel[v] > t ? 1.0 : 0.0;
  return out;
}

inline double fraction_above(std::span<const double> channel, double t) {
  if (channel.empty()) return 0.0;
  const auto above = std::count_if(channel.begin(), channel.end(), [t](double v) { return v > t; });
  return static_cast<double>(above) / static_cast<double>(channel.size());
}

struct ChannelSummary {
  std::size_t count = 0;
  double min = 0.0;
  double mean = 0.0;
  double rms = 0.0;
  double max = 0.0;
};

inline ChannelSummary summarize(std::span<const double> channel) {
  ChannelSummary s;
  s.count = channel.size();
  if (channel.empty()) return s;
  s.min = *std::min_element(channel.begin(), channel.end());
  s.max = *std::max_element(channel.begin(), channel.end());
  double sum = 0.0, sq = 0.0;
  for (double v : channel) {
    sum += v;
    sq += v * v;
  }
  s.mean = sum / static_cast<double>(s.count);
  s.rms = std::sqrt(sq / static_cast<double>(s.count));
  return s;
}

}  // namespace mcuq
