#pragma once

// Sampled surface-to-surface distance, topology counts and rank correlation.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mcuq/mesh.hpp"
#include "mcuq/parallel.hpp"

namespace mcuq {

inline constexpr std::uint64_t kSamplingSeed = 0x49534F55;

/// Closest point on triangle abc to p.
inline Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = dot(ab, ap), d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return a;
  const Vec3 bp = p - b;
  const double d3 = dot(ab, bp), d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return b;
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + ab * (d1 / (d1 - d3));
  const Vec3 cp = p - c;
  const double d5 = dot(ab, cp), d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return c;
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + ac * (d2 / (d2 - d6));
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) return b + (c - b) * ((d4 - d3) / ((d4 - d3) + (d5 - d6)));
  const double denom = va + vb + vc;
  if (denom == 0.0) {
    // Degenerate (collinear) triangle: best of the three edges.
    auto seg = [&](const Vec3& s0, const Vec3& s1) {
      const Vec3 d = s1 - s0;
      const double len2 = dot(d, d);
      const double t = len2 > 0.0 ? std::clamp(dot(p - s0, d) / len2, 0.0, 1.0) : 0.0;
      return s0 + d * t;
    };
    Vec3 best = seg(a, b);
    for (const Vec3& q : {seg(b, c), seg(c, a)})
      if (distance(p, q) < distance(p, best)) best = q;
    return best;
  }
  const double v = vb / denom, w = vc / denom;
  return a + ab * v + ac * w;
}

inline double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  return distance(p, closest_point_on_triangle(p, a, b, c));
}

/// Uniform-grid index over a mesh's triangles answering exact nearest-surface
/// distance queries.
class TriangleIndex {
 public:
  explicit TriangleIndex(const IndexedMesh& mesh) : mesh_(mesh) {
    if (mesh.triangles.empty()) throw std::invalid_argument("TriangleIndex: mesh has no triangles");
    const Box b = mesh_bounds(mesh);
    lo_ = b.lo;
    const Vec3 extent = b.hi - b.lo;

    std::vector<double> lengths;
    lengths.reserve(mesh.triangles.size() * 3);
    for (const auto& t : mesh.triangles)
      for (int e = 0; e < 3; ++e)
        lengths.push_back(distance(mesh.vertices[t[static_cast<std::size_t>(e)]], mesh.vertices[t[static_cast<std::size_t>((e + 1) % 3)]]));
    std::nth_element(lengths.begin(), lengths.begin() + static_cast<std::ptrdiff_t>(lengths.size() / 2), lengths.end());
    double cs = lengths[lengths.size() / 2];
    const double max_extent = std::max({extent.x, extent.y, extent.z});
    if (!(cs > 0.0)) cs = max_extent > 0.0 ? max_extent / 64.0 : 1.0;
    cs = std::max(cs, max_extent / 256.0);
    cell_ = cs;
    for (std::size_t a = 0; a < 3; ++a) n_[a] = static_cast<std::size_t>(std::floor(extent[a] / cs)) + 1;

    std::vector<std::uint32_t> counts(n_[0] * n_[1] * n_[2] + 1, 0);
    auto range = [&](const Triangle& t, std::array<std::size_t, 3>& c0, std::array<std::size_t, 3>& c1) {
      Vec3 tlo = mesh.vertices[t[0]], thi = tlo;
      for (int q = 1; q < 3; ++q) {
        tlo = cwise_min(tlo, mesh.vertices[t[static_cast<std::size_t>(q)]]);
        thi = cwise_max(thi, mesh.vertices[t[static_cast<std::size_t>(q)]]);
      }
      for (std::size_t a = 0; a < 3; ++a) {
        c0[a] = cell_coord(tlo[a], a);
        c1[a] = cell_coord(thi[a], a);
      }
    };
    std::array<std::size_t, 3> c0{}, c1{};
    for (const auto& t : mesh.triangles) {
      range(t, c0, c1);
      for (std::size_t z = c0[2]; z <= c1[2]; ++z)
        for (std::size_t y = c0[1]; y <= c1[1]; ++y)
          for (std::size_t x = c0[0]; x <= c1[0]; ++x) ++counts[flat(x, y, z) + 1];
    }
    std::partial_sum(counts.begin(), counts.end(), counts.begin());
    offsets_ = counts;
    items_.resize(offsets_.back());
    std::vector<std::uint32_t> fill(offsets_.begin(), offsets_.end() - 1);
    for (std::uint32_t ti = 0; ti < mesh.triangles.size(); ++ti) {
      range(mesh.triangles[ti], c0, c1);
      for (std::size_t z = c0[2]; z <= c1[2]; ++z)
        for (std::size_t y = c0[1]; y <= c1[1]; ++y)
          for (std::size_t x = c0[0]; x <= c1[0]; ++x) items_[fill[flat(x, y, z)]++] = ti;
    }
  }

  /// Scratch space for one querying thread.
  struct Scratch {
    std::vector<std::uint32_t> stamp;
    std::uint32_t query = 0;
  };

  Scratch make_scratch() const { return {std::vector<std::uint32_t>(mesh_.triangles.size(), 0), 0}; }

  double distance_to(const Vec3& p, Scratch& scratch) const {
    if (++scratch.query == 0) {
      std::fill(scratch.stamp.begin(), scratch.stamp.end(), 0);
      scratch.query = 1;
    }
    std::array<std::ptrdiff_t, 3> c{};
    for (std::size_t a = 0; a < 3; ++a) c[a] = static_cast<std::ptrdiff_t>(cell_coord(p[a], a));
    const auto max_r = static_cast<std::ptrdiff_t>(std::max({n_[0], n_[1], n_[2]}));
    double best = std::numeric_limits<double>::infinity();
    for (std::ptrdiff_t r = 0; r <= max_r; ++r) {
      for (std::ptrdiff_t dz = -r; dz <= r; ++dz)
        for (std::ptrdiff_t dy = -r; dy <= r; ++dy)
          for (std::ptrdiff_t dx = -r; dx <= r; ++dx) {
            if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != r) continue;
            const std::ptrdiff_t x = c[0] + dx, y = c[1] + dy, z = c[2] + dz;
            if (x < 0 || y < 0 || z < 0 || x >= static_cast<std::ptrdiff_t>(n_[0]) ||
                y >= static_cast<std::ptrdiff_t>(n_[1]) || z >= static_cast<std::ptrdiff_t>(n_[2]))
              continue;
            const std::size_t cell = flat(static_cast<std::size_t>(x), static_cast<std::size_t>(y), static_cast<std::size_t>(z));
            for (std::uint32_t q = offsets_[cell]; q < offsets_[cell + 1]; ++q) {
              const std::uint32_t ti = items_[q];
              if (scratch.stamp[ti] == scratch.query) continue;
              scratch.stamp[ti] = scratch.query;
              const auto& t = mesh_.triangles[ti];
              best = std::min(best, point_triangle_distance(p, mesh_.vertices[t[0]], mesh_.vertices[t[1]], mesh_.vertices[t[2]]));
            }
          }
      // Cells at ring r + 1 lie at least r cell widths away.
      if (best <= static_cast<double>(r) * cell_) break;
    }
    return best;
  }

 private:
  std::size_t cell_coord(double v, std::size_t a) const {
    const double t = std::floor((v - lo_[a]) / cell_);
    if (!(t > 0.0)) return 0;
    return std::min(static_cast<std::size_t>(t), n_[a] - 1);
  }
  std::size_t flat(std::size_t x, std::size_t y, std::size_t z) const { return x + n_[0] * (y + n_[1] * z); }

  const IndexedMesh& mesh_;
  Vec3 lo_{};
  double cell_ = 1.0;
  std::array<std::size_t, 3> n_{1, 1, 1};
  std::vector<std::uint32_t> offsets_;
  std::vector<std::uint32_t> items_;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

inline double unit_from_bits(std::uint64_t x) { return static_cast<double>(x >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Sample i of triangle t as barycentric (w0, w1, w2). The pattern is an
/// R2 low-discrepancy sequence with a per-triangle random shift, so sample i
/// does not depend on how many samples are drawn.
inline std::array<double, 3> triangle_sample(std::size_t t, std::size_t i, std::uint64_t seed = kSamplingSeed) {
  constexpr double g = 1.32471795724474602596;  // plastic number
  constexpr double a1 = 1.0 / g, a2 = 1.0 / (g * g);
  const std::uint64_t h = detail::splitmix64(seed ^ detail::splitmix64(t));
  const double s1 = detail::unit_from_bits(h), s2 = detail::unit_from_bits(detail::splitmix64(h));
  double u = s1 + a1 * static_cast<double>(i), v = s2 + a2 * static_cast<double>(i);
  u -= std::floor(u);
  v -= std::floor(v);
  if (u + v > 1.0) {
    u = 1.0 - u;
    v = 1.0 - v;
  }
  return {1.0 - u - v, u, v};
}

struct DistanceReport {
  double max = 0.0;
  double mean = 0.0;
  double rms = 0.0;
  std::size_t samples = 0;
  std::size_t samples_per_triangle = 0;
  std::vector<double> per_sample;
};

/// One-sided sampled distance from source to target surface.
inline DistanceReport mesh_distance(const IndexedMesh& source, const IndexedMesh& target,
                                    std::size_t samples_per_triangle = 8, bool keep_samples = false,
                                    unsigned threads = 0) {
  if (source.triangles.empty() || target.triangles.empty())
    throw std::invalid_argument("mesh_distance: both meshes must have triangles");
  if (samples_per_triangle < 1) throw std::invalid_argument("mesh_distance: samples_per_triangle must be >= 1");
  const TriangleIndex index(target);
  const std::size_t n = samples_per_triangle;
  std::vector<double> d(source.triangles.size() * n);
  parallel_chunks(source.triangles.size(), threads, [&](std::size_t b, std::size_t e, std::size_t) {
    auto scratch = index.make_scratch();
    for (std::size_t t = b; t < e; ++t) {
      const auto& tri = source.triangles[t];
      const Vec3 &p0 = source.vertices[tri[0]], &p1 = source.vertices[tri[1]], &p2 = source.vertices[tri[2]];
      for (std::size_t i = 0; i < n; ++i) {
        const auto w = triangle_sample(t, i);
        d[t * n + i] = index.distance_to(p0 * w[0] + p1 * w[1] + p2 * w[2], scratch);
      }
    }
  });
  DistanceReport r;
  r.samples = d.size();
  r.samples_per_triangle = n;
  double sum = 0.0, sq = 0.0;
  for (double v : d) {
    r.max = std::max(r.max, v);
    sum += v;
    sq += v * v;
  }
  r.mean = sum / static_cast<double>(d.size());
  r.rms = std::sqrt(sq / static_cast<double>(d.size()));
  if (keep_samples) r.per_sample = std::move(d);
  return r;
}

/// Larger of the two one-sided distances, per statistic.
inline DistanceReport symmetric_mesh_distance(const IndexedMesh& a, const IndexedMesh& b,
                                              std::size_t samples_per_triangle = 8, unsigned threads = 0) {
  const DistanceReport ab = mesh_distance(a, b, samples_per_triangle, false, threads);
  const DistanceReport ba = mesh_distance(b, a, samples_per_triangle, false, threads);
  DistanceReport r;
  r.max = std::max(ab.max, ba.max);
  r.mean = std::max(ab.mean, ba.mean);
  r.rms = std::max(ab.rms, ba.rms);
  r.samples = ab.samples + ba.samples;
  r.samples_per_triangle = samples_per_triangle;
  return r;
}

/// Distance from each source vertex to the target surface.
inline std::vector<double> per_vertex_distance(const IndexedMesh& source, const IndexedMesh& target, unsigned threads = 0) {
  if (source.vertices.empty() || target.triangles.empty())
    throw std::invalid_argument("per_vertex_distance: meshes must be nonempty");
  const TriangleIndex index(target);
  std::vector<double> out(source.vertices.size());
  parallel_chunks(out.size(), threads, [&](std::size_t b, std::size_t e, std::size_t) {
    auto scratch = index.make_scratch();
    for (std::size_t v = b; v < e; ++v) out[v] = index.distance_to(source.vertices[v], scratch);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Topology

struct TopologyStats {
  std::size_t vertices = 0;  // referenced by at least one triangle
  std::size_t edges = 0;
  std::size_t faces = 0;
  std::size_t components = 0;
  std::size_t open_edges = 0;
  std::size_t nonmanifold_edges = 0;
  long long euler = 0;
};

inline TopologyStats topology_stats(const IndexedMesh& mesh) {
  TopologyStats s;
  const std::size_t n = mesh.vertices.size();
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  std::vector<std::uint8_t> used(n, 0);
  std::unordered_map<std::uint64_t, std::uint32_t> edge_count;
  edge_count.reserve(mesh.triangles.size() * 3);
  for (const auto& t : mesh.triangles) {
    for (int e = 0; e < 3; ++e) {
      const std::uint32_t a = t[static_cast<std::size_t>(e)], b = t[static_cast<std::size_t>((e + 1) % 3)];
      used[a] = 1;
      const std::uint64_t key = a < b ? (static_cast<std::uint64_t>(a) << 32) | b : (static_cast<std::uint64_t>(b) << 32) | a;
      ++edge_count[key];
      const auto ra = find(a), rb = find(b);
      if (ra != rb) parent[ra] = rb;
    }
  }
  for (std::uint32_t v = 0; v < n; ++v)
    if (used[v]) {
      ++s.vertices;
      if (find(v) == v) ++s.components;
    }
  s.edges = edge_count.size();
  s.faces = mesh.triangles.size();
  for (const auto& [key, c] : edge_count) {
    if (c == 1) ++s.open_edges;
    if (c > 2) ++s.nonmanifold_edges;
  }
  s.euler = static_cast<long long>(s.vertices) - static_cast<long long>(s.edges) + static_cast<long long>(s.faces);
  return s;
}

// ---------------------------------------------------------------------------
// Correlation

/// Ranks starting at 1; ties share their average rank.
inline std::vector<double> average_ranks(std::span<const double> x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t q = i; q <= j; ++q) ranks[order[q]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("pearson: need two equal-length samples of size >= 2");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

inline double spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

}  // namespace mcuq
