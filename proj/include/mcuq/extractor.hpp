#pragma once

// Marching cubes over a ScalarGrid with a pluggable crossing solver.
//
// One vertex per crossed grid edge. Vertices are ordered by EdgeId (z, y, x,
// axis), triangles by cell in the same lexicographic order, so output is
// independent of the thread count.

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcuq/interpolants.hpp"
#include "mcuq/mc_tables.hpp"
#include "mcuq/mesh.hpp"
#include "mcuq/parallel.hpp"
#include "mcuq/volume.hpp"

namespace mcuq {

struct ExtractionConfig {
  double isovalue = 0.0;
  Method method = Method::Linear;
  BoundaryPolicy boundary = BoundaryPolicy::Clamp;
  /// Edges whose midpoint lies in this box use `method`; all others Linear.
  std::optional<Box> region;
  DerivativeScheme cubic_scheme = DerivativeScheme::FourPoint;
  /// 0 = hardware concurrency.
  unsigned threads = 0;
};

namespace mc {

struct CubeEdge {
  std::array<std::uint8_t, 3> origin;
  std::uint8_t axis;
};

/// Min-corner offset and axis of each cube edge.
inline constexpr std::array<CubeEdge, 12> kCubeEdges = [] {
  std::array<CubeEdge, 12> out{};
  for (std::size_t e = 0; e < 12; ++e) {
    const auto& a = kCorner[kEdgeCorners[e][0]];
    const auto& b = kCorner[kEdgeCorners[e][1]];
    for (std::uint8_t d = 0; d < 3; ++d) {
      out[e].origin[d] = a[d] < b[d] ? a[d] : b[d];
      if (a[d] != b[d]) out[e].axis = d;
    }
  }
  return out;
}();

/// Case index of a cell from its 8 corner values (bit set when below k).
inline std::uint8_t case_index(const std::array<double, 8>& corner_values, double k) {
  std::uint8_t c = 0;
  for (std::size_t n = 0; n < 8; ++n)
    if (corner_values[n] < k) c = static_cast<std::uint8_t>(c | (1u << n));
  return c;
}

/// Emits the table triangles of a case as cube-edge triples, wound so the
/// face normal points toward decreasing f - k.
template <class Emit>
void for_each_triangle(std::uint8_t cube_case, Emit&& emit) {
  const auto& row = kTriTable[cube_case];
  for (std::size_t t = 0; t < 16 && row[t] >= 0; t += 3)
    emit(static_cast<std::size_t>(row[t]), static_cast<std::size_t>(row[t + 1]), static_cast<std::size_t>(row[t + 2]));
}

}  // namespace mc

/// Grid edge <-> 64-bit key. Keys sort in EdgeId order.
inline std::uint64_t edge_key(const Dims& dims, const EdgeId& e) {
  return (static_cast<std::uint64_t>(e.node.i) + dims.nx * (e.node.j + dims.ny * static_cast<std::uint64_t>(e.node.k))) * 3u +
         static_cast<std::uint64_t>(axis_index(e.axis));
}

inline EdgeId edge_from_key(const Dims& dims, std::uint64_t key) {
  EdgeId e;
  e.axis = static_cast<Axis>(key % 3);
  std::uint64_t node = key / 3;
  e.node.i = static_cast<std::size_t>(node % dims.nx);
  node /= dims.nx;
  e.node.j = static_cast<std::size_t>(node % dims.ny);
  e.node.k = static_cast<std::size_t>(node / dims.ny);
  return e;
}

inline std::array<double, 8> cell_corner_values(const ScalarGrid& grid, const CellId& c) {
  std::array<double, 8> v{};
  for (std::size_t n = 0; n < 8; ++n)
    v[n] = grid.at(c.i + mc::kCorner[n][0], c.j + mc::kCorner[n][1], c.k + mc::kCorner[n][2]);
  return v;
}

inline std::uint8_t cell_case(const ScalarGrid& grid, const CellId& c, double k) {
  return mc::case_index(cell_corner_values(grid, c), k);
}

inline EdgeId cell_edge(const CellId& c, std::size_t cube_edge) {
  const auto& ce = mc::kCubeEdges[cube_edge];
  return {{c.i + ce.origin[0], c.j + ce.origin[1], c.k + ce.origin[2]}, static_cast<Axis>(ce.axis)};
}

inline Vec3 edge_midpoint(const ScalarGrid& grid, const EdgeId& e) {
  Vec3 p = grid.position(e.node);
  const std::size_t a = axis_index(e.axis);
  p[a] += 0.5 * grid.spacing()[a];
  return p;
}

inline void validate_region(const ScalarGrid& grid, const std::optional<Box>& region) {
  if (!region) return;
  if (!region->valid() || !is_finite(region->lo) || !is_finite(region->hi))
    throw std::invalid_argument("region box must have lo <= hi componentwise");
  if (!region->intersects(grid.bounds())) throw std::invalid_argument("region box does not intersect the grid");
}

inline Method method_for_edge(const ScalarGrid& grid, const EdgeId& e, const ExtractionConfig& cfg) {
  if (cfg.region && !cfg.region->contains(edge_midpoint(grid, e))) return Method::Linear;
  return cfg.method;
}

/// Non-throwing crossing of a grid edge. Equal endpoint values give the
/// midpoint with `degenerate` set.
inline CrossingSolution solve_grid_edge(const ScalarGrid& grid, const EdgeId& e, double k, Method method,
                                        BoundaryPolicy policy = BoundaryPolicy::Clamp,
                                        DerivativeScheme scheme = DerivativeScheme::FourPoint) {
  const std::size_t a = axis_index(e.axis);
  const double f0 = grid.at(e.node);
  const double f1 = sample_along(grid, e.node, a, 1, policy);
  if (f0 == f1) return {0.5, method, false, true};
  if ((f0 - k) * (f1 - k) > 0.0) return {detail::linear_alpha(f0, f1, k), method, false, false};
  switch (method) {
    case Method::Linear: return linear_crossing(f0, f1, k);
    case Method::Cubic: return cubic_crossing(edge_stencil(grid, e, policy), k, scheme);
    case Method::Weno: return weno_crossing(weno_stencil(grid, e, policy), k).first;
  }
  return linear_crossing(f0, f1, k);
}

inline Vec3 edge_point(const ScalarGrid& grid, const EdgeId& e, double alpha) {
  Vec3 p = grid.position(e.node);
  const std::size_t a = axis_index(e.axis);
  p[a] += alpha * grid.spacing()[a];
  return p;
}

/// Topology of one MC pass: crossed edges (sorted keys) and triangles
/// indexing into them.
struct MarchTopology {
  std::vector<std::uint64_t> edge_keys;
  std::vector<Triangle> triangles;
  /// Linear cell index (x-fastest over cell_dims) of each triangle.
  std::vector<std::uint64_t> triangle_cells;
};

inline MarchTopology march_topology(const ScalarGrid& grid, double k, unsigned threads = 0) {
  MarchTopology out;
  const Dims d = grid.dims();
  if (d.nx < 2 || d.ny < 2 || d.nz < 2) return out;
  const Dims cd = grid.cell_dims();

  struct Chunk {
    std::vector<std::array<std::uint64_t, 3>> tris;
    std::vector<std::uint64_t> cells;
  };
  std::vector<Chunk> chunks(chunk_count(cd.nz, threads));
  parallel_chunks(cd.nz, threads, [&](std::size_t z0, std::size_t z1, std::size_t w) {
    Chunk& ch = chunks[w];
    for (std::size_t kz = z0; kz < z1; ++kz)
      for (std::size_t jy = 0; jy < cd.ny; ++jy)
        for (std::size_t ix = 0; ix < cd.nx; ++ix) {
          const CellId c{ix, jy, kz};
          const std::uint8_t cs = cell_case(grid, c, k);
          if (cs == 0 || cs == 255) continue;
          const std::uint64_t cell_index = ix + cd.nx * (jy + cd.ny * static_cast<std::uint64_t>(kz));
          mc::for_each_triangle(cs, [&](std::size_t e0, std::size_t e1, std::size_t e2) {
            ch.tris.push_back({edge_key(d, cell_edge(c, e0)), edge_key(d, cell_edge(c, e1)), edge_key(d, cell_edge(c, e2))});
            ch.cells.push_back(cell_index);
          });
        }
  });

  std::size_t total = 0;
  for (const auto& ch : chunks) total += ch.tris.size();
  out.edge_keys.reserve(total * 3);
  for (const auto& ch : chunks)
    for (const auto& t : ch.tris) out.edge_keys.insert(out.edge_keys.end(), t.begin(), t.end());
  std::sort(out.edge_keys.begin(), out.edge_keys.end());
  out.edge_keys.erase(std::unique(out.edge_keys.begin(), out.edge_keys.end()), out.edge_keys.end());

  auto index_of = [&](std::uint64_t key) {
    return static_cast<std::uint32_t>(std::lower_bound(out.edge_keys.begin(), out.edge_keys.end(), key) - out.edge_keys.begin());
  };
  out.triangles.reserve(total);
  out.triangle_cells.reserve(total);
  for (const auto& ch : chunks) {
    for (const auto& t : ch.tris) out.triangles.push_back({index_of(t[0]), index_of(t[1]), index_of(t[2])});
    out.triangle_cells.insert(out.triangle_cells.end(), ch.cells.begin(), ch.cells.end());
  }
  return out;
}

/// Extraction result plus the per-vertex provenance used by the error and
/// recovery stages.
struct DetailedExtraction {
  IndexedMesh mesh;
  std::vector<EdgeId> edges;
  std::vector<CrossingSolution> crossings;
  std::vector<std::uint64_t> triangle_cells;
};

inline std::vector<CrossingSolution> solve_crossings(const ScalarGrid& grid, std::span<const EdgeId> edges,
                                                     const ExtractionConfig& cfg, std::optional<Method> forced = {}) {
  std::vector<CrossingSolution> out(edges.size());
  parallel_chunks(edges.size(), cfg.threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t v = b; v < e; ++v) {
      const Method m = forced ? *forced : method_for_edge(grid, edges[v], cfg);
      out[v] = solve_grid_edge(grid, edges[v], cfg.isovalue, m, cfg.boundary, cfg.cubic_scheme);
    }
  });
  return out;
}

inline DetailedExtraction extract_detailed(const ScalarGrid& grid, const ExtractionConfig& cfg) {
  if (!std::isfinite(cfg.isovalue)) throw std::invalid_argument("isovalue must be finite");
  validate_region(grid, cfg.region);
  MarchTopology topo = march_topology(grid, cfg.isovalue, cfg.threads);
  DetailedExtraction out;
  out.edges.reserve(topo.edge_keys.size());
  for (auto key : topo.edge_keys) out.edges.push_back(edge_from_key(grid.dims(), key));
  out.crossings = solve_crossings(grid, out.edges, cfg);
  out.mesh.vertices.resize(out.edges.size());
  for (std::size_t v = 0; v < out.edges.size(); ++v) out.mesh.vertices[v] = edge_point(grid, out.edges[v], out.crossings[v].alpha);
  out.mesh.triangles = std::move(topo.triangles);
  out.triangle_cells = std::move(topo.triangle_cells);
  return out;
}

inline IndexedMesh extract(const ScalarGrid& grid, const ExtractionConfig& cfg) {
  return extract_detailed(grid, cfg).mesh;
}

/// Channel name of a pairwise variation, letters in Linear, Cubic, Weno order.
inline std::string variation_channel_name(Method a, Method b) {
  if (static_cast<int>(a) > static_cast<int>(b)) std::swap(a, b);
  return std::string("variation_") + method_letter(a) + method_letter(b);
}

/// One topology pass, one crossing per method and vertex. Positions use the
/// first listed method; each pair adds |alpha_A - alpha_B| * h and
/// "variation_max" holds the pointwise maximum over pairs.
inline DetailedExtraction extract_compare_detailed(const ScalarGrid& grid, const ExtractionConfig& cfg,
                                                   std::span<const Method> methods) {
  std::set<Method> distinct(methods.begin(), methods.end());
  if (methods.size() < 2 || distinct.size() != methods.size())
    throw std::invalid_argument("extract_compare needs at least two distinct methods");
  ExtractionConfig first = cfg;
  first.method = methods[0];
  first.region.reset();
  DetailedExtraction out = extract_detailed(grid, first);

  std::vector<std::vector<CrossingSolution>> per_method;
  per_method.push_back(out.crossings);
  for (std::size_t m = 1; m < methods.size(); ++m) per_method.push_back(solve_crossings(grid, out.edges, first, methods[m]));

  const std::size_t n = out.edges.size();
  std::vector<double> vmax(n, 0.0);
  for (std::size_t a = 0; a < methods.size(); ++a)
    for (std::size_t b = a + 1; b < methods.size(); ++b) {
      std::vector<double> var(n);
      for (std::size_t v = 0; v < n; ++v) {
        const double h = grid.spacing()[axis_index(out.edges[v].axis)];
        var[v] = std::abs(per_method[a][v].alpha - per_method[b][v].alpha) * h;
        vmax[v] = std::max(vmax[v], var[v]);
      }
      out.mesh.channels[variation_channel_name(methods[a], methods[b])] = std::move(var);
    }
  out.mesh.channels["variation_max"] = std::move(vmax);
  return out;
}

inline IndexedMesh extract_compare(const ScalarGrid& grid, const ExtractionConfig& cfg, std::span<const Method> methods) {
  return extract_compare_detailed(grid, cfg, methods).mesh;
}

inline IndexedMesh extract_compare(const ScalarGrid& grid, double k, std::initializer_list<Method> methods) {
  ExtractionConfig cfg;
  cfg.isovalue = k;
  return extract_compare(grid, cfg, std::span<const Method>(methods.begin(), methods.size()));
}

}  // namespace mcuq
