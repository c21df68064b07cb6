#pragma once

// Hidden-feature detection from first divided differences, cell refinement
// on a tri-cubic (or trilinear) fine lattice, and crack patching along
// refined/unrefined cell faces.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mcuq/extractor.hpp"
#include "mcuq/interpolants.hpp"
#include "mcuq/mesh.hpp"
#include "mcuq/parallel.hpp"
#include "mcuq/volume.hpp"

namespace mcuq {

// ---------------------------------------------------------------------------
// Detection

/// Slope pairs with strictly opposite signs, as a bit mask.
enum SlopePair : std::uint8_t {
  kPairLeftCenter = 1u << 0,   // U[i-1,i] vs U[i,i+1]
  kPairLeftRight = 1u << 1,    // U[i-1,i] vs U[i+1,i+2]
  kPairCenterRight = 1u << 2,  // U[i,i+1] vs U[i+1,i+2]
};

inline std::uint8_t slope_trigger(double left, double center, double right) {
  auto opposite = [](double a, double b) { return (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0); };
  std::uint8_t m = 0;
  if (opposite(left, center)) m |= kPairLeftCenter;
  if (opposite(left, right)) m |= kPairLeftRight;
  if (opposite(center, right)) m |= kPairCenterRight;
  return m;
}

/// Trigger mask of one grid edge from its boundary-resolved stencil.
inline std::uint8_t edge_trigger(const EdgeStencil& s) {
  return slope_trigger(s.at(0) - s.at(-1), s.at(1) - s.at(0), s.at(2) - s.at(1));
}

struct FlaggedCell {
  CellId cell;
  /// The isosurface already crosses the cell at the coarse level.
  bool crossed = false;
  /// First triggering edge in EdgeId order and its slope-pair mask.
  EdgeId edge;
  std::uint8_t pairs = 0;
};

struct FeatureReport {
  std::vector<FlaggedCell> flagged;  // CellId order
  std::size_t edges_triggered = 0;

  std::size_t count_crossed() const {
    return static_cast<std::size_t>(std::count_if(flagged.begin(), flagged.end(), [](const auto& f) { return f.crossed; }));
  }
  std::vector<CellId> cells() const {
    std::vector<CellId> out;
    out.reserve(flagged.size());
    for (const auto& f : flagged) out.push_back(f.cell);
    return out;
  }
};

inline FeatureReport detect_hidden(const ScalarGrid& grid, double k, BoundaryPolicy policy = BoundaryPolicy::Clamp,
                                   unsigned threads = 0) {
  FeatureReport report;
  const Dims d = grid.dims();
  if (d.nx < 2 || d.ny < 2 || d.nz < 2) return report;

  // Trigger mask per (node, axis).
  std::vector<std::uint8_t> trig(d.count() * 3, 0);
  parallel_chunks(d.nz, threads, [&](std::size_t z0, std::size_t z1, std::size_t) {
    for (std::size_t kz = z0; kz < z1; ++kz)
      for (std::size_t jy = 0; jy < d.ny; ++jy)
        for (std::size_t ix = 0; ix < d.nx; ++ix)
          for (std::size_t a = 0; a < 3; ++a) {
            const EdgeId e{{ix, jy, kz}, static_cast<Axis>(a)};
            if (!grid.contains_edge(e)) continue;
            trig[edge_key(d, e)] = edge_trigger(edge_stencil(grid, e, policy));
          }
  });
  report.edges_triggered = static_cast<std::size_t>(std::count_if(trig.begin(), trig.end(), [](auto m) { return m != 0; }));

  const Dims cd = grid.cell_dims();
  std::vector<std::vector<FlaggedCell>> parts(chunk_count(cd.nz, threads));
  parallel_chunks(cd.nz, threads, [&](std::size_t z0, std::size_t z1, std::size_t w) {
    for (std::size_t kz = z0; kz < z1; ++kz)
      for (std::size_t jy = 0; jy < cd.ny; ++jy)
        for (std::size_t ix = 0; ix < cd.nx; ++ix) {
          const CellId c{ix, jy, kz};
          std::optional<EdgeId> first;
          std::uint8_t pairs = 0;
          for (std::size_t ce = 0; ce < 12; ++ce) {
            const EdgeId e = cell_edge(c, ce);
            const std::uint8_t m = trig[edge_key(d, e)];
            if (m != 0 && (!first || e < *first)) {
              first = e;
              pairs = m;
            }
          }
          if (!first) continue;
          const std::uint8_t cs = cell_case(grid, c, k);
          parts[w].push_back({c, cs != 0 && cs != 255, *first, pairs});
        }
  });
  for (auto& p : parts) report.flagged.insert(report.flagged.end(), p.begin(), p.end());
  return report;
}

// ---------------------------------------------------------------------------
// Refinement

enum class RefineTarget : std::uint8_t { FlaggedCells, SelectionBox };
enum class RefinementSampler : std::uint8_t { Tricubic, Trilinear };

struct RefinementConfig {
  int subdivision = 4;
  RefineTarget apply_to = RefineTarget::FlaggedCells;
  /// Required for SelectionBox; with FlaggedCells it restricts the flags.
  std::optional<Box> box;
  RefinementSampler sampler = RefinementSampler::Tricubic;

  void validate() const {
    if (subdivision < 2 || subdivision > 8) throw std::invalid_argument("subdivision must lie in [2, 8]");
    if (apply_to == RefineTarget::SelectionBox && !box) throw std::invalid_argument("SelectionBox refinement needs a box");
    if (box && !box->valid()) throw std::invalid_argument("refinement box must have lo <= hi componentwise");
  }
};

inline Box cell_box(const ScalarGrid& grid, const CellId& c) {
  const Vec3 lo = grid.position(c);
  return {lo, lo + grid.spacing()};
}

/// Cells selected for refinement, in CellId order.
inline std::vector<CellId> select_refined_cells(const ScalarGrid& grid, const FeatureReport& features,
                                                const RefinementConfig& rcfg) {
  std::vector<CellId> out;
  if (rcfg.apply_to == RefineTarget::FlaggedCells) {
    for (const auto& f : features.flagged)
      if (!rcfg.box || rcfg.box->intersects(cell_box(grid, f.cell))) out.push_back(f.cell);
    return out;
  }
  const Dims cd = grid.cell_dims();
  for (std::size_t kz = 0; kz < cd.nz; ++kz)
    for (std::size_t jy = 0; jy < cd.ny; ++jy)
      for (std::size_t ix = 0; ix < cd.nx; ++ix)
        if (rcfg.box->intersects(cell_box(grid, {ix, jy, kz}))) out.push_back({ix, jy, kz});
  return out;
}

/// Field on the fine lattice (node (I,J,K) = coarse node * s + offset). Each
/// fine node is evaluated in one owning coarse cell so shared nodes agree
/// bit for bit.
class FineField {
 public:
  FineField(const ScalarGrid& grid, std::size_t s, RefinementSampler sampler, BoundaryPolicy policy)
      : grid_(grid), s_(s), sampler_(sampler), policy_(policy) {
    const Dims d = grid.dims();
    dims_ = {(d.nx - 1) * s + 1, (d.ny - 1) * s + 1, (d.nz - 1) * s + 1};
  }

  const Dims& dims() const { return dims_; }
  std::size_t subdivision() const { return s_; }

  CellId owner(const Index3& n) const {
    const Dims cd = grid_.cell_dims();
    return {std::min(n.i / s_, cd.nx - 1), std::min(n.j / s_, cd.ny - 1), std::min(n.k / s_, cd.nz - 1)};
  }

  Vec3 local_in(const CellId& c, const Index3& n) const {
    const double s = static_cast<double>(s_);
    return {(static_cast<double>(n.i) - static_cast<double>(c.i * s_)) / s,
            (static_cast<double>(n.j) - static_cast<double>(c.j * s_)) / s,
            (static_cast<double>(n.k) - static_cast<double>(c.k * s_)) / s};
  }

  TricubicSample sample(const CellId& c, const Vec3& local) const {
    return sampler_ == RefinementSampler::Tricubic ? tricubic_sample(grid_, c, local, policy_)
                                                   : trilinear_sample(grid_, c, local);
  }

  double value(const Index3& n) const {
    const CellId c = owner(n);
    return sample(c, local_in(c, n)).value;
  }

  Vec3 position(const Index3& n) const {
    const Vec3& o = grid_.origin();
    const Vec3& h = grid_.spacing();
    const double s = static_cast<double>(s_);
    return {o.x + static_cast<double>(n.i) / s * h.x, o.y + static_cast<double>(n.j) / s * h.y,
            o.z + static_cast<double>(n.k) / s * h.z};
  }

  /// Crossing on the fine edge. Cubic uses the sampler's analytic derivative
  /// in the coarse cell holding the edge; WENO uses seven fine samples.
  CrossingSolution solve(const EdgeId& e, double k, Method method) const {
    const std::size_t a = axis_index(e.axis);
    Index3 n1 = e.node;
    n1[a] += 1;
    const double f0 = value(e.node), f1 = value(n1);
    if (f0 == f1) return {0.5, method, false, true};
    if ((f0 - k) * (f1 - k) > 0.0) return {detail::linear_alpha(f0, f1, k), method, false, false};
    switch (method) {
      case Method::Linear: return linear_crossing(f0, f1, k);
      case Method::Cubic: {
        CellId c = owner(e.node);
        c[a] = e.node[a] / s_;
        const double scale = 1.0 / static_cast<double>(s_);
        const double d0 = sample(c, local_in(c, e.node)).gradient_local[a] * scale;
        const double d1 = sample(c, local_in(c, n1)).gradient_local[a] * scale;
        return hermite_crossing(f0, f1, d0, d1, k);
      }
      case Method::Weno: {
        std::array<double, 7> v{};
        const auto last = static_cast<std::ptrdiff_t>(dims_[a]) - 1;
        for (int o = -3; o <= 3; ++o) {
          Index3 n = e.node;
          const std::ptrdiff_t idx = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(e.node[a]) + o, 0, last);
          n[a] = static_cast<std::size_t>(idx);
          v[static_cast<std::size_t>(o + 3)] = o == 0 ? f0 : (o == 1 ? f1 : value(n));
        }
        return weno_crossing(WenoStencil(v, grid_.spacing()[a] / static_cast<double>(s_)), k).first;
      }
    }
    return linear_crossing(f0, f1, k);
  }

 private:
  const ScalarGrid& grid_;
  std::size_t s_;
  RefinementSampler sampler_;
  BoundaryPolicy policy_;
  Dims dims_{};
};

struct RecoveryReport {
  std::size_t refined_cells = 0;
  std::size_t interface_faces = 0;
  std::size_t patched_faces = 0;
  std::size_t patch_triangles = 0;
  /// Coarse triangles re-split at fine vertices lying on their interface edge.
  std::size_t split_triangles = 0;
  std::size_t patch_failures = 0;
  std::size_t capped_loops = 0;
  std::size_t merged_vertices = 0;
  /// Open edges on refined/unrefined faces away from the domain boundary.
  std::size_t interface_open_edges = 0;
};

struct RecoveryResult {
  IndexedMesh base;
  IndexedMesh recovered;
  FeatureReport features;
  std::vector<CellId> refined;
  RecoveryReport report;
};

namespace detail {

/// A cell face: normal axis, plane index along it, and the cell coordinates
/// along the two in-plane axes (ascending axis order).
struct FaceId {
  std::uint8_t normal = 0;
  std::size_t plane = 0;
  std::size_t u = 0;
  std::size_t v = 0;
  friend constexpr auto operator<=>(const FaceId&, const FaceId&) = default;
};

inline std::pair<std::size_t, std::size_t> in_plane_axes(std::size_t normal) {
  return normal == 0 ? std::pair<std::size_t, std::size_t>{1, 2}
                     : (normal == 1 ? std::pair<std::size_t, std::size_t>{0, 2} : std::pair<std::size_t, std::size_t>{0, 1});
}

/// Faces containing a point that lies on the lattice edge line (node, axis)
/// strictly inside the edge, in units of `scale` lattice steps per coarse cell.
inline void faces_of_edge_point(const Index3& node, std::size_t axis, std::size_t scale, const Dims& cell_dims,
                                std::vector<FaceId>& out) {
  for (std::size_t nrm = 0; nrm < 3; ++nrm) {
    if (nrm == axis || node[nrm] % scale != 0) continue;
    const std::size_t plane = node[nrm] / scale;
    const auto [pu, pv] = in_plane_axes(nrm);
    // along `axis` the point is interior to one coarse span; along the other
    // in-plane axis it may sit on a coarse line shared by two faces.
    std::array<std::vector<std::size_t>, 3> choices;
    for (std::size_t d : {pu, pv}) {
      if (d == axis) {
        choices[d] = {node[d] / scale};
      } else if (node[d] % scale == 0) {
        const std::size_t c = node[d] / scale;
        if (c > 0) choices[d].push_back(c - 1);
        if (c < cell_dims[d]) choices[d].push_back(c);
      } else {
        choices[d] = {node[d] / scale};
      }
    }
    for (std::size_t cu : choices[pu])
      for (std::size_t cv : choices[pv])
        if (cu < cell_dims[pu] && cv < cell_dims[pv]) out.push_back({static_cast<std::uint8_t>(nrm), plane, cu, cv});
  }
}

inline std::uint64_t undirected(std::uint32_t a, std::uint32_t b) {
  return a < b ? (static_cast<std::uint64_t>(a) << 32) | b : (static_cast<std::uint64_t>(b) << 32) | a;
}

/// Coarse edge a vertex lies on, if any.
struct VertexLine {
  bool on_coarse_edge = false;
  std::uint64_t coarse_edge = 0;
};

}  // namespace detail

/// Replaces the selected cells by s^3 subcells sampled from the fine field,
/// keeps the coarse triangles of all other cells, and stitches the two along
/// refined/unrefined faces.
inline RecoveryResult extract_with_recovery(const ScalarGrid& grid, const ExtractionConfig& cfg,
                                            const RefinementConfig& rcfg) {
  rcfg.validate();
  RecoveryResult res;
  DetailedExtraction base = extract_detailed(grid, cfg);
  res.base = base.mesh;
  res.features = detect_hidden(grid, cfg.isovalue, cfg.boundary, cfg.threads);
  res.refined = select_refined_cells(grid, res.features, rcfg);
  res.report.refined_cells = res.refined.size();
  if (res.refined.empty()) {
    res.recovered = res.base;
    return res;
  }

  const Dims d = grid.dims();
  const Dims cd = grid.cell_dims();
  const auto s = static_cast<std::size_t>(rcfg.subdivision);
  const double k = cfg.isovalue;
  auto cell_index = [&](const CellId& c) { return c.i + cd.nx * (c.j + cd.ny * c.k); };
  std::vector<std::uint8_t> is_refined(cd.count(), 0);
  for (const auto& c : res.refined) is_refined[cell_index(c)] = 1;

  // Coarse part: triangles of unrefined cells.
  std::vector<std::uint8_t> coarse_used(base.edges.size(), 0);
  std::vector<Triangle> coarse_tris;
  for (std::size_t t = 0; t < base.mesh.triangles.size(); ++t) {
    if (is_refined[base.triangle_cells[t]]) continue;
    coarse_tris.push_back(base.mesh.triangles[t]);
    for (auto v : base.mesh.triangles[t]) coarse_used[v] = 1;
  }

  // Fine marching cubes in every refined cell.
  const FineField fine(grid, s, rcfg.sampler, cfg.boundary);
  const Dims fd = fine.dims();
  std::vector<std::vector<std::array<std::uint64_t, 3>>> fine_parts(chunk_count(res.refined.size(), cfg.threads));
  parallel_chunks(res.refined.size(), cfg.threads, [&](std::size_t b, std::size_t e, std::size_t w) {
    std::vector<double> block((s + 1) * (s + 1) * (s + 1));
    for (std::size_t r = b; r < e; ++r) {
      const CellId c = res.refined[r];
      for (std::size_t z = 0; z <= s; ++z)
        for (std::size_t y = 0; y <= s; ++y)
          for (std::size_t x = 0; x <= s; ++x)
            block[x + (s + 1) * (y + (s + 1) * z)] = fine.value({c.i * s + x, c.j * s + y, c.k * s + z});
      for (std::size_t z = 0; z < s; ++z)
        for (std::size_t y = 0; y < s; ++y)
          for (std::size_t x = 0; x < s; ++x) {
            std::array<double, 8> cv{};
            for (std::size_t n = 0; n < 8; ++n)
              cv[n] = block[(x + mc::kCorner[n][0]) + (s + 1) * ((y + mc::kCorner[n][1]) + (s + 1) * (z + mc::kCorner[n][2]))];
            const std::uint8_t cs = mc::case_index(cv, k);
            if (cs == 0 || cs == 255) continue;
            const CellId sub{c.i * s + x, c.j * s + y, c.k * s + z};
            mc::for_each_triangle(cs, [&](std::size_t e0, std::size_t e1, std::size_t e2) {
              fine_parts[w].push_back({edge_key(fd, cell_edge(sub, e0)), edge_key(fd, cell_edge(sub, e1)),
                                       edge_key(fd, cell_edge(sub, e2))});
            });
          }
    }
  });
  std::vector<std::uint64_t> fine_keys;
  for (const auto& p : fine_parts)
    for (const auto& t : p) fine_keys.insert(fine_keys.end(), t.begin(), t.end());
  std::sort(fine_keys.begin(), fine_keys.end());
  fine_keys.erase(std::unique(fine_keys.begin(), fine_keys.end()), fine_keys.end());

  std::vector<Vec3> fine_pos(fine_keys.size());
  parallel_chunks(fine_keys.size(), cfg.threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t v = b; v < e; ++v) {
      const EdgeId fe = edge_from_key(fd, fine_keys[v]);
      Vec3 p = fine.position(fe.node);
      const std::size_t a = axis_index(fe.axis);
      Vec3 mid = p;
      mid[a] += 0.5 * grid.spacing()[a] / static_cast<double>(s);
      const Method m = cfg.region && !cfg.region->contains(mid) ? Method::Linear : cfg.method;
      const CrossingSolution cs = fine.solve(fe, k, m);
      p[a] += cs.alpha * grid.spacing()[a] / static_cast<double>(s);
      fine_pos[v] = p;
    }
  });

  // Combined vertex list: used coarse vertices, unmerged fine vertices.
  IndexedMesh& out = res.recovered;
  std::vector<detail::VertexLine> lines;
  std::vector<std::uint32_t> coarse_remap(base.edges.size(), UINT32_MAX);
  std::unordered_map<std::uint64_t, std::uint32_t> coarse_by_edge;
  for (std::size_t v = 0; v < base.edges.size(); ++v) {
    if (!coarse_used[v]) continue;
    coarse_remap[v] = static_cast<std::uint32_t>(out.vertices.size());
    const std::uint64_t ck = edge_key(d, base.edges[v]);
    coarse_by_edge[ck] = coarse_remap[v];
    out.vertices.push_back(base.mesh.vertices[v]);
    lines.push_back({true, ck});
  }
  const std::size_t n_coarse = out.vertices.size();
  const double snap = 1e-6 * std::min({grid.spacing().x, grid.spacing().y, grid.spacing().z});
  std::vector<std::uint32_t> fine_remap(fine_keys.size());
  for (std::size_t v = 0; v < fine_keys.size(); ++v) {
    const EdgeId fe = edge_from_key(fd, fine_keys[v]);
    const std::size_t a = axis_index(fe.axis);
    detail::VertexLine line;
    bool on_line = true;
    for (std::size_t q = 0; q < 3; ++q)
      if (q != a && fe.node[q] % s != 0) on_line = false;
    if (on_line) {
      EdgeId ce{{fe.node.i / s, fe.node.j / s, fe.node.k / s}, fe.axis};
      line = {true, edge_key(d, ce)};
      auto it = coarse_by_edge.find(line.coarse_edge);
      if (it != coarse_by_edge.end() && distance(out.vertices[it->second], fine_pos[v]) <= snap) {
        fine_remap[v] = it->second;
        ++res.report.merged_vertices;
        continue;
      }
    }
    fine_remap[v] = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.push_back(fine_pos[v]);
    lines.push_back(line);
  }

  // Triangles, remembering which side produced each.
  std::vector<std::uint8_t> tri_is_fine;
  for (const auto& t : coarse_tris) {
    out.triangles.push_back({coarse_remap[t[0]], coarse_remap[t[1]], coarse_remap[t[2]]});
    tri_is_fine.push_back(0);
  }
  auto fine_index = [&](std::uint64_t key) {
    return fine_remap[static_cast<std::size_t>(std::lower_bound(fine_keys.begin(), fine_keys.end(), key) - fine_keys.begin())];
  };
  for (const auto& p : fine_parts)
    for (const auto& t : p) {
      const Triangle tri{fine_index(t[0]), fine_index(t[1]), fine_index(t[2])};
      if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
      out.triangles.push_back(tri);
      tri_is_fine.push_back(1);
    }

  // ---- crack patching --------------------------------------------------
  // Interface faces, in FaceId order.
  std::map<detail::FaceId, bool> interface_faces;
  for (const auto& c : res.refined)
    for (std::size_t nrm = 0; nrm < 3; ++nrm)
      for (int side = 0; side < 2; ++side) {
        if (side == 0 && c[nrm] == 0) continue;
        if (side == 1 && c[nrm] + 1 >= cd[nrm]) continue;
        CellId nb = c;
        nb[nrm] = side == 0 ? c[nrm] - 1 : c[nrm] + 1;
        if (is_refined[cell_index(nb)]) continue;
        const auto [pu, pv] = detail::in_plane_axes(nrm);
        interface_faces[{static_cast<std::uint8_t>(nrm), c[nrm] + static_cast<std::size_t>(side), c[pu], c[pv]}] = true;
      }
  res.report.interface_faces = interface_faces.size();

  // Faces each vertex lies on: coarse vertices via their coarse edge, fine
  // vertices via their fine edge, patch centroids none.
  std::vector<EdgeId> fine_edge_of(out.vertices.size());
  std::vector<std::uint8_t> has_fine_edge(out.vertices.size(), 0);
  for (std::size_t v = 0; v < fine_keys.size(); ++v)
    if (fine_remap[v] >= n_coarse) {
      fine_edge_of[fine_remap[v]] = edge_from_key(fd, fine_keys[v]);
      has_fine_edge[fine_remap[v]] = 1;
    }
  auto faces_of = [&](std::uint32_t v, std::vector<detail::FaceId>& faces) {
    faces.clear();
    if (v < n_coarse) {
      const EdgeId ce = edge_from_key(d, lines[v].coarse_edge);
      detail::faces_of_edge_point(ce.node, axis_index(ce.axis), 1, cd, faces);
    } else {
      if (has_fine_edge[v]) detail::faces_of_edge_point(fine_edge_of[v].node, axis_index(fine_edge_of[v].axis), s, cd, faces);
    }
    std::sort(faces.begin(), faces.end());
    faces.erase(std::unique(faces.begin(), faces.end()), faces.end());
  };

  struct OpenEdge {
    std::uint32_t from, to;  // direction as used by its triangle
    bool fine;
  };
  auto collect_open = [&]() {
    std::unordered_map<std::uint64_t, std::pair<int, OpenEdge>> count;
    count.reserve(out.triangles.size() * 3);
    for (std::size_t t = 0; t < out.triangles.size(); ++t) {
      const auto& tri = out.triangles[t];
      for (int e = 0; e < 3; ++e) {
        const std::uint32_t a = tri[static_cast<std::size_t>(e)], b = tri[static_cast<std::size_t>((e + 1) % 3)];
        auto& slot = count[detail::undirected(a, b)];
        ++slot.first;
        slot.second = {a, b, t < tri_is_fine.size() && tri_is_fine[t] == 1};
      }
    }
    std::vector<OpenEdge> open;
    for (const auto& [key, slot] : count)
      if (slot.first == 1) open.push_back(slot.second);
    std::sort(open.begin(), open.end(), [](const OpenEdge& x, const OpenEdge& y) {
      return detail::undirected(x.from, x.to) < detail::undirected(y.from, y.to);
    });
    return open;
  };

  // Open edges lying on each interface face.
  std::map<detail::FaceId, std::vector<OpenEdge>> face_edges;
  {
    std::vector<detail::FaceId> fa, fb, common;
    for (const auto& oe : collect_open()) {
      faces_of(oe.from, fa);
      faces_of(oe.to, fb);
      common.clear();
      std::set_intersection(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(common));
      for (const auto& f : common)
        if (interface_faces.count(f)) face_edges[f].push_back(oe);
    }
  }

  auto add_fan = [&](std::vector<std::uint32_t> cycle) {
    if (cycle.size() < 3) return;
    Vec3 centroid{};
    for (auto v : cycle) centroid += out.vertices[v];
    centroid *= 1.0 / static_cast<double>(cycle.size());
    const auto c = static_cast<std::uint32_t>(out.vertices.size());
    out.vertices.push_back(centroid);
    lines.push_back({});
    has_fine_edge.push_back(0);
    fine_edge_of.push_back({});
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      const std::uint32_t a = cycle[i], b = cycle[(i + 1) % cycle.size()];
      if (a == b) continue;
      out.triangles.push_back({c, a, b});
      tri_is_fine.push_back(2);
      ++res.report.patch_triangles;
    }
  };

  // When the fine chain a .. b runs along the coarse segment a -> b, the
  // coarse triangle is split at the chain vertices instead of patched.
  auto chain_on_segment = [&](const std::vector<std::uint32_t>& cycle) {
    const Vec3 a = out.vertices[cycle.front()], b = out.vertices[cycle.back()];
    const Vec3 ab = b - a;
    const double len2 = dot(ab, ab);
    if (!(len2 > 0.0)) return false;
    double prev = 0.0;
    for (std::size_t i = 1; i + 1 < cycle.size(); ++i) {
      const Vec3 p = out.vertices[cycle[i]];
      const double t = dot(p - a, ab) / len2;
      if (!(t > prev) || !(t < 1.0) || distance(p, a + ab * t) > snap) return false;
      prev = t;
    }
    return true;
  };
  auto split_coarse = [&](const std::vector<std::uint32_t>& cycle) {
    const std::uint32_t a = cycle.front(), b = cycle.back();
    for (std::size_t t = 0; t < out.triangles.size(); ++t) {
      if (tri_is_fine[t] != 0) continue;
      const Triangle tri = out.triangles[t];
      for (std::size_t e = 0; e < 3; ++e) {
        if (tri[e] != a || tri[(e + 1) % 3] != b) continue;
        const std::uint32_t c = tri[(e + 2) % 3];
        out.triangles[t] = {cycle[0], cycle[1], c};
        for (std::size_t i = 1; i + 1 < cycle.size(); ++i) {
          out.triangles.push_back({cycle[i], cycle[i + 1], c});
          tri_is_fine.push_back(0);
        }
        ++res.report.split_triangles;
        return true;
      }
    }
    return false;
  };

  for (const auto& [face, edges] : face_edges) {
    std::vector<OpenEdge> coarse_segs, fine_segs;
    for (const auto& e : edges) (e.fine ? fine_segs : coarse_segs).push_back(e);

    // Fine open edges into chains and loops.
    std::map<std::uint32_t, std::vector<std::size_t>> adj;
    for (std::size_t i = 0; i < fine_segs.size(); ++i) {
      adj[fine_segs[i].from].push_back(i);
      adj[fine_segs[i].to].push_back(i);
    }
    bool failed = false;
    for (const auto& [v, inc] : adj)
      if (inc.size() > 2) failed = true;
    struct Chain {
      std::vector<std::uint32_t> verts;
      bool loop = false;
      bool reversed_vs_triangles = false;  // chain order follows triangle direction
    };
    std::vector<Chain> chains;
    std::vector<std::uint8_t> seg_used(fine_segs.size(), 0);
    auto walk = [&](std::uint32_t start, std::size_t first_seg) {
      Chain ch;
      ch.verts.push_back(start);
      std::uint32_t cur = start;
      std::size_t seg = first_seg;
      ch.reversed_vs_triangles = fine_segs[seg].from != start;
      while (true) {
        seg_used[seg] = 1;
        const std::uint32_t nxt = fine_segs[seg].from == cur ? fine_segs[seg].to : fine_segs[seg].from;
        if (nxt == start) {
          ch.loop = true;
          break;
        }
        ch.verts.push_back(nxt);
        cur = nxt;
        std::optional<std::size_t> next_seg;
        for (auto cand : adj[cur])
          if (!seg_used[cand]) next_seg = cand;
        if (!next_seg) break;
        seg = *next_seg;
      }
      return ch;
    };
    if (!failed) {
      for (const auto& [v, inc] : adj)
        if (inc.size() == 1 && !seg_used[inc[0]]) chains.push_back(walk(v, inc[0]));
      for (std::size_t i = 0; i < fine_segs.size(); ++i)
        if (!seg_used[i]) chains.push_back(walk(fine_segs[i].from, i));
    }

    std::vector<std::vector<std::uint32_t>> cycles, splits;
    std::vector<std::uint8_t> chain_used(chains.size(), 0);
    auto line_of = [&](std::uint32_t v) -> std::optional<std::uint64_t> {
      if (v < lines.size() && lines[v].on_coarse_edge) return lines[v].coarse_edge;
      return std::nullopt;
    };

    // Nearest unused open chain with an endpoint on `line`; flip means the
    // chain is entered at its back.
    auto take_nearest = [&](std::uint64_t line, std::uint32_t from) -> std::optional<std::pair<std::size_t, bool>> {
      std::optional<std::pair<std::size_t, bool>> best;
      double best_d = 0.0;
      for (std::size_t c = 0; c < chains.size(); ++c) {
        if (chain_used[c] || chains[c].loop) continue;
        for (int flip = 0; flip < 2; ++flip) {
          const std::uint32_t entry = flip ? chains[c].verts.back() : chains[c].verts.front();
          if (line_of(entry) != line) continue;
          const double dist = distance(out.vertices[entry], out.vertices[from]);
          if (!best || dist < best_d) {
            best = std::pair{c, flip != 0};
            best_d = dist;
          }
        }
      }
      return best;
    };
    auto append_chain = [&](std::vector<std::uint32_t>& cycle, std::size_t c, bool flip) {
      chain_used[c] = 1;
      std::vector<std::uint32_t> path = chains[c].verts;
      if (flip) std::reverse(path.begin(), path.end());
      for (auto v : path)
        if (cycle.empty() || v != cycle.back()) cycle.push_back(v);
    };

    // Each coarse segment a -> b is closed by fine chains running from a's
    // coarse edge to b's, possibly hopping along further coarse edges that
    // the fine contour touches twice.
    for (const auto& seg : coarse_segs) {
      if (failed) break;
      // The coarse triangle runs seg.from -> seg.to, so the patch cycle must
      // close with seg.to -> seg.from.
      const std::uint32_t a = seg.from, b = seg.to;
      const auto la = line_of(a), lb = line_of(b);
      if (!la || !lb) {
        failed = true;
        break;
      }
      std::vector<std::uint32_t> cycle{a};
      std::uint64_t line = *la;
      bool closed = false;
      for (std::size_t step = 0; step <= chains.size(); ++step) {
        const auto pick = take_nearest(line, cycle.back());
        if (!pick) break;
        append_chain(cycle, pick->first, pick->second);
        const auto l = line_of(cycle.back());
        if (!l) break;
        if (*l == *lb) {
          if (cycle.back() != b) cycle.push_back(b);
          closed = true;
          break;
        }
        line = *l;
      }
      if (!closed) {
        failed = true;
        break;
      }
      (chain_on_segment(cycle) ? splits : cycles).push_back(std::move(cycle));
    }
    // Leftover fine chains close among themselves along shared coarse edges;
    // closed loops are capped.
    for (std::size_t c = 0; c < chains.size() && !failed; ++c) {
      if (chain_used[c]) continue;
      std::vector<std::uint32_t> cycle;
      if (chains[c].loop) {
        chain_used[c] = 1;
        cycle = chains[c].verts;
        if (!chains[c].reversed_vs_triangles) std::reverse(cycle.begin(), cycle.end());
        ++res.report.capped_loops;
        cycles.push_back(std::move(cycle));
        continue;
      }
      // Traverse the first chain against its triangles' direction.
      append_chain(cycle, c, !chains[c].reversed_vs_triangles);
      const auto start_line = line_of(cycle.front());
      bool closed = false;
      for (std::size_t step = 0; start_line && step <= chains.size(); ++step) {
        const auto l = line_of(cycle.back());
        if (!l) break;
        if (*l == *start_line) {
          closed = true;
          break;
        }
        const auto pick = take_nearest(*l, cycle.back());
        if (!pick) break;
        append_chain(cycle, pick->first, pick->second);
      }
      if (!closed) {
        failed = true;
        break;
      }
      cycles.push_back(std::move(cycle));
    }
    if (failed) {
      ++res.report.patch_failures;
      continue;
    }
    if (!cycles.empty() || !splits.empty()) ++res.report.patched_faces;
    for (const auto& cyc : splits)
      if (cyc.size() > 2 && !split_coarse(cyc)) add_fan(cyc);
    for (auto& cyc : cycles) add_fan(std::move(cyc));
  }

  // Remaining open edges on interface faces, away from the domain boundary.
  {
    std::vector<detail::FaceId> fa, fb, common;
    const Box dom = grid.bounds();
    const double tol = snap;
    auto on_boundary = [&](const Vec3& p, std::size_t axis) {
      return std::abs(p[axis] - dom.lo[axis]) <= tol || std::abs(p[axis] - dom.hi[axis]) <= tol;
    };
    for (const auto& oe : collect_open()) {
      faces_of(oe.from, fa);
      faces_of(oe.to, fb);
      common.clear();
      std::set_intersection(fa.begin(), fa.end(), fb.begin(), fb.end(), std::back_inserter(common));
      bool on_interface = false;
      for (const auto& f : common)
        if (interface_faces.count(f)) on_interface = true;
      if (!on_interface) continue;
      const Vec3 &p = out.vertices[oe.from], &q = out.vertices[oe.to];
      bool boundary = false;
      for (std::size_t ax = 0; ax < 3; ++ax)
        if (on_boundary(p, ax) && on_boundary(q, ax) && std::abs(p[ax] - q[ax]) <= tol) boundary = true;
      if (!boundary) ++res.report.interface_open_edges;
    }
  }
  return res;
}

}  // namespace mcuq
