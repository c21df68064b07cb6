#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcuq/vec3.hpp"

namespace mcuq {

using Triangle = std::array<std::uint32_t, 3>;

/// Deduplicated triangle mesh with named per-vertex scalar channels.
struct IndexedMesh {
  std::vector<Vec3> vertices;
  std::vector<Triangle> triangles;
  std::map<std::string, std::vector<double>> channels;

  bool empty() const { return triangles.empty(); }

  const std::vector<double>& channel(const std::string& name) const {
    auto it = channels.find(name);
    if (it == channels.end()) throw std::out_of_range("mesh has no channel '" + name + "'");
    return it->second;
  }

  void set_channel(const std::string& name, std::vector<double> values) {
    if (values.size() != vertices.size())
      throw std::invalid_argument("channel '" + name + "' length does not match vertex count");
    channels[name] = std::move(values);
  }

  /// Throws std::logic_error on the first broken invariant.
  void validate() const {
    const auto n = vertices.size();
    for (const auto& t : triangles) {
      if (t[0] >= n || t[1] >= n || t[2] >= n) throw std::logic_error("triangle index out of range");
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) throw std::logic_error("degenerate triangle");
    }
    for (const auto& [name, values] : channels)
      if (values.size() != n) throw std::logic_error("channel '" + name + "' length mismatch");
  }

  friend bool operator==(const IndexedMesh&, const IndexedMesh&) = default;
};

inline Box mesh_bounds(const IndexedMesh& mesh) {
  if (mesh.vertices.empty()) return {};
  Box b{mesh.vertices.front(), mesh.vertices.front()};
  for (const auto& v : mesh.vertices) {
    b.lo = cwise_min(b.lo, v);
    b.hi = cwise_max(b.hi, v);
  }
  return b;
}

/// Keeps the triangles for which keep(index) is true and drops vertices no
/// longer referenced. Vertex order and channels follow the original.
template <class Pred>
IndexedMesh filter_triangles(const IndexedMesh& mesh, Pred keep) {
  std::vector<std::uint32_t> remap(mesh.vertices.size(), UINT32_MAX);
  std::vector<Triangle> tris;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    if (keep(t)) {
      tris.push_back(mesh.triangles[t]);
      for (auto v : mesh.triangles[t]) remap[v] = 0;
    }
  IndexedMesh out;
  std::uint32_t next = 0;
  for (std::size_t v = 0; v < remap.size(); ++v)
    if (remap[v] == 0) {
      remap[v] = next++;
      out.vertices.push_back(mesh.vertices[v]);
    }
  for (auto& t : tris)
    for (auto& v : t) v = remap[v];
  out.triangles = std::move(tris);
  for (const auto& [name, values] : mesh.channels) {
    std::vector<double> kept;
    kept.reserve(out.vertices.size());
    for (std::size_t v = 0; v < remap.size(); ++v)
      if (remap[v] != UINT32_MAX) kept.push_back(values[v]);
    out.channels[name] = std::move(kept);
  }
  return out;
}

inline Vec3 triangle_centroid(const IndexedMesh& mesh, const Triangle& t) {
  return (mesh.vertices[t[0]] + mesh.vertices[t[1]] + mesh.vertices[t[2]]) * (1.0 / 3.0);
}

}  // namespace mcuq
