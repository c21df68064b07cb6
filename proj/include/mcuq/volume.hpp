#pragma once

// Uniform-grid scalar fields: the ScalarGrid container, analytic test fields,
// boundary-resolved index access and edge stencils.

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mcuq/stencil.hpp"
#include "mcuq/vec3.hpp"

namespace mcuq {

struct Dims {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::size_t nz = 0;

  constexpr std::size_t operator[](std::size_t axis) const { return axis == 0 ? nx : (axis == 1 ? ny : nz); }
  constexpr std::size_t count() const { return nx * ny * nz; }
  friend constexpr bool operator==(const Dims&, const Dims&) = default;
};

enum class Axis : std::uint8_t { X = 0, Y = 1, Z = 2 };

constexpr std::size_t axis_index(Axis a) { return static_cast<std::size_t>(a); }

/// Grid node or cell min-corner.
struct Index3 {
  std::size_t i = 0;
  std::size_t j = 0;
  std::size_t k = 0;

  constexpr std::size_t operator[](std::size_t axis) const { return axis == 0 ? i : (axis == 1 ? j : k); }
  constexpr std::size_t& operator[](std::size_t axis) { return axis == 0 ? i : (axis == 1 ? j : k); }
  friend constexpr bool operator==(const Index3&, const Index3&) = default;
  friend constexpr auto operator<=>(const Index3& a, const Index3& b) {
    if (auto c = a.k <=> b.k; c != 0) return c;
    if (auto c = a.j <=> b.j; c != 0) return c;
    return a.i <=> b.i;
  }
};

using CellId = Index3;

/// Grid edge owned by its min-corner node. Ordering is the x-fastest node
/// order followed by axis, which is the canonical vertex order of meshes.
struct EdgeId {
  Index3 node;
  Axis axis = Axis::X;

  friend constexpr bool operator==(const EdgeId&, const EdgeId&) = default;
  friend constexpr auto operator<=>(const EdgeId& a, const EdgeId& b) {
    if (auto c = a.node <=> b.node; c != 0) return c;
    return a.axis <=> b.axis;
  }
};

enum class BoundaryPolicy : std::uint8_t { Clamp, MirrorOnce };

/// Maps a possibly out-of-range index onto [0, n). Clamp repeats the border
/// sample; MirrorOnce reflects about the border node, then clamps.
constexpr std::size_t resolve_index(std::ptrdiff_t i, std::size_t n, BoundaryPolicy policy) {
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
  if (policy == BoundaryPolicy::MirrorOnce) {
    if (i < 0) i = -i;
    if (i > last) i = 2 * last - i;
  }
  if (i < 0) i = 0;
  if (i > last) i = last;
  return static_cast<std::size_t>(i);
}

/// Immutable samples on a uniform lattice, x-fastest.
class ScalarGrid {
 public:
  ScalarGrid() = default;

  ScalarGrid(Dims dims, Vec3 origin, Vec3 spacing, std::vector<double> data)
      : dims_(dims), origin_(origin), spacing_(spacing), data_(std::move(data)) {
    if (dims_.nx == 0 || dims_.ny == 0 || dims_.nz == 0)
      throw std::invalid_argument("ScalarGrid: dimensions must be positive");
    if (data_.size() != dims_.count())
      throw std::invalid_argument("ScalarGrid: data length " + std::to_string(data_.size()) + " != nx*ny*nz " +
                                  std::to_string(dims_.count()));
    if (!(spacing_.x > 0.0 && spacing_.y > 0.0 && spacing_.z > 0.0) || !is_finite(spacing_))
      throw std::invalid_argument("ScalarGrid: spacing must be strictly positive");
    if (!is_finite(origin_)) throw std::invalid_argument("ScalarGrid: origin must be finite");
    min_ = std::numeric_limits<double>::infinity();
    max_ = -std::numeric_limits<double>::infinity();
    for (double v : data_) {
      if (!std::isfinite(v)) throw std::invalid_argument("ScalarGrid: non-finite sample");
      min_ = std::min(min_, v);
      max_ = std::max(max_, v);
    }
  }

  const Dims& dims() const { return dims_; }
  const Vec3& origin() const { return origin_; }
  const Vec3& spacing() const { return spacing_; }
  const std::vector<double>& data() const { return data_; }
  double min_value() const { return min_; }
  double max_value() const { return max_; }
  double max_abs() const { return std::max(std::abs(min_), std::abs(max_)); }

  std::size_t linear_index(std::size_t i, std::size_t j, std::size_t k) const {
    return i + dims_.nx * (j + dims_.ny * k);
  }
  double at(std::size_t i, std::size_t j, std::size_t k) const { return data_[linear_index(i, j, k)]; }
  double at(const Index3& n) const { return at(n.i, n.j, n.k); }

  /// Sample at a signed index, resolved by the boundary policy.
  double at_resolved(std::ptrdiff_t i, std::ptrdiff_t j, std::ptrdiff_t k, BoundaryPolicy policy) const {
    return at(resolve_index(i, dims_.nx, policy), resolve_index(j, dims_.ny, policy),
              resolve_index(k, dims_.nz, policy));
  }

  Vec3 position(const Index3& n) const {
    return {origin_.x + static_cast<double>(n.i) * spacing_.x, origin_.y + static_cast<double>(n.j) * spacing_.y,
            origin_.z + static_cast<double>(n.k) * spacing_.z};
  }

  /// World-space bounds of the lattice.
  Box bounds() const {
    return {origin_, {origin_.x + static_cast<double>(dims_.nx - 1) * spacing_.x,
                      origin_.y + static_cast<double>(dims_.ny - 1) * spacing_.y,
                      origin_.z + static_cast<double>(dims_.nz - 1) * spacing_.z}};
  }

  Dims cell_dims() const {
    return {dims_.nx > 0 ? dims_.nx - 1 : 0, dims_.ny > 0 ? dims_.ny - 1 : 0, dims_.nz > 0 ? dims_.nz - 1 : 0};
  }

  bool contains_edge(const EdgeId& e) const {
    const std::size_t a = axis_index(e.axis);
    for (std::size_t d = 0; d < 3; ++d) {
      const std::size_t limit = d == a ? dims_[d] - 1 : dims_[d];
      if (e.node[d] >= limit) return false;
    }
    return true;
  }

 private:
  Dims dims_{};
  Vec3 origin_{};
  Vec3 spacing_{1.0, 1.0, 1.0};
  std::vector<double> data_;
  double min_ = 0.0;
  double max_ = 0.0;
};

// ---------------------------------------------------------------------------
// Analytic fields

enum class FieldKind : std::uint8_t { Tangle, Torus, TorusLiteral, MarschnerLobb, Teardrop, Tubey, Sphere, AxisLinear };

inline std::string_view to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::Tangle: return "tangle";
    case FieldKind::Torus: return "torus";
    case FieldKind::TorusLiteral: return "torus_literal";
    case FieldKind::MarschnerLobb: return "marschner_lobb";
    case FieldKind::Teardrop: return "teardrop";
    case FieldKind::Tubey: return "tubey";
    case FieldKind::Sphere: return "sphere";
    case FieldKind::AxisLinear: return "axis_linear";
  }
  return "unknown";
}

inline FieldKind parse_field_kind(std::string_view name) {
  std::string s;
  for (char c : name) {
    if (c == '-' || c == ' ') c = '_';
    s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (s == "tangle") return FieldKind::Tangle;
  if (s == "torus") return FieldKind::Torus;
  if (s == "torus_literal" || s == "torusliteral") return FieldKind::TorusLiteral;
  if (s == "marschner_lobb" || s == "marschnerlobb" || s == "ml") return FieldKind::MarschnerLobb;
  if (s == "teardrop") return FieldKind::Teardrop;
  if (s == "tubey") return FieldKind::Tubey;
  if (s == "sphere") return FieldKind::Sphere;
  if (s == "axis_linear" || s == "axislinear" || s == "linear" || s == "plane") return FieldKind::AxisLinear;
  throw std::invalid_argument("unknown field kind '" + std::string(name) + "'");
}

/// Analytic scalar field with named parameters.
///
/// Parameters per kind (defaults filled by make_field):
///   Torus, TorusLiteral: r0 = 0.1, r1 = 0.3
///   MarschnerLobb:       f_M = 6, alpha_ML = 0.25
///   Sphere:              radius = 0.5            (f = |p| - radius)
///   AxisLinear:          a = 1, b = 0, c = 0, d = 0  (f = a x + b y + c z + d)
struct AnalyticField {
  FieldKind kind = FieldKind::Tangle;
  std::map<std::string, double> params;

  double param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end())
      throw std::invalid_argument(std::string(to_string(kind)) + ": missing parameter '" + name + "'");
    return it->second;
  }

  void validate() const {
    for (const auto& name : required_params(kind)) {
      if (!std::isfinite(param(name)))
        throw std::invalid_argument(std::string(to_string(kind)) + ": parameter '" + name + "' is not finite");
    }
  }

  static std::vector<std::string> required_params(FieldKind kind) {
    switch (kind) {
      case FieldKind::Torus:
      case FieldKind::TorusLiteral: return {"r0", "r1"};
      case FieldKind::MarschnerLobb: return {"f_M", "alpha_ML"};
      case FieldKind::Sphere: return {"radius"};
      case FieldKind::AxisLinear: return {"a", "b", "c", "d"};
      default: return {};
    }
  }
};

inline AnalyticField make_field(FieldKind kind, const std::map<std::string, double>& overrides = {}) {
  AnalyticField f{kind, {}};
  switch (kind) {
    case FieldKind::Torus:
    case FieldKind::TorusLiteral: f.params = {{"r0", 0.1}, {"r1", 0.3}}; break;
    case FieldKind::MarschnerLobb: f.params = {{"f_M", 6.0}, {"alpha_ML", 0.25}}; break;
    case FieldKind::Sphere: f.params = {{"radius", 0.5}}; break;
    case FieldKind::AxisLinear: f.params = {{"a", 1.0}, {"b", 0.0}, {"c", 0.0}, {"d", 0.0}}; break;
    default: break;
  }
  for (const auto& [name, value] : overrides) f.params[name] = value;
  return f;
}

/// Domain the appendix samples each field on.
inline Box default_domain(FieldKind kind) {
  if (kind == FieldKind::Tubey) return {{-3.0, -3.0, -3.0}, {3.0, 3.0, 3.0}};
  return {{-1.0, -1.0, -1.0}, {1.0, 1.0, 1.0}};
}

inline double eval_analytic(const AnalyticField& field, const Vec3& p) {
  const double x = p.x, y = p.y, z = p.z;
  const double x2 = x * x, y2 = y * y, z2 = z * z;
  switch (field.kind) {
    case FieldKind::Tangle: return x2 * x2 + y2 * y2 + z2 * z2 - (x2 + y2 + z2 - 0.4);
    case FieldKind::Torus: {
      const double r0 = field.param("r0"), r1 = field.param("r1");
      const double ring = r1 - std::sqrt(x2 + y2);
      return ring * ring + z2 - r0 * r0;
    }
    case FieldKind::TorusLiteral: {
      // Printed form; reduces to a quadric since (sqrt(x^2+y^2))^2 = x^2+y^2.
      const double r0 = field.param("r0"), r1 = field.param("r1");
      const double rho = std::sqrt(x2 + y2);
      return r1 - rho * rho + z2 - r0 * r0;
    }
    case FieldKind::MarschnerLobb: {
      const double fm = field.param("f_M"), a = field.param("alpha_ML");
      const double r = std::sqrt(x2 + y2);
      const double rho = std::cos(2.0 * std::numbers::pi * fm * std::cos(std::numbers::pi * r / 2.0));
      return (1.0 - std::sin(std::numbers::pi * z / 2.0) + a * (1.0 + rho)) / (2.0 * (1.0 + a));
    }
    case FieldKind::Teardrop: return 0.5 * x2 * x2 * x + 0.5 * x2 * x2 - y2 - z2;
    case FieldKind::Tubey: {
      const double x4 = x2 * x2, y4 = y2 * y2, z4 = z2 * z2;
      const double s = x + y + z + 1.0;
      const double s2 = s * s;
      return -3.0 * x4 * x4 - 3.0 * y4 * y4 - 2.0 * z4 * z4 + 5.0 * x4 * y2 * z2 + 3.0 * x2 * y4 * z2 -
             4.0 * (x2 * x + y2 * y + z2 * z + 1.0) + s2 * s2 + 1.0;
    }
    case FieldKind::Sphere: return std::sqrt(x2 + y2 + z2) - field.param("radius");
    case FieldKind::AxisLinear:
      return field.param("a") * x + field.param("b") * y + field.param("c") * z + field.param("d");
  }
  throw std::invalid_argument("eval_analytic: unknown field kind");
}

/// Node-centred sampling: corners land exactly on the domain bounds.
inline ScalarGrid sample_to_grid(const AnalyticField& field, Dims dims, const Vec3& domain_min, const Vec3& domain_max) {
  if (dims.nx < 2 || dims.ny < 2 || dims.nz < 2)
    throw std::invalid_argument("sample_to_grid: every dimension must be >= 2");
  if (!(domain_max.x > domain_min.x && domain_max.y > domain_min.y && domain_max.z > domain_min.z))
    throw std::invalid_argument("sample_to_grid: domain_max must exceed domain_min componentwise");
  field.validate();

  const Vec3 spacing{(domain_max.x - domain_min.x) / static_cast<double>(dims.nx - 1),
                     (domain_max.y - domain_min.y) / static_cast<double>(dims.ny - 1),
                     (domain_max.z - domain_min.z) / static_cast<double>(dims.nz - 1)};
  auto coord = [&](std::size_t axis, std::size_t idx) {
    if (idx + 1 == dims[axis]) return domain_max[axis];
    return domain_min[axis] + static_cast<double>(idx) * spacing[axis];
  };

  std::vector<double> data(dims.count());
  std::size_t n = 0;
  for (std::size_t k = 0; k < dims.nz; ++k)
    for (std::size_t j = 0; j < dims.ny; ++j)
      for (std::size_t i = 0; i < dims.nx; ++i)
        data[n++] = eval_analytic(field, {coord(0, i), coord(1, j), coord(2, k)});
  return ScalarGrid(dims, domain_min, spacing, std::move(data));
}

inline ScalarGrid sample_to_grid(const AnalyticField& field, Dims dims, const Box& domain) {
  return sample_to_grid(field, dims, domain.lo, domain.hi);
}

/// Sample at node + offset * axis, resolved by the boundary policy.
inline double sample_along(const ScalarGrid& grid, const Index3& node, std::size_t axis, std::ptrdiff_t offset,
                           BoundaryPolicy policy) {
  std::array<std::ptrdiff_t, 3> idx{static_cast<std::ptrdiff_t>(node.i), static_cast<std::ptrdiff_t>(node.j),
                                    static_cast<std::ptrdiff_t>(node.k)};
  idx[axis] += offset;
  return grid.at_resolved(idx[0], idx[1], idx[2], policy);
}

/// Four samples f_{i-1} .. f_{i+2} along the edge axis.
inline EdgeStencil edge_stencil(const ScalarGrid& grid, const EdgeId& edge, BoundaryPolicy policy = BoundaryPolicy::Clamp) {
  if (!grid.contains_edge(edge)) throw std::out_of_range("edge_stencil: edge outside grid");
  const std::size_t a = axis_index(edge.axis);
  return EdgeStencil(sample_along(grid, edge.node, a, -1, policy), sample_along(grid, edge.node, a, 0, policy),
                     sample_along(grid, edge.node, a, 1, policy), sample_along(grid, edge.node, a, 2, policy),
                     grid.spacing()[a]);
}

/// Seven samples f_{i-3} .. f_{i+3} along the edge axis.
inline WenoStencil weno_stencil(const ScalarGrid& grid, const EdgeId& edge, BoundaryPolicy policy = BoundaryPolicy::Clamp) {
  if (!grid.contains_edge(edge)) throw std::out_of_range("weno_stencil: edge outside grid");
  const std::size_t a = axis_index(edge.axis);
  std::array<double, 7> v{};
  for (int o = -3; o <= 3; ++o) v[static_cast<std::size_t>(o + 3)] = sample_along(grid, edge.node, a, o, policy);
  return WenoStencil(v, grid.spacing()[a]);
}

}  // namespace mcuq
