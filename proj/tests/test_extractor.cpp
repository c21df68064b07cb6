#include <gtest/gtest.h>

#include "support.hpp"

using namespace mcuq;
using namespace mcuq::testing;

namespace {

ExtractionConfig config(double k, Method m = Method::Linear) {
  ExtractionConfig cfg;
  cfg.isovalue = k;
  cfg.method = m;
  return cfg;
}

}  // namespace

TEST(Tables, CaseIndexBits) {
  std::array<double, 8> v{};
  v.fill(1.0);
  EXPECT_EQ(mc::case_index(v, 0.0), 0);
  v[0] = -1.0;
  EXPECT_EQ(mc::case_index(v, 0.0), 1);
  v.fill(-1.0);
  EXPECT_EQ(mc::case_index(v, 0.0), 255);
}

TEST(Tables, TriangleCountsPerCase) {
  // Every mixed-sign case emits 1..5 triangles; uniform cases emit none.
  for (int c = 1; c < 255; ++c) {
    int tris = 0;
    mc::for_each_triangle(static_cast<std::uint8_t>(c), [&](int, int, int) { ++tris; });
    EXPECT_GT(tris, 0) << "case " << c;
    EXPECT_LE(tris, 5);
  }
  int none = 0;
  mc::for_each_triangle(0, [&](int, int, int) { ++none; });
  mc::for_each_triangle(255, [&](int, int, int) { ++none; });
  EXPECT_EQ(none, 0);
}

TEST(EdgeKey, RoundTrip) {
  const Dims d{5, 6, 7};
  for (std::size_t a = 0; a < 3; ++a) {
    const EdgeId e{{3, 4, 5}, static_cast<Axis>(a)};
    EXPECT_EQ(edge_from_key(d, edge_key(d, e)), e);
  }
  EXPECT_LT(edge_key(d, {{4, 0, 0}, Axis::Z}), edge_key(d, {{0, 1, 0}, Axis::X}));
}

TEST(Extract, PlaneIsExactForEveryMethod) {
  const ScalarGrid g = plane_grid(8);
  for (Method m : {Method::Linear, Method::Cubic, Method::Weno}) {
    const IndexedMesh mesh = extract(g, config(0.0, m));
    ASSERT_FALSE(mesh.empty());
    for (const auto& v : mesh.vertices) EXPECT_NEAR(v.x, 0.5, 1e-12);
    EXPECT_NO_THROW(mesh.validate());
  }
}

TEST(Extract, SphereIsClosedGenusZero) {
  const IndexedMesh mesh = extract(field_grid(FieldKind::Sphere, 16), config(0.0));
  const TopologyStats t = topology_stats(mesh);
  EXPECT_EQ(t.open_edges, 0u);
  EXPECT_EQ(t.nonmanifold_edges, 0u);
  EXPECT_EQ(t.euler, 2);
  EXPECT_EQ(t.components, 1u);
}

TEST(Extract, NormalsPointTowardDecreasingField) {
  // f = |p| - r grows outward, so triangle normals face the centre.
  const IndexedMesh mesh = extract(field_grid(FieldKind::Sphere, 16), config(0.0));
  std::size_t inward = 0;
  for (const auto& t : mesh.triangles) {
    const Vec3 a = mesh.vertices[t[0]], b = mesh.vertices[t[1]], c = mesh.vertices[t[2]];
    const Vec3 n = cross(b - a, c - a);
    if (dot(n, triangle_centroid(mesh, t)) < 0.0) ++inward;
  }
  EXPECT_EQ(inward, mesh.triangles.size());
}

TEST(Extract, TangleConfiguration) {
  const IndexedMesh mesh = extract(field_grid(FieldKind::Tangle, 32), config(0.1));
  EXPECT_GT(mesh.triangles.size(), 1000u);
  EXPECT_NO_THROW(mesh.validate());
  // The surface leaves the sampled domain, so open edges are allowed there.
  EXPECT_EQ(topology_stats(mesh).nonmanifold_edges, 0u);
}

TEST(Extract, DeterministicAcrossThreadCounts) {
  const ScalarGrid g = field_grid(FieldKind::Tangle, 24);
  auto cfg = config(0.1, Method::Weno);
  cfg.threads = 1;
  const IndexedMesh a = extract(g, cfg);
  for (unsigned t : {2u, 5u, 0u}) {
    cfg.threads = t;
    EXPECT_EQ(extract(g, cfg), a);
  }
}

TEST(Extract, VerticesLieOnTheirEdges) {
  const ScalarGrid g = field_grid(FieldKind::Torus, 20);
  const DetailedExtraction ex = extract_detailed(g, config(0.0, Method::Cubic));
  ASSERT_EQ(ex.edges.size(), ex.mesh.vertices.size());
  for (std::size_t v = 0; v < ex.edges.size(); ++v) {
    const Vec3 a = g.position(ex.edges[v].node);
    const std::size_t ax = axis_index(ex.edges[v].axis);
    const Vec3 p = ex.mesh.vertices[v];
    EXPECT_GE(p[ax], a[ax] - 1e-12);
    EXPECT_LE(p[ax], a[ax] + g.spacing()[ax] + 1e-12);
    EXPECT_TRUE(std::is_sorted(ex.edges.begin(), ex.edges.end()));
  }
}

TEST(Extract, EmptyWhenIsovalueOutsideRange) {
  EXPECT_TRUE(extract(field_grid(FieldKind::Sphere, 8), config(10.0)).empty());
  EXPECT_THROW(extract(field_grid(FieldKind::Sphere, 8), config(std::nan(""))), std::invalid_argument);
}

TEST(Extract, RegionSelectsMethodPerEdge) {
  const ScalarGrid g = field_grid(FieldKind::Tangle, 16);
  auto cfg = config(0.1, Method::Weno);
  cfg.region = Box{{0, 0, 0}, {1, 1, 1}};
  const IndexedMesh boxed = extract(g, cfg);
  const IndexedMesh lin = extract(g, config(0.1));
  const IndexedMesh weno = extract(g, config(0.1, Method::Weno));
  ASSERT_EQ(boxed.vertices.size(), lin.vertices.size());
  const DetailedExtraction ex = extract_detailed(g, cfg);
  for (std::size_t v = 0; v < boxed.vertices.size(); ++v) {
    const bool inside = cfg.region->contains(edge_midpoint(g, ex.edges[v]));
    EXPECT_EQ(boxed.vertices[v], inside ? weno.vertices[v] : lin.vertices[v]);
  }
  cfg.region = Box{{5, 5, 5}, {6, 6, 6}};
  EXPECT_THROW(extract(g, cfg), std::invalid_argument);
}

TEST(Compare, LinearFieldHasNoVariation) {
  const ScalarGrid g = field_grid(FieldKind::AxisLinear, 10, Box{{-1, -1, -1}, {1, 1, 1}}, {{"d", 0.03}});
  const IndexedMesh m = extract_compare(g, 0.0, {Method::Linear, Method::Weno});
  ASSERT_FALSE(m.empty());
  for (double v : m.channel("variation_LW")) EXPECT_NEAR(v, 0.0, 1e-12);
  for (double v : m.channel("variation_max")) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Compare, CubicFieldVariationMatchesKernel) {
  // f = x^3 along x on nodes -1..2 (h = 1); k = 1/8 crosses edge [0,1] at
  // 0.5 for the cubic and at 0.125 for linear.
  std::vector<double> data;
  const Dims d{4, 2, 2};
  for (std::size_t k = 0; k < 2; ++k)
    for (std::size_t j = 0; j < 2; ++j)
      for (std::size_t i = 0; i < 4; ++i) {
        const double x = static_cast<double>(i) - 1.0;
        data.push_back(x * x * x);
      }
  const ScalarGrid g(d, {-1, 0, 0}, {1, 1, 1}, data);
  const IndexedMesh m = extract_compare(g, 0.125, {Method::Linear, Method::Cubic});
  ASSERT_FALSE(m.vertices.empty());
  const double expected = std::abs(linear_crossing(0, 1, 0.125).alpha - 0.5) * 1.0;
  for (double v : m.channel("variation_LC")) EXPECT_NEAR(v, expected, 1e-12);
}

TEST(Compare, MaxDominatesPairs) {
  const IndexedMesh m = extract_compare(field_grid(FieldKind::Torus, 32), 0.0, {Method::Linear, Method::Cubic, Method::Weno});
  const auto& mx = m.channel("variation_max");
  for (const char* name : {"variation_LC", "variation_LW", "variation_CW"}) {
    const auto& c = m.channel(name);
    for (std::size_t v = 0; v < c.size(); ++v) EXPECT_GE(mx[v], c[v]);
  }
}

TEST(Compare, RejectsEmptyMethodSet) {
  const ScalarGrid g = field_grid(FieldKind::Sphere, 8);
  EXPECT_THROW(extract_compare(g, 0.0, {}), std::invalid_argument);
}
