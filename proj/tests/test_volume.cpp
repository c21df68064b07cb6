#include <gtest/gtest.h>

#include <filesystem>

#include "support.hpp"

using namespace mcuq;
using namespace mcuq::testing;

TEST(ScalarGrid, RejectsBadConstruction) {
  EXPECT_THROW(ScalarGrid({2, 2, 2}, {}, {1, 1, 1}, std::vector<double>(7)), std::invalid_argument);
  EXPECT_THROW(ScalarGrid({2, 2, 2}, {}, {1, 0, 1}, std::vector<double>(8)), std::invalid_argument);
  std::vector<double> bad(8, 0.0);
  bad[3] = std::nan("");
  EXPECT_THROW(ScalarGrid({2, 2, 2}, {}, {1, 1, 1}, bad), std::invalid_argument);
}

TEST(ScalarGrid, IndexingAndRange) {
  std::vector<double> v(24);
  for (std::size_t n = 0; n < v.size(); ++n) v[n] = static_cast<double>(n) - 5.0;
  const ScalarGrid g({2, 3, 4}, {1, 2, 3}, {0.5, 0.25, 2}, v);
  EXPECT_EQ(g.at(1, 2, 3), v[1 + 2 * (2 + 3 * 3)]);
  EXPECT_DOUBLE_EQ(g.min_value(), -5.0);
  EXPECT_DOUBLE_EQ(g.max_value(), 18.0);
  EXPECT_EQ(g.position({1, 2, 3}), (Vec3{1.5, 2.5, 9.0}));
}

TEST(AnalyticField, OriginValues) {
  EXPECT_DOUBLE_EQ(eval_analytic(make_field(FieldKind::Tangle), {0, 0, 0}), 0.4);
  EXPECT_DOUBLE_EQ(eval_analytic(make_field(FieldKind::Teardrop), {0, 0.5, 0}), -0.25);
}

TEST(AnalyticField, MatchesIndependentEvaluation) {
  // Values from tests/oracles/derive.py (50-digit mpmath).
  EXPECT_NEAR(eval_analytic(make_field(FieldKind::MarschnerLobb), {0, 0, 1}), 0.2, 1e-15);
  const Vec3 p{0.3, -0.2, 0.4};
  EXPECT_NEAR(eval_analytic(make_field(FieldKind::MarschnerLobb), p), 0.35711382750947229, 1e-15);
  EXPECT_NEAR(eval_analytic(make_field(FieldKind::Tangle), p), 0.1453, 1e-15);
  EXPECT_NEAR(eval_analytic(make_field(FieldKind::Teardrop), p), -0.194735, 1e-15);
  EXPECT_NEAR(eval_analytic(make_field(FieldKind::Torus), p), 0.15366692347216064, 1e-15);
  EXPECT_NEAR(eval_analytic(make_field(FieldKind::Tubey), p), 1.72931309, 1e-13);
}

TEST(AnalyticField, ParameterValidation) {
  EXPECT_THROW(parse_field_kind("klein"), std::invalid_argument);
  auto f = make_field(FieldKind::Torus);
  f.params.erase("r1");
  EXPECT_THROW(f.validate(), std::invalid_argument);
  EXPECT_NO_THROW(make_field(FieldKind::MarschnerLobb, {{"f_M", 4}}).validate());
  EXPECT_EQ(default_domain(FieldKind::Tubey), (Box{{-3, -3, -3}, {3, 3, 3}}));
}

TEST(SampleToGrid, LinearCorners) {
  const ScalarGrid g = sample_to_grid(make_field(FieldKind::AxisLinear), {2, 2, 2}, {0, 0, 0}, {1, 1, 1});
  EXPECT_EQ(g.data(), (std::vector<double>{0, 1, 0, 1, 0, 1, 0, 1}));
}

TEST(SampleToGrid, TangleFirstSample) {
  const ScalarGrid g = field_grid(FieldKind::Tangle, 32);
  EXPECT_EQ(g.data().size(), 32768u);
  EXPECT_DOUBLE_EQ(g.data()[0], 0.4);
  EXPECT_EQ(g.position({31, 31, 31}), (Vec3{1, 1, 1}));
}

TEST(SampleToGrid, RejectsSingleNodeAxis) {
  EXPECT_THROW(sample_to_grid(make_field(FieldKind::Tangle), {1, 4, 4}, {-1, -1, -1}, {1, 1, 1}), std::invalid_argument);
}

TEST(RawIo, DecodesU8AndU16) {
  const std::string u8 = {0, 1, 2, 3, 4, 5, 6, 7};
  EXPECT_EQ(decode_raw(u8, {2, 2, 2}, ValueType::U8).data(), (std::vector<double>{0, 1, 2, 3, 4, 5, 6, 7}));
  std::string u16(16, '\0');
  u16[0] = 1;
  EXPECT_DOUBLE_EQ(decode_raw(u16, {2, 2, 2}, ValueType::U16LE).data()[0], 1.0);
}

TEST(RawIo, TruncatedFileIsFormatError) {
  EXPECT_THROW(decode_raw(std::string(7, '\0'), {2, 2, 2}, ValueType::U8), FormatError);
}

TEST(RawIo, F32RoundTripThroughFile) {
  const ScalarGrid g = field_grid(FieldKind::Tangle, 8);
  const auto path = std::filesystem::temp_directory_path() / "mcuq_volume_rt.f32";
  write_raw(path, g, ValueType::F32LE);
  const ScalarGrid back = load_raw(path, g.dims(), ValueType::F32LE, g.origin(), g.spacing());
  for (std::size_t n = 0; n < g.data().size(); ++n)
    EXPECT_EQ(back.data()[n], static_cast<double>(static_cast<float>(g.data()[n])));
  std::filesystem::remove(path);
  EXPECT_THROW(load_raw(path, g.dims(), ValueType::F32LE), IoError);
}

TEST(EdgeStencil, InteriorLinear) {
  const ScalarGrid g = sample_to_grid(make_field(FieldKind::AxisLinear), {8, 3, 3}, {0, 0, 0}, {7, 2, 2});
  const EdgeStencil s = edge_stencil(g, {{3, 1, 1}, Axis::X});
  EXPECT_EQ(s.values, (std::array<double, 4>{2, 3, 4, 5}));
  EXPECT_DOUBLE_EQ(s.h, 1.0);
}

TEST(EdgeStencil, BorderPolicies) {
  const ScalarGrid g = sample_to_grid(make_field(FieldKind::AxisLinear), {5, 2, 2}, {0, 0, 0}, {4, 1, 1});
  const EdgeStencil clamp = edge_stencil(g, {{0, 0, 0}, Axis::X}, BoundaryPolicy::Clamp);
  EXPECT_EQ(clamp.at(-1), clamp.at(0));
  // f = x^2 sampled from x = 0: mirroring about the border node gives f(-1) = f(1).
  std::vector<double> sq;
  for (int k = 0; k < 2; ++k)
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 5; ++i) sq.push_back(i * i);
  const ScalarGrid q({5, 2, 2}, {}, {1, 1, 1}, sq);
  const EdgeStencil mirror = edge_stencil(q, {{0, 0, 0}, Axis::X}, BoundaryPolicy::MirrorOnce);
  EXPECT_EQ(mirror.at(-1), mirror.at(1));
  const EdgeStencil far = edge_stencil(q, {{3, 0, 0}, Axis::X}, BoundaryPolicy::MirrorOnce);
  EXPECT_EQ(far.at(2), q.at(3, 0, 0));
}

TEST(WenoStencil, ClampsAtBorders) {
  const ScalarGrid g = sample_to_grid(make_field(FieldKind::AxisLinear), {4, 2, 2}, {0, 0, 0}, {3, 1, 1});
  const WenoStencil w = weno_stencil(g, {{0, 0, 0}, Axis::X});
  EXPECT_EQ(w.values, (std::array<double, 7>{0, 0, 0, 0, 1, 2, 3}));
}
