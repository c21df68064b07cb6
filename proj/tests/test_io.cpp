#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcuq/report.hpp"
#include "support.hpp"

using namespace mcuq;
using namespace mcuq::testing;

namespace {

std::filesystem::path temp(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

IndexedMesh sample_mesh() {
  ExtractionConfig cfg;
  cfg.isovalue = 0.1;
  return attach_error_channel(field_grid(FieldKind::Tangle, 12), cfg);
}

}  // namespace

TEST(Ply, RoundTripWithChannels) {
  const IndexedMesh m = sample_mesh();
  const IndexedMesh back = decode_ply(encode_ply(m));
  ASSERT_EQ(back.vertices.size(), m.vertices.size());
  EXPECT_EQ(back.triangles, m.triangles);
  for (std::size_t v = 0; v < m.vertices.size(); ++v)
    EXPECT_EQ(back.vertices[v].y, static_cast<double>(static_cast<float>(m.vertices[v].y)));
  ASSERT_EQ(back.channels.size(), m.channels.size());
  const auto& a = m.channel("approx_error");
  const auto& b = back.channel("approx_error");
  for (std::size_t v = 0; v < a.size(); ++v) EXPECT_EQ(b[v], static_cast<double>(static_cast<float>(a[v])));
}

TEST(Ply, FileRoundTripIsByteStable) {
  const IndexedMesh m = sample_mesh();
  const auto path = temp("mcuq_io_rt.ply");
  write_ply(path, m);
  const IndexedMesh back = read_ply(path);
  EXPECT_EQ(encode_ply(back), encode_ply(m));
  std::filesystem::remove(path);
}

TEST(Ply, TruncatedOrForeignBytesAreFormatErrors) {
  const std::string bytes = encode_ply(sample_mesh());
  EXPECT_THROW(decode_ply(bytes.substr(0, bytes.size() - 5)), FormatError);
  EXPECT_THROW(decode_ply("not a ply file"), FormatError);
  EXPECT_THROW(decode_ply(""), FormatError);
}

TEST(Ply, ChannelNameRules) {
  EXPECT_NO_THROW(validate_channel_name("variation_LC"));
  EXPECT_THROW(validate_channel_name(""), std::invalid_argument);
  EXPECT_THROW(validate_channel_name("has space"), std::invalid_argument);
  EXPECT_THROW(validate_channel_name(std::string(32, 'a')), std::invalid_argument);
  IndexedMesh m = sample_mesh();
  m.channels["bad name"] = std::vector<double>(m.vertices.size());
  EXPECT_THROW(encode_ply(m), std::invalid_argument);
}

TEST(Obj, WritesSidecars) {
  const IndexedMesh m = sample_mesh();
  const auto path = temp("mcuq_io.obj");
  write_obj(path, m);
  const std::string obj = slurp(path);
  EXPECT_EQ(obj.rfind("v ", 0), 0u);
  const auto side = temp("mcuq_io.approx_error.txt");
  ASSERT_TRUE(std::filesystem::exists(side));
  std::istringstream lines(slurp(side));
  std::size_t n = 0;
  for (std::string line; std::getline(lines, line);) {
    EXPECT_EQ(std::stod(line), m.channel("approx_error")[n]);
    ++n;
  }
  EXPECT_EQ(n, m.vertices.size());
  for (const auto& [name, values] : m.channels) std::filesystem::remove(temp("mcuq_io." + name + ".txt"));
  std::filesystem::remove(path);
}

TEST(Json, SeventeenDigits) {
  EXPECT_EQ(dump_json(Json(0.1)), "0.10000000000000001");
  EXPECT_EQ(dump_json(Json(2.0)), "2.0");
  EXPECT_EQ(dump_json(Json(std::nan(""))), "null");
  EXPECT_EQ(dump_json(Json{{"a", 1}, {"b", "x"}}), "{\"a\":1,\"b\":\"x\"}");
  const double v = 0.35000192713034677;
  EXPECT_EQ(Json::parse(dump_json(Json(v))).get<double>(), v);
}

TEST(Json, CdfSubsampling) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i);
  const Json full = cdf_json(cdf(v));
  EXPECT_EQ(full.size(), 1000u);
  const Json sub = cdf_json(cdf(v), 10);
  ASSERT_EQ(sub.size(), 10u);
  EXPECT_EQ(sub.back()[0].get<double>(), 999.0);
  EXPECT_EQ(sub.back()[1].get<double>(), 1.0);
  EXPECT_EQ(sub.front()[0].get<double>(), 99.0);
}

TEST(Json, FieldSpecParsing) {
  const FieldSpec s = parse_field_spec(Json::parse(R"({"kind":"tangle","dims":16})"));
  EXPECT_EQ(s.dims, (Dims{16, 16, 16}));
  EXPECT_EQ(s.domain, default_domain(FieldKind::Tangle));
  const FieldSpec t = parse_field_spec(Json::parse(R"({"kind":"torus","dims":[8,9,10],"domain":[[0,0,0],[1,2,3]]})"));
  EXPECT_EQ(t.dims, (Dims{8, 9, 10}));
  EXPECT_EQ(parse_field_spec(field_spec_json(t)).domain, t.domain);
  EXPECT_THROW(parse_field_spec(Json::parse(R"({"kind":"tangle","dims":1})")), std::invalid_argument);
  EXPECT_THROW(parse_field_spec(Json::parse(R"({"kind":"nope","dims":4})")), std::invalid_argument);
  EXPECT_THROW(parse_field_spec(Json::parse(R"({"kind":"tangle","dims":4,"domain":[[0,0,0],[0,1,1]]})")), std::invalid_argument);
  EXPECT_ANY_THROW(parse_field_spec(Json::parse(R"({"dims":4})")));
}

TEST(Json, BoxParsing) {
  EXPECT_EQ(parse_box_json(Json::parse(R"({"lo":[0,0,0],"hi":[1,1,1]})")), (Box{{0, 0, 0}, {1, 1, 1}}));
  EXPECT_THROW(parse_box_json(Json::parse(R"([[1,0,0],[0,1,1]])")), std::invalid_argument);
  EXPECT_THROW(parse_box_json(Json::parse("[1,2]")), std::invalid_argument);
}
