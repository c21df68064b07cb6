#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

#include "mcuq/report.hpp"
#include "support.hpp"

using namespace mcuq;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("mcuq_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args, std::string* out = nullptr) {
    const fs::path log = dir_ / "stdout.txt";
    const std::string cmd = "cd '" + dir_.string() + "' && '" MCUQ_CLI_PATH "' " + args + " > '" + log.string() + "' 2> '" +
                            (dir_ / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    if (out) *out = slurp(log);
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, HelpAndUsage) {
  EXPECT_EQ(run("--help"), 0);
  EXPECT_EQ(run("extract"), 1);
  EXPECT_EQ(run("bogus"), 1);
}

TEST_F(Cli, SynthWritesVolumeAndSidecar) {
  ASSERT_EQ(run("synth tangle 32 -o t.f32"), 0);
  EXPECT_EQ(fs::file_size(dir_ / "t.f32"), 32u * 32 * 32 * 4);
  const Json side = Json::parse(slurp(dir_ / "t.json"));
  EXPECT_EQ(side.at("kind"), "tangle");
  EXPECT_EQ(side.at("dims"), Json::parse("[32,32,32]"));
  ASSERT_EQ(run("synth tubey 16 --domain -3 3 -o tb.f32"), 0);
  EXPECT_EQ(Json::parse(slurp(dir_ / "tb.json")).at("origin"), Json::parse("[-3.0,-3.0,-3.0]"));
  EXPECT_EQ(run("synth tangle 1 -o bad.f32"), 1);
  EXPECT_EQ(run("synth klein 8 -o bad.f32"), 1);
}

TEST_F(Cli, ExtractWithErrorChannel) {
  ASSERT_EQ(run("synth tangle 32 -o t.f32"), 0);
  std::string out;
  ASSERT_EQ(run("extract t.f32 -k 0.1 -m weno --error -o t.ply", &out), 0);
  const Json j = Json::parse(out);
  EXPECT_GT(j.at("mesh").at("triangles").get<int>(), 0);
  const IndexedMesh m = read_ply(dir_ / "t.ply");
  EXPECT_EQ(m.vertices.size(), j.at("mesh").at("vertices").get<std::size_t>());
  EXPECT_TRUE(m.channels.contains("approx_error"));
  EXPECT_TRUE(m.channels.contains("bound_error"));
}

TEST_F(Cli, ExtractIsReproducible) {
  ASSERT_EQ(run("extract --field torus --dims 24 -k 0 -m cubic --error -o a.ply"), 0);
  ASSERT_EQ(run("--threads 1 extract --field torus --dims 24 -k 0 -m cubic --error -o b.ply"), 0);
  EXPECT_EQ(slurp(dir_ / "a.ply"), slurp(dir_ / "b.ply"));
}

TEST_F(Cli, CompareOnPlaneHasNoVariation) {
  std::string out;
  ASSERT_EQ(run("extract --field axis_linear --param d=0.03 --dims 10 --domain -1 1 -k 0 --compare linear,weno -o p.ply", &out), 0);
  EXPECT_LE(Json::parse(out).at("channels").at("variation_max").at("max").get<double>(), 1e-12);
}

TEST_F(Cli, RecoverWritesPairedMesh) {
  std::string out;
  ASSERT_EQ(run("extract --field teardrop --dims 32 -k -0.001 --box -0.4 -0.25 -0.25 0.4 0.25 0.25 --recover -o td.ply", &out), 0);
  EXPECT_TRUE(fs::exists(dir_ / "td.ply"));
  EXPECT_TRUE(fs::exists(dir_ / "td.recovered.ply"));
  const Json j = Json::parse(out);
  EXPECT_EQ(j.at("features").at("refinement").at("interface_open_edges"), 0);
}

TEST_F(Cli, ObjOutputWithSidecars) {
  ASSERT_EQ(run("extract --field sphere --dims 12 -k 0 --error -o s.obj"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "s.obj"));
  EXPECT_TRUE(fs::exists(dir_ / "s.approx_error.txt"));
}

TEST_F(Cli, ValidateAgainstReference) {
  ASSERT_EQ(run("extract --field tangle --dims 32 -k 0.1 --error -o c.ply"), 0);
  ASSERT_EQ(run("extract --field tangle --dims 96 -k 0.1 -o f.ply"), 0);
  std::string out;
  ASSERT_EQ(run("validate c.ply c.ply", &out), 0);
  EXPECT_LT(Json::parse(out).at("rms_measured").get<double>(), 1e-6);
  ASSERT_EQ(run("validate c.ply f.ply", &out), 0);
  const Json j = Json::parse(out);
  EXPECT_GT(j.at("spearman").get<double>(), 0.4);
  EXPECT_GT(j.at("rms_measured").get<double>(), 0.0);
  EXPECT_EQ(run("validate f.ply c.ply"), 1);
  EXPECT_EQ(run("validate missing.ply c.ply"), 1);
}

TEST_F(Cli, EmptySurfaceExitCode) {
  EXPECT_EQ(run("extract --field sphere --dims 8 -k 5 -o e.ply"), 2);
}
