#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>

#include "parseval/io.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("psvb_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) {
    const std::string cmd = "cd '" + dir_.string() + "' && '" + PSVB_BIN + "' " + args + " > out.txt 2> err.txt";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  }
  std::string out() const { return parseval::io::read_file(dir_ / "out.txt"); }
  void write(const std::string& name, const std::string& text) { parseval::io::write_file(dir_ / name, text); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, VerifyExitCodes) {
  write("id.json", R"({"dims": 2, "in_channels": 1, "modules": []})");
  EXPECT_EQ(run("verify id.json --grid 8x8"), 0);
  EXPECT_NE(out().find("passed=true"), std::string::npos);

  write("scaled.json", R"({"dims": 2, "in_channels": 2, "modules": [{"kind": "mult", "gain": 1.1}]})");
  EXPECT_EQ(run("verify scaled.json --grid 8x8"), 1);
  const std::string text = out();
  const auto pos = text.find("operator_norm=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_NEAR(std::stod(text.substr(pos + 14)), 1.1, 1e-12);

  write("chain16.json", R"({"dims": 2, "in_channels": 8, "seed": 2,
    "modules": [{"kind": "householder_chain", "length": 16}]})");
  EXPECT_EQ(run("verify chain16.json --grid 16x16"), 0);

  write("broken.json", R"({"modules": [)");
  EXPECT_EQ(run("verify broken.json"), 2);
  EXPECT_EQ(run("verify missing.json"), 2);
  EXPECT_EQ(run("nonsense"), 2);
}

TEST_F(Cli, NormOfScaledIdentity) {
  parseval::Filter h(1, 1, 2);
  h.add_tap({0, 0}, Eigen::MatrixXd::Constant(1, 1, 2.0));
  parseval::io::save(dir_ / "two.psvb", h);
  EXPECT_EQ(run("norm two.psvb --grid 8x8 --oversample 2"), 0);
  EXPECT_NE(out().find("operator_norm=2\n"), std::string::npos);
  EXPECT_NE(out().find("oversampled_norm=2\n"), std::string::npos);
}

TEST_F(Cli, DenoiseWithZeroNoiseAndThresholdIsExact) {
  EXPECT_EQ(run("denoise phantom --grid 32x32 --sigma 0 --tau 0 -o out.psvb"), 0);
  EXPECT_NE(out().find("psnr_denoised=999"), std::string::npos);
  const auto s = parseval::io::load_signal(dir_ / "out.psvb");
  EXPECT_EQ((s.data() - parseval::phantom(parseval::Grid{32, 32}).data()).cwiseAbs().maxCoeff(), 0.0);
}

TEST_F(Cli, ReconstructFullMaskAndDivergence) {
  write("id.json", R"({"type": "identity"})");
  EXPECT_EQ(run("reconstruct --grid 16x16 --scheme random --rate 1 --sigma 0 --denoiser id.json --trace-out t.csv"), 0);
  const std::string text = out();
  const auto pos = text.find("psnr_pnp=");
  ASSERT_NE(pos, std::string::npos);
  EXPECT_GE(std::stod(text.substr(pos + 9)), 100.0);
  EXPECT_EQ(parseval::io::read_file(dir_ / "t.csv").rfind("iteration,gap\n", 0), 0u);

  EXPECT_EQ(run("reconstruct --grid 16x16 --model identity --alpha 5"), 3);
}

TEST_F(Cli, StabilityRejectsLargeBeta) {
  EXPECT_EQ(run("stability --grid 8x8 --model identity --trials 1 --beta 0.6"), 2);
  EXPECT_EQ(run("stability --grid 8x8 --model identity --trials 2 --delta 0"), 0);
}

TEST_F(Cli, MaskAndConvert) {
  EXPECT_EQ(run("mask --grid 16x16 --acceleration 1 -o m.psvb"), 0);
  EXPECT_NE(out().find("fraction=1\n"), std::string::npos);
  EXPECT_EQ(run("convert m.psvb m2.psvb"), 0);
  EXPECT_EQ(parseval::io::read_file(dir_ / "m.psvb"), parseval::io::read_file(dir_ / "m2.psvb"));

  parseval::io::save(dir_ / "p.psvb", parseval::phantom(parseval::Grid{8, 8}));
  EXPECT_EQ(run("convert p.psvb p.csv"), 0);
  EXPECT_EQ(run("convert p.csv q.psvb"), 0);
  EXPECT_EQ(parseval::io::read_file(dir_ / "p.psvb"), parseval::io::read_file(dir_ / "q.psvb"));
}
