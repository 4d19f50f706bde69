#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "histlayer/histlayer.hpp"
#include "support/test_images.hpp"

namespace histlayer {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Result {
  int code;
  std::string out;
};

Result run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " \"" HISTLAYER_CLI_PATH "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    std::random_device rd;
    dir_ = fs::temp_directory_path() / ("histlayer_cli_" + std::to_string(rd()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string png(const char* name, const ImageRGB8& img) {
    const auto p = dir_ / name;
    write_png(p, img);
    return "\"" + p.string() + "\"";
  }
  std::string path(const char* name) const { return "\"" + (dir_ / name).string() + "\""; }
  fs::path file(const char* name) const { return dir_ / name; }

  fs::path dir_;
};

TEST_F(Cli, HistOfMidGrayPeaksAtTheCenterBin) {
  const auto gray = png("gray.png", ImageRGB8(8, 8, {128, 128, 128}));
  const auto r = run("hist " + gray + " --channel y --bins 16");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  EXPECT_EQ(j.at("k"), 16);
  EXPECT_EQ(j.at("centers").size(), 16u);
  const auto mass = j.at("mass").get<std::vector<double>>();
  const auto peak = std::max_element(mass.begin(), mass.end()) - mass.begin();
  EXPECT_EQ(peak, BinningConfig::with_bins(16).bin_of(0.0039));
}

TEST_F(Cli, HistAllChannelsToFile) {
  const auto img = png("scene.png", testing::scene(16, 16, 1));
  ASSERT_EQ(run("hist " + img + " --bins 32 -o " + path("h.json")).code, 0);
  const auto j = json::parse(slurp(file("h.json")));
  for (const char* c : {"y", "u", "v"}) EXPECT_EQ(j.at(c).at("k"), 32);
  const auto cfg = BinningConfig::with_bins(32);
  const auto expected = channel_histograms(rgb_to_yuv(testing::scene(16, 16, 1), cfg), cfg);
  EXPECT_EQ(j.at("u").at("mass").get<std::vector<double>>(), expected[1].mass);
}

TEST_F(Cli, ErrorsAndUsage) {
  EXPECT_EQ(run("hist " + path("missing.png")).code, 2);
  std::ofstream(file("junk.png")) << "junk";
  EXPECT_EQ(run("hist " + path("junk.png")).code, 2);
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("frobnicate").code, 1);
  EXPECT_EQ(run("hist").code, 1);
  const auto img = png("a.png", ImageRGB8(4, 4));
  EXPECT_EQ(run("hist " + img + " --channel q").code, 1);
  EXPECT_EQ(run("hist " + img + " --bins 0").code, 1);
  EXPECT_EQ(run("hist " + img + " -o " + path("no/such/dir.json")).code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST_F(Cli, JointHistCsvAndJson) {
  const auto img = png("scene.png", testing::scene(8, 8, 2));
  const auto csv = run("jointhist " + img + " --bins 16 --channel y --channel2 u");
  ASSERT_EQ(csv.code, 0);
  std::istringstream lines(csv.out);
  std::string line;
  std::size_t rows = 0;
  double total = 0.0;
  while (std::getline(lines, line)) {
    ++rows;
    std::istringstream cells(line);
    std::string cell;
    std::size_t cols = 0;
    while (std::getline(cells, cell, ',')) {
      total += std::stod(cell);
      ++cols;
    }
    EXPECT_EQ(cols, 16u);
  }
  EXPECT_EQ(rows, 16u);
  EXPECT_GT(total, 0.9);
  EXPECT_LE(total, 1.0 + 1e-12);

  const auto js = run("jointhist " + img + " " + img + " --bins 8 --format json");
  ASSERT_EQ(js.code, 0);
  const auto j = json::parse(js.out);
  EXPECT_EQ(j.at("k"), 8);
  EXPECT_EQ(j.at("mass").size(), 8u);

  const auto other = png("small.png", testing::scene(4, 8, 2));
  EXPECT_EQ(run("jointhist " + img + " " + other).code, 3);
}

TEST_F(Cli, MetricsOfAnImageWithItself) {
  const auto scene = testing::scene(16, 16, 3);
  const auto img = png("a.png", scene);
  const auto r = run("metrics " + img + " " + img + " --bins 64");
  ASSERT_EQ(r.code, 0);
  const auto j = json::parse(r.out);
  const auto cfg = BinningConfig::with_bins(64);
  const auto yuv = rgb_to_yuv(scene, cfg);
  const auto floor = total_loss(yuv, yuv, channel_histograms(yuv, cfg), LossWeights{0, 1, 0}, cfg);
  for (std::size_t c = 0; c < 3; ++c) {
    EXPECT_EQ(j.at("emd").at(kChannelNames[c]).get<double>(), 0.0);
    const double d = j.at("d_mi").at(kChannelNames[c]).get<double>();
    EXPECT_NEAR(d, floor.mi[c], 1e-12);
    EXPECT_LT(d, 1.0);
  }
}

TEST_F(Cli, MetricsSizeHandling) {
  const auto a = png("a.png", testing::scene(16, 16, 3));
  const auto b = png("b.png", testing::scene(12, 20, 4));
  const auto emd_only = run("metrics " + a + " " + b + " --emd-only");
  ASSERT_EQ(emd_only.code, 0);
  const auto j = json::parse(emd_only.out);
  EXPECT_GT(j.at("emd").at("y").get<double>(), 0.0);
  EXPECT_FALSE(j.contains("d_mi"));
  EXPECT_EQ(run("metrics " + a + " " + b).code, 3);
}

TEST_F(Cli, MatchNeedsExactlyOneReference) {
  const auto a = png("a.png", testing::scene(8, 8, 1));
  EXPECT_EQ(run("match " + a + " -o " + path("o.png")).code, 1);
  std::ofstream(file("h.json")) << R"({"k": 4, "mass": [0, 1, 0, 0]})";
  EXPECT_EQ(run("match " + a + " --ref-image " + a + " --ref-hist " + path("h.json") + " -o " + path("o.png")).code,
            1);
  EXPECT_FALSE(fs::exists(file("o.png")));
}

TEST_F(Cli, SelfTransferKeepsTheImage) {
  const auto scene = testing::scene(16, 16, 5);
  const auto a = png("a.png", scene);
  const auto r = run("match " + a + " --ref-image " + a + " -o " + path("o.png") + " --trace " + path("t.csv") +
                     " --report " + path("r.json") + " --steps 300 --log-every 50");
  ASSERT_EQ(r.code, 0);
  const auto out = read_png(file("o.png"));
  double diff = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    diff += std::abs(out[i].r - scene[i].r) + std::abs(out[i].g - scene[i].g) + std::abs(out[i].b - scene[i].b);
  }
  EXPECT_LE(diff / (3.0 * static_cast<double>(out.size())), 2.0);

  const auto trace = slurp(file("t.csv"));
  EXPECT_EQ(trace.substr(0, trace.find('\n')), "step,total,emd,mi");
  EXPECT_EQ(std::count(trace.begin(), trace.end(), '\n'), 8);
  const auto report = json::parse(slurp(file("r.json")));
  for (const char* key : {"total", "emd_loss", "mi_loss", "emd", "mi"}) EXPECT_TRUE(report.contains(key)) << key;
  EXPECT_EQ(report.at("emd").size(), 3u);
}

TEST_F(Cli, GrayRampTakesOnSolidRed) {
  const auto ramp = png("ramp.png", testing::gray_ramp(32, 32));
  const auto red = png("red.png", ImageRGB8(32, 32, {255, 0, 0}));
  ASSERT_EQ(run("match " + ramp + " --ref-image " + red + " -o " + path("o.png") + " --report -").code, 0);
  const auto cfg = BinningConfig::with_bins(256);
  const auto out = channel_histograms(rgb_to_yuv(read_png(file("o.png")), cfg), cfg);
  const auto target = channel_histograms(rgb_to_yuv(ImageRGB8(1, 1, {255, 0, 0}), cfg), cfg);
  // Measured 0.019, 0.034, 0.028 at this size.
  for (std::size_t c = 0; c < 3; ++c) EXPECT_LT(emd(out[c], target[c]), 0.1) << kChannelNames[c];
}

TEST_F(Cli, DeltaHistogramFileConcentratesTheOutput) {
  const auto a = png("a.png", testing::scene(16, 16, 6));
  // Light, near-neutral target so the result stays inside the RGB gamut.
  const std::array<std::size_t, 3> target = {12, 8, 8};
  json h;
  for (std::size_t c = 0; c < 3; ++c) {
    json one = {{"k", 16}, {"mass", std::vector<double>(16, 0.0)}};
    one["mass"][target[c]] = 1.0;
    h[kChannelNames[c]] = one;
  }
  std::ofstream(file("delta.json")) << h.dump();
  ASSERT_EQ(run("match " + a + " --ref-hist " + path("delta.json") + " -o " + path("o.png") +
                " --steps 500 --lambda-mi 0 --report -")
                .code,
            0);
  const auto cfg = BinningConfig::with_bins(16);
  const auto out = rgb_to_yuv(read_png(file("o.png")), cfg);
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t at = 0;
    for (double v : out.channels[c].values()) at += cfg.bin_of(v) == target[c];
    EXPECT_GE(at, out.channels[c].size() * 9 / 10) << kChannelNames[c];
  }
}

TEST_F(Cli, HistogramFileErrors) {
  const auto a = png("a.png", testing::scene(8, 8, 7));
  std::ofstream(file("bad.json")) << "{not json";
  EXPECT_EQ(run("match " + a + " --ref-hist " + path("bad.json") + " -o " + path("o.png")).code, 2);
  std::ofstream(file("short.json")) << R"({"k": 4, "mass": [1, 0]})";
  EXPECT_EQ(run("match " + a + " --ref-hist " + path("short.json") + " -o " + path("o.png")).code, 2);
  EXPECT_EQ(run("match " + a + " --ref-hist " + path("none.json") + " -o " + path("o.png")).code, 2);
  std::ofstream(file("k4.json")) << R"({"k": 4, "mass": [0, 1, 0, 0]})";
  EXPECT_EQ(run("match " + a + " --ref-hist " + path("k4.json") + " --bins 16 -o " + path("o.png")).code, 3);
}

TEST_F(Cli, GradCheck) {
  const auto text = run("gradcheck");
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("ok"), std::string::npos);

  const auto js = run("gradcheck --json");
  ASSERT_EQ(js.code, 0);
  const auto j = json::parse(js.out);
  EXPECT_LT(j.at("max_rel_error").get<double>(), 1e-4);
  EXPECT_EQ(j.at("num_points"), 192);

  EXPECT_EQ(run("gradcheck --threshold 1e-30").code, 5);
  EXPECT_EQ(run("gradcheck --step 0").code, 1);
}

TEST_F(Cli, Threads) {
  const auto a = png("a.png", testing::scene(16, 16, 8));
  const auto one = run("hist " + a + " --threads 1");
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(run("hist " + a + " --threads 3").out, one.out);
  EXPECT_EQ(run("hist " + a, "HISTLAYER_THREADS=2").out, one.out);
  EXPECT_EQ(run("hist " + a + " --threads 0").code, 1);
  EXPECT_EQ(run("hist " + a, "HISTLAYER_THREADS=abc").code, 1);
  EXPECT_EQ(run("hist " + a + " --threads 1", "HISTLAYER_THREADS=abc").code, 0);
}

TEST_F(Cli, MatchIsDeterministic) {
  const auto a = png("a.png", testing::scene(12, 12, 9));
  const auto b = png("b.png", testing::scene(12, 12, 10));
  for (const char* run_id : {"1", "2"}) {
    const std::string o = std::string("o") + run_id;
    ASSERT_EQ(run("match " + a + " --ref-image " + b + " --init noise --seed 3 --steps 50 --threads 1 -o " +
                  path((o + ".png").c_str()) + " --trace " + path((o + ".csv").c_str()) + " --report -")
                  .code,
              0);
  }
  EXPECT_EQ(slurp(file("o1.png")), slurp(file("o2.png")));
  EXPECT_EQ(slurp(file("o1.csv")), slurp(file("o2.csv")));
}

}  // namespace
}  // namespace histlayer
