// histlayer: soft histograms, histogram metrics and histogram-driven color
// transfer for PNG images.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#if __has_include(<CLI/CLI.hpp>)
#include <CLI/CLI.hpp>
#else
#include <CLI11.hpp>
#endif

#include "histlayer/histlayer.hpp"

namespace hl = histlayer;
using nlohmann::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIo = 2,
  kShape = 3,
  kOptimization = 4,
  kGradCheck = 5,
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BinningFlags {
  std::size_t bins = hl::kDefaultBins;
  double ratio = hl::kDefaultBandwidthRatio;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--bins", bins, "Number of histogram bins K")->capture_default_str()->check(CLI::PositiveNumber);
    cmd.add_option("--bandwidth-ratio", ratio, "Bin width over kernel bandwidth, L/B")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
  }
  hl::BinningConfig config() const { return hl::BinningConfig::with_bins(bins, ratio); }
};

std::size_t channel_index(const std::string& name) {
  for (std::size_t c = 0; c < 3; ++c) {
    if (name == hl::kChannelNames[c]) return c;
  }
  throw UsageError("unknown channel '" + name + "'");
}

// Writes to `path`, or to stdout when the path is empty or "-".
void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  out << text;
  out.close();
  if (!out) throw hl::IoError("cannot write '" + path + "'");
}

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw hl::IoError("cannot read '" + path + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw hl::IoError("cannot parse '" + path + "': " + e.what());
  }
}

json per_channel(const std::array<double, 3>& v) {
  return {{"y", v[0]}, {"u", v[1]}, {"v", v[2]}};
}

json report_to_json(const hl::LossReport& r) {
  return {{"total", r.total},
          {"emd_loss", r.emd_loss()},
          {"mi_loss", r.mi_loss()},
          {"emd", per_channel(r.emd)},
          {"mi", per_channel(r.mi)},
          {"mi_skipped", {{"y", r.mi_skipped[0]}, {"u", r.mi_skipped[1]}, {"v", r.mi_skipped[2]}}}};
}

// --- hist ------------------------------------------------------------------

struct HistCommand {
  std::string image;
  std::string channel = "all";
  std::string output;
  BinningFlags binning;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("hist", "Soft histogram of one or all YUV channels as JSON");
    cmd->add_option("image", image, "Input PNG")->required();
    cmd->add_option("--channel", channel, "y, u, v or all")
        ->capture_default_str()
        ->check(CLI::IsMember({"y", "u", "v", "all"}));
    cmd->add_option("-o,--output", output, "Output file (default stdout)");
    binning.add_to(*cmd);
  }

  int run() const {
    const auto cfg = binning.config();
    const auto hists = hl::channel_histograms(hl::rgb_to_yuv(hl::read_png(image), cfg), cfg);
    const json j = channel == "all" ? hl::channel_histograms_to_json(hists)
                                    : hl::histogram_to_json(hists[channel_index(channel)]);
    emit(output, j.dump() + "\n");
    return kOk;
  }
};

// --- jointhist -----------------------------------------------------------------

struct JointCommand {
  std::string first;
  std::string second;
  std::string channel = "y";
  std::string channel2;
  std::string format = "csv";
  std::string output;
  BinningFlags binning;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("jointhist", "Soft joint histogram of two channels");
    cmd->add_option("image", first, "First PNG")->required();
    cmd->add_option("image2", second, "Second PNG (default: the first)");
    cmd->add_option("--channel", channel, "Channel of the first image")
        ->capture_default_str()
        ->check(CLI::IsMember({"y", "u", "v"}));
    cmd->add_option("--channel2", channel2, "Channel of the second image (default: --channel)")
        ->check(CLI::IsMember({"y", "u", "v"}));
    cmd->add_option("--format", format, "csv or json")->capture_default_str()->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("-o,--output", output, "Output file (default stdout)");
    binning.add_to(*cmd);
  }

  int run() const {
    const auto cfg = binning.config();
    const auto a = hl::rgb_to_yuv(hl::read_png(first), cfg);
    const auto b = second.empty() ? a : hl::rgb_to_yuv(hl::read_png(second), cfg);
    const auto& ca = a.channels[channel_index(channel)];
    const auto& cb = b.channels[channel_index(channel2.empty() ? channel : channel2)];
    const auto joint = hl::joint_histogram(hl::activation_stack(ca, cfg), hl::activation_stack(cb, cfg));
    emit(output, format == "csv" ? hl::joint_to_csv(joint) : hl::joint_to_json(joint).dump() + "\n");
    return kOk;
  }
};

// --- metrics ----------------------------------------------------------------------

struct MetricsCommand {
  std::string first;
  std::string second;
  bool emd_only = false;
  std::string output;
  BinningFlags binning;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("metrics", "Per-channel EMD and MI distance between two images");
    cmd->add_option("image", first, "First PNG")->required();
    cmd->add_option("image2", second, "Second PNG")->required();
    cmd->add_flag("--emd-only", emd_only, "Skip the MI distance (images may then differ in size)");
    cmd->add_option("-o,--output", output, "Output file (default stdout)");
    binning.add_to(*cmd);
  }

  int run() const {
    const auto cfg = binning.config();
    const auto a = hl::rgb_to_yuv(hl::read_png(first), cfg);
    const auto b = hl::rgb_to_yuv(hl::read_png(second), cfg);
    if (!emd_only && !a.same_shape(b)) {
      throw hl::ShapeError("MI distance needs equal image sizes (" + std::to_string(a.height()) + "x" +
                           std::to_string(a.width()) + " vs " + std::to_string(b.height()) + "x" +
                           std::to_string(b.width()) + "); use --emd-only");
    }
    const auto ha = hl::channel_histograms(a, cfg);
    const auto hb = hl::channel_histograms(b, cfg);
    std::array<double, 3> emd{};
    std::array<double, 3> dmi{};
    for (std::size_t c = 0; c < 3; ++c) {
      emd[c] = hl::emd(ha[c], hb[c]);
      if (!emd_only) {
        dmi[c] = hl::mi_distance(hl::joint_histogram(hl::activation_stack(a.channels[c], cfg),
                                                     hl::activation_stack(b.channels[c], cfg)));
      }
    }
    json j = {{"k", cfg.bins()}, {"emd", per_channel(emd)}};
    if (!emd_only) j["d_mi"] = per_channel(dmi);
    emit(output, j.dump() + "\n");
    return kOk;
  }
};

// --- match --------------------------------------------------------------------------

struct MatchCommand {
  std::string source;
  std::string ref_image;
  std::string ref_hist;
  std::string output;
  std::string trace;
  std::string report;
  std::string init = "source";
  hl::OptimizationConfig opt;
  BinningFlags binning;
  CLI::Option* bins_option = nullptr;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("match", "Repaint an image with a reference color histogram");
    cmd->add_option("image", source, "Source PNG")->required();
    auto* ri = cmd->add_option("--ref-image", ref_image, "Reference PNG");
    auto* rh = cmd->add_option("--ref-hist", ref_hist, "Reference histogram JSON (one histogram or keyed y/u/v)");
    ri->excludes(rh);
    cmd->add_option("-o,--output", output, "Output PNG")->required();
    cmd->add_option("--trace", trace, "Loss trace CSV");
    cmd->add_option("--report", report, "Final loss report JSON (default stdout)");
    cmd->add_option("--steps", opt.max_steps, "Adam steps")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--lr", opt.lr, "Adam learning rate")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--beta1", opt.beta1, "Adam beta1")->capture_default_str();
    cmd->add_option("--beta2", opt.beta2, "Adam beta2")->capture_default_str();
    cmd->add_option("--lambda-emd", opt.weights.emd, "EMD loss weight")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--lambda-mi", opt.weights.mi, "MI loss weight")->capture_default_str()->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", opt.seed, "Seed for noise initialization")->capture_default_str();
    cmd->add_option("--init", init, "source or noise")->capture_default_str()->check(CLI::IsMember({"source", "noise"}));
    cmd->add_option("--log-every", opt.log_every, "Trace every N steps")->capture_default_str()->check(CLI::PositiveNumber);
    binning.add_to(*cmd);
    bins_option = cmd->get_option("--bins");
  }

  int run() {
    if (ref_image.empty() == ref_hist.empty()) {
      throw UsageError("match needs exactly one of --ref-image and --ref-hist");
    }
    opt.init = init == "noise" ? hl::InitMode::from_noise : hl::InitMode::from_source;
    const auto src_rgb = hl::read_png(source);

    hl::LossTrace trace_out;
    hl::LossReport final_report;
    hl::ImageRGB8 result;
    if (!ref_image.empty()) {
      opt.binning = binning.config();
      const auto ref_rgb = hl::read_png(ref_image);
      auto r = hl::color_transfer(src_rgb, ref_rgb, opt);
      result = std::move(r.image);
      trace_out = std::move(r.trace);
      final_report = r.final_report;
    } else {
      const auto ref = [&] {
        try {
          return hl::channel_histograms_from_json(read_json_file(ref_hist), binning.ratio);
        } catch (const std::invalid_argument& e) {
          throw hl::IoError("bad histogram file '" + ref_hist + "': " + e.what());
        }
      }();
      // The histogram file fixes K; an explicit --bins must agree with it.
      if (bins_option->count() > 0 && ref[0].config.bins() != binning.bins) {
        throw hl::ConfigMismatch("--bins " + std::to_string(binning.bins) + " but '" + ref_hist + "' has k = " +
                                 std::to_string(ref[0].config.bins()));
      }
      opt.binning = ref[0].config;
      auto r = hl::optimize(hl::rgb_to_yuv(src_rgb, opt.binning), ref, opt);
      result = hl::yuv_to_rgb(r.image);
      trace_out = std::move(r.trace);
      final_report = r.final_report;
    }

    for (const auto& w : trace_out.warnings) std::cerr << "warning: " << w << "\n";
    hl::write_png(output, result);
    if (!trace.empty()) {
      std::ostringstream csv;
      trace_out.write_csv(csv);
      emit(trace, csv.str());
    }
    json j = report_to_json(final_report);
    j["steps"] = opt.max_steps;
    j["warnings"] = trace_out.warnings.size();
    emit(report, j.dump() + "\n");
    return kOk;
  }
};

// --- gradcheck ------------------------------------------------------------------------

struct GradCheckCommand {
  std::size_t size = 8;
  std::size_t bins = 16;
  std::uint64_t seed = 42;
  double step = hl::kDefaultGradStep;
  double threshold = 1e-4;
  bool as_json = false;

  void add_to(CLI::App& app) {
    auto* cmd = app.add_subcommand("gradcheck", "Finite-difference check of the total-loss pixel gradient");
    cmd->add_option("--size", size, "Image side length")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--bins", bins, "Number of histogram bins")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--seed", seed, "Random seed")->capture_default_str();
    cmd->add_option("--step", step, "Finite-difference step")->capture_default_str()->check(CLI::PositiveNumber);
    cmd->add_option("--threshold", threshold, "Largest acceptable relative error")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--json", as_json, "Print only the JSON report");
  }

  int run() const {
    const auto r = hl::check_total_loss(size, bins, seed, step);
    const bool ok = r.max_rel_error < threshold;
    if (as_json) {
      std::cout << hl::to_json(r).dump() << "\n";
    } else {
      std::printf("%s: max relative error %.3e over %zu points (step %.1e, worst index %zu): %s\n",
                  r.op_name.c_str(), r.max_rel_error, r.num_points, r.step, r.worst_index,
                  ok ? "ok" : "FAILED");
    }
    return ok ? kOk : kGradCheck;
  }
};

std::size_t parse_threads(const std::string& text) {
  std::size_t pos = 0;
  long long n = 0;
  try {
    n = std::stoll(text, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != text.size() || n <= 0) throw UsageError("thread count must be a positive integer, got '" + text + "'");
  return static_cast<std::size_t>(n);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Differentiable soft histograms and histogram-based color transfer"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string threads;
  app.add_option("--threads", threads, "Worker threads (env HISTLAYER_THREADS; default 1)");

  HistCommand hist;
  JointCommand joint;
  MetricsCommand metrics;
  MatchCommand match;
  GradCheckCommand gradcheck;
  hist.add_to(app);
  joint.add_to(app);
  metrics.add_to(app);
  match.add_to(app);
  gradcheck.add_to(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (threads.empty()) {
      if (const char* env = std::getenv("HISTLAYER_THREADS"); env && *env) threads = env;
    }
    hl::set_thread_count(threads.empty() ? 1 : parse_threads(threads));

    const auto* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    if (name == "hist") return hist.run();
    if (name == "jointhist") return joint.run();
    if (name == "metrics") return metrics.run();
    if (name == "match") return match.run();
    return gradcheck.run();
  } catch (const UsageError& e) {
    std::cerr << "histlayer: " << e.what() << "\n";
    return kUsage;
  } catch (const hl::IoError& e) {
    std::cerr << "histlayer: " << e.what() << "\n";
    return kIo;
  } catch (const hl::ShapeError& e) {
    std::cerr << "histlayer: " << e.what() << "\n";
    return kShape;
  } catch (const hl::ConfigMismatch& e) {
    std::cerr << "histlayer: " << e.what() << "\n";
    return kShape;
  } catch (const hl::OptimizationError& e) {
    std::cerr << "histlayer: optimization failed: " << e.what() << "\n";
    return kOptimization;
  } catch (const hl::DegenerateDistribution& e) {
    std::cerr << "histlayer: " << e.what() << "\n";
    return kShape;
  } catch (const std::invalid_argument& e) {
    std::cerr << "histlayer: " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "histlayer: " << e.what() << "\n";
    return kUsage;
  }
}
