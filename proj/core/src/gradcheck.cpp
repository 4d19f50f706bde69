#include "histlayer/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "histlayer/metrics.hpp"

namespace histlayer {

namespace {

ImageYUV random_image(std::size_t size, const BinningConfig& config, std::mt19937_64& rng) {
  ImageYUV img{{Channel(size, size), Channel(size, size), Channel(size, size)}};
  const double lo = config.clamp_min();
  const double span = config.clamp_max() - lo;
  for (auto& c : img.channels) {
    for (double& v : c.values()) v = lo + span * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  }
  return img;
}

}  // namespace

GradCheckReport check_scalar_fn(std::string op_name, const ScalarFn& fn,
                                const GradientFn& analytic_grad, std::span<const double> point,
                                double step) {
  if (!(step > 0.0)) throw std::invalid_argument("gradcheck: step must be positive");
  const auto analytic = analytic_grad(point);
  if (analytic.size() != point.size()) {
    throw std::invalid_argument("gradcheck: analytic gradient has the wrong length");
  }

  GradCheckReport report{std::move(op_name), 0.0, point.size(), step, 0};
  std::vector<double> x(point.begin(), point.end());
  auto eval = [&] {
    const double f = fn(x);
    if (!std::isfinite(f)) throw std::domain_error("gradcheck: function value is not finite");
    return f;
  };
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + step;
    const double plus = eval();
    x[i] = x0 - step;
    const double minus = eval();
    x[i] = x0;

    const double numeric = (plus - minus) / (2.0 * step);
    const double denom = std::max({std::abs(numeric), std::abs(analytic[i]), kRelErrorFloor});
    const double rel = std::abs(numeric - analytic[i]) / denom;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.worst_index = i;
    }
  }
  return report;
}

GradCheckReport check_total_loss(std::size_t size, std::size_t bins, std::uint64_t seed,
                                 double step) {
  if (size == 0 || bins == 0) throw std::invalid_argument("gradcheck: size and bins must be positive");
  const auto config = BinningConfig::with_bins(bins);
  std::mt19937_64 rng(seed);
  const ImageYUV source = random_image(size, config, rng);
  const ImageYUV output = random_image(size, config, rng);
  const auto reference = channel_histograms(random_image(size, config, rng), config);
  const ColorLoss loss(source, reference, LossWeights{1.0, 1.0, 0.0}, config);

  const std::size_t n = size * size;
  auto unpack = [&](std::span<const double> flat) {
    ImageYUV img = output;
    for (std::size_t c = 0; c < 3; ++c) {
      std::copy_n(flat.begin() + static_cast<std::ptrdiff_t>(c * n), n,
                  img.channels[c].values().begin());
    }
    return img;
  };

  std::vector<double> point;
  for (const auto& c : output.channels) point.insert(point.end(), c.values().begin(), c.values().end());

  return check_scalar_fn(
      "total_loss", [&](std::span<const double> x) { return loss.evaluate(unpack(x)).total; },
      [&](std::span<const double> x) {
        PixelGradient grad;
        loss.evaluate(unpack(x), grad);
        std::vector<double> flat;
        for (const auto& g : grad) flat.insert(flat.end(), g.values().begin(), g.values().end());
        return flat;
      },
      point, step);
}

nlohmann::json to_json(const GradCheckReport& report) {
  return {{"op_name", report.op_name},
          {"max_rel_error", report.max_rel_error},
          {"num_points", report.num_points},
          {"step", report.step},
          {"worst_index", report.worst_index}};
}

}  // namespace histlayer
