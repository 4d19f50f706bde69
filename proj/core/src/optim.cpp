#include "histlayer/optim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <stdexcept>

#include "histlayer/errors.hpp"

namespace histlayer {

namespace {

// mt19937_64 output is fixed by the standard; the std distributions are not.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

ImageYUV initial_image(const ImageYUV& source, const OptimizationConfig& config) {
  ImageYUV out = source;
  const auto& bins = config.binning;
  if (config.init == InitMode::from_noise) {
    std::mt19937_64 rng(config.seed);
    const double lo = bins.clamp_min();
    const double span = bins.clamp_max() - lo;
    for (auto& c : out.channels) {
      for (double& v : c.values()) v = lo + span * unit_uniform(rng);
    }
  }
  for (auto& c : out.channels) {
    for (double& v : c.values()) v = bins.clamp(v);
  }
  return out;
}

}  // namespace

AdamState AdamState::zeros(std::size_t pixels, double lr, double beta1, double beta2, double eps) {
  AdamState s;
  s.lr = lr;
  s.beta1 = beta1;
  s.beta2 = beta2;
  s.eps = eps;
  for (std::size_t c = 0; c < 3; ++c) {
    s.m[c].assign(pixels, 0.0);
    s.v[c].assign(pixels, 0.0);
  }
  return s;
}

void adam_step(AdamState& state, ImageYUV& params, const PixelGradient& grads) {
  for (std::size_t c = 0; c < 3; ++c) {
    const std::size_t n = params.channels[c].size();
    if (grads[c].size() != n || state.m[c].size() != n || state.v[c].size() != n) {
      throw ShapeError("adam_step: gradient or moment shape differs from the parameters");
    }
  }

  ++state.step;
  const double t = static_cast<double>(state.step);
  const double m_correction = 1.0 - std::pow(state.beta1, t);
  const double v_correction = 1.0 - std::pow(state.beta2, t);
  for (std::size_t c = 0; c < 3; ++c) {
    auto p = params.channels[c].values();
    auto& m = state.m[c];
    auto& v = state.v[c];
    const auto& g = grads[c];
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / m_correction;
      const double v_hat = v[i] / v_correction;
      p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

void OptimizationConfig::validate() const {
  weights.validate();
  if (max_steps == 0) throw std::invalid_argument("optimizer: max_steps must be positive");
  if (!(lr > 0.0) || !std::isfinite(lr)) throw std::invalid_argument("optimizer: lr must be positive");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw std::invalid_argument("optimizer: betas must lie in [0, 1)");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("optimizer: eps must be positive");
  if (log_every == 0) throw std::invalid_argument("optimizer: log_every must be positive");
}

void LossTrace::write_csv(std::ostream& os) const {
  os << "step,total,emd,mi\n";
  char buf[128];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g\n", r.step, r.total, r.emd, r.mi);
    os << buf;
  }
}

OptimizationResult optimize(const ImageYUV& source, const std::array<SoftHistogram, 3>& reference,
                            const OptimizationConfig& config) {
  config.validate();
  const ColorLoss loss(source, reference, config.weights, config.binning,
                       /*skip_degenerate_mi=*/true);

  OptimizationResult result{initial_image(source, config), {}, {}};
  ImageYUV& out = result.image;
  auto adam = AdamState::zeros(out.y().size(), config.lr, config.beta1, config.beta2, config.eps);
  PixelGradient grad;

  auto record = [&](std::size_t step, const LossReport& report) {
    if (!std::isfinite(report.total)) {
      throw OptimizationError("loss became non-finite at step " + std::to_string(step));
    }
    for (std::size_t c = 0; c < 3; ++c) {
      if (report.mi_skipped[c]) {
        result.trace.warnings.push_back("step " + std::to_string(step) + ": channel " +
                                        kChannelNames[c] +
                                        " has a degenerate joint histogram; MI term skipped");
      }
    }
    result.trace.records.push_back({step, report.total, report.emd_loss(), report.mi_loss()});
  };

  for (std::size_t step = 0; step < config.max_steps; ++step) {
    const LossReport report = loss.evaluate(out, grad);
    if (step % config.log_every == 0) {
      record(step, report);
    } else if (!std::isfinite(report.total)) {
      throw OptimizationError("loss became non-finite at step " + std::to_string(step));
    }
    adam_step(adam, out, grad);
    for (auto& c : out.channels) {
      for (double& v : c.values()) v = config.binning.clamp(v);
    }
  }

  result.final_report = loss.evaluate(out);
  record(config.max_steps, result.final_report);
  return result;
}

TransferResult color_transfer(const ImageRGB8& source, const ImageRGB8& reference,
                              const OptimizationConfig& config) {
  const auto src = rgb_to_yuv(source, config.binning);
  const auto ref = channel_histograms(rgb_to_yuv(reference, config.binning), config.binning);
  auto opt = optimize(src, ref, config);
  return {yuv_to_rgb(opt.image), std::move(opt.trace), opt.final_report};
}

}  // namespace histlayer
