#include "histlayer/binning.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "histlayer/parallel.hpp"

namespace histlayer {

namespace {

// -ln(2^-52): memberships below exp(-kNegligibleExponent) are under one ulp of 1.
constexpr double kNegligibleExponent = 36.05;

// Logistic function at one bin edge, kept as the small tail value
// sigma(-|t|) plus the side of the edge, so differences of two sigmoids on
// the same side never cancel catastrophically.
struct EdgeTerm {
  double tail;
  bool above;
};

EdgeTerm edge_term(double z, double edge, double bandwidth) {
  const double t = (z - edge) / bandwidth;
  const double e = std::exp(-std::abs(t));
  return {e / (1.0 + e), t >= 0.0};
}

// sigma(t_lo) - sigma(t_hi) for t_lo >= t_hi.
double membership(const EdgeTerm& lo, const EdgeTerm& hi) {
  if (hi.above) return hi.tail - lo.tail;
  if (!lo.above) return lo.tail - hi.tail;
  return (1.0 - lo.tail) - hi.tail;
}

double kernel(const EdgeTerm& t) { return t.tail * (1.0 - t.tail); }

}  // namespace

BinningConfig::BinningConfig(std::size_t bins, double bandwidth)
    : bins_(bins), bin_width_(2.0 / static_cast<double>(bins)), bandwidth_(bandwidth) {
  if (bins == 0) throw std::invalid_argument("binning: bin count must be positive");
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw std::invalid_argument("binning: bandwidth must be positive and finite");
  }
  centers_.resize(bins_);
  for (std::size_t k = 0; k < bins_; ++k) {
    centers_[k] = -1.0 + bin_width_ * (static_cast<double>(k) + 0.5);
  }
}

BinningConfig BinningConfig::with_bins(std::size_t bins, double bandwidth_ratio) {
  if (bins == 0) throw std::invalid_argument("binning: bin count must be positive");
  if (!(bandwidth_ratio > 0.0) || !std::isfinite(bandwidth_ratio)) {
    throw std::invalid_argument("binning: bandwidth ratio must be positive and finite");
  }
  return BinningConfig(bins, (2.0 / static_cast<double>(bins)) / bandwidth_ratio);
}

BinningConfig BinningConfig::with_bandwidth(std::size_t bins, double bandwidth) {
  return BinningConfig(bins, bandwidth);
}

std::size_t BinningConfig::bin_of(double z) const {
  const double pos = std::floor((z + 1.0) / bin_width_);
  if (!(pos > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(pos), bins_ - 1);
}

double BinningConfig::clamp(double z) const { return std::clamp(z, clamp_min(), clamp_max()); }

std::size_t BinningConfig::support_radius() const {
  const double r = 1.0 + std::ceil(kNegligibleExponent * bandwidth_ / bin_width_);
  if (r >= static_cast<double>(bins_)) return bins_;
  return static_cast<std::size_t>(r);
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double sigmoid_kernel(double z) {
  const double e = std::exp(-std::abs(z));
  const double q = e / (1.0 + e);
  return q * (1.0 - q);
}

double bin_membership(double z, std::size_t k, const BinningConfig& config) {
  const double b = config.bandwidth();
  return membership(edge_term(z, config.edge(k), b), edge_term(z, config.edge(k + 1), b));
}

double bin_membership_deriv(double z, std::size_t k, const BinningConfig& config) {
  const double b = config.bandwidth();
  return (kernel(edge_term(z, config.edge(k), b)) - kernel(edge_term(z, config.edge(k + 1), b))) /
         b;
}

double ActivationStack::at(std::size_t k, std::size_t pixel) const {
  const std::size_t first = first_[pixel];
  if (k < first || k >= first + window_) return 0.0;
  return activations_[pixel * window_ + (k - first)];
}

std::vector<double> ActivationStack::dense() const {
  const std::size_t n = pixels();
  std::vector<double> out(config_.bins() * n, 0.0);
  for (std::size_t x = 0; x < n; ++x) {
    const auto act = activations(x);
    for (std::size_t i = 0; i < window_; ++i) out[(first_[x] + i) * n + x] = act[i];
  }
  return out;
}

ActivationStack activation_stack(const Channel& channel, const BinningConfig& config) {
  if (channel.empty()) throw ShapeError("activation_stack: empty channel");
  for (double v : channel.values()) {
    if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
      throw std::domain_error("activation_stack: channel value " + std::to_string(v) +
                              " outside [-1, 1]");
    }
  }

  ActivationStack stack(config);
  const std::size_t bins = config.bins();
  const std::size_t radius = config.support_radius();
  const std::size_t window = std::min(bins, 2 * radius + 1);
  const std::size_t n = channel.size();
  const double b = config.bandwidth();

  stack.height_ = channel.height();
  stack.width_ = channel.width();
  stack.window_ = window;
  stack.values_.assign(channel.values().begin(), channel.values().end());
  stack.first_.resize(n);
  stack.activations_.resize(n * window);
  stack.derivatives_.resize(n * window);

  parallel_chunks(n, [&](std::size_t, std::size_t begin, std::size_t end) {
    std::vector<EdgeTerm> edges(window + 1);
    for (std::size_t x = begin; x < end; ++x) {
      const double z = stack.values_[x];
      const std::size_t own = config.bin_of(z);
      const std::size_t first = std::min(own > radius ? own - radius : 0, bins - window);
      for (std::size_t i = 0; i <= window; ++i) edges[i] = edge_term(z, config.edge(first + i), b);

      stack.first_[x] = static_cast<std::uint32_t>(first);
      double* act = stack.activations_.data() + x * window;
      double* der = stack.derivatives_.data() + x * window;
      for (std::size_t i = 0; i < window; ++i) {
        act[i] = membership(edges[i], edges[i + 1]);
        der[i] = (kernel(edges[i]) - kernel(edges[i + 1])) / b;
      }
    }
  });
  return stack;
}

}  // namespace histlayer
