#include "histlayer/histogram.hpp"

#include <numeric>
#include <string>

#include "histlayer/errors.hpp"
#include "histlayer/parallel.hpp"

namespace histlayer {

double SoftHistogram::total() const { return std::accumulate(mass.begin(), mass.end(), 0.0); }

SoftHistogram soft_histogram(const ActivationStack& stack) {
  const std::size_t n = stack.pixels();
  SoftHistogram hist{stack.config(), std::vector<double>(stack.config().bins(), 0.0)};

  // Sequential over pixels: each bin accumulates its terms in pixel order.
  for (std::size_t x = 0; x < n; ++x) {
    const auto act = stack.activations(x);
    double* dst = hist.mass.data() + stack.first_bin(x);
    for (std::size_t i = 0; i < act.size(); ++i) dst[i] += act[i];
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (double& m : hist.mass) m *= inv_n;
  return hist;
}

SoftHistogram soft_histogram(const Channel& channel, const BinningConfig& config) {
  return soft_histogram(activation_stack(channel, config));
}

CumulativeHistogram cumulative(const SoftHistogram& hist) {
  CumulativeHistogram out{hist.config, std::vector<double>(hist.mass.size())};
  std::partial_sum(hist.mass.begin(), hist.mass.end(), out.cdf.begin());
  return out;
}

Grid histogram_backward(const ActivationStack& stack, std::span<const double> grad_mass) {
  if (grad_mass.size() != stack.config().bins()) {
    throw ShapeError("histogram_backward: expected " + std::to_string(stack.config().bins()) +
                     " mass gradients, got " + std::to_string(grad_mass.size()));
  }
  Grid grad(stack.height(), stack.width());
  const double inv_n = 1.0 / static_cast<double>(stack.pixels());
  parallel_chunks(stack.pixels(), [&](std::size_t, std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      const auto der = stack.derivatives(x);
      const double* g = grad_mass.data() + stack.first_bin(x);
      double acc = 0.0;
      for (std::size_t i = 0; i < der.size(); ++i) acc += g[i] * der[i];
      grad[x] = acc * inv_n;
    }
  });
  return grad;
}

}  // namespace histlayer
