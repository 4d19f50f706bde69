#pragma once

#include <span>
#include <vector>

#include "histlayer/binning.hpp"
#include "histlayer/grid.hpp"

namespace histlayer {

/// Differentiable 1D histogram: mass[k] = (1/N) sum_x maps[k][x].
///
/// Masses are not renormalized. Pixels near the ends of [-1, 1] leak a small
/// amount of kernel mass outside the range, so the total is slightly below 1.
struct SoftHistogram {
  BinningConfig config;
  std::vector<double> mass;

  double total() const;
};

/// Prefix sums of a SoftHistogram.
struct CumulativeHistogram {
  BinningConfig config;
  std::vector<double> cdf;
};

/// Sums each activation map over pixels in row-major order, so the result
/// does not depend on the thread count.
SoftHistogram soft_histogram(const ActivationStack& stack);
SoftHistogram soft_histogram(const Channel& channel, const BinningConfig& config);

CumulativeHistogram cumulative(const SoftHistogram& hist);

/// Pulls a gradient w.r.t. the histogram masses back to the pixels:
///   grad(x) = (1/N) sum_k grad_mass[k] * d/dz bin_membership(I(x), k).
/// Throws ShapeError if grad_mass does not have K entries.
Grid histogram_backward(const ActivationStack& stack, std::span<const double> grad_mass);

}  // namespace histlayer
