#pragma once

#include <span>
#include <vector>

#include "histlayer/binning.hpp"
#include "histlayer/grid.hpp"

namespace histlayer {

/// K×K joint histogram, row-major: mass[k1 * K + k2] = P(k1, k2).
struct JointHistogram {
  BinningConfig config;
  std::vector<double> mass;

  std::size_t bins() const { return config.bins(); }
  double operator()(std::size_t k1, std::size_t k2) const { return mass[k1 * bins() + k2]; }
  double total() const;
  /// Row sums (marginal of the first channel) and column sums (second channel).
  std::vector<double> row_sums() const;
  std::vector<double> column_sums() const;
  JointHistogram transposed() const;
};

/// J = (1/N) P1 P2^T, where row k of P_j is the flattened activation map k
/// of channel j. The product skips the zero band outside each pixel's
/// window. Throws ShapeError if the stacks do not share H, W and binning.
///
/// With more than one thread, per-chunk partial products are added in chunk
/// order; results match the single-threaded product to rounding.
JointHistogram joint_histogram(const ActivationStack& first, const ActivationStack& second);

struct JointGradient {
  Grid first;
  Grid second;
};

/// Gradient of <grad_mass, joint_histogram(first, second)> w.r.t. the pixels of
/// the first channel only:
///   g1(x) = (1/N) sum_{k1,k2} G[k1][k2] * dPi_k1(I1(x)) * Pi_k2(I2(x)).
Grid joint_backward_first(const ActivationStack& first, const ActivationStack& second,
                          std::span<const double> grad_mass);

/// Gradients w.r.t. both channels.
JointGradient joint_backward(const ActivationStack& first, const ActivationStack& second,
                             std::span<const double> grad_mass);

}  // namespace histlayer
