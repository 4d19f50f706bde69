#pragma once

#include <array>
#include <optional>
#include <vector>

#include "histlayer/colorspace.hpp"
#include "histlayer/histogram.hpp"
#include "histlayer/joint.hpp"

namespace histlayer {

/// Joint cells with less mass than this count as exact zeros in the
/// information measures and their gradients (the 0 log 0 = 0 convention).
inline constexpr double kProbabilityFloor = 1e-12;

/// Squared Euclidean distance between the cumulative histograms:
///   sum_i (CDF_i(a) - CDF_i(b))^2.
/// Throws ConfigMismatch if the histograms use different binning.
double emd(const SoftHistogram& a, const SoftHistogram& b);

struct EmdGradient {
  std::vector<double> first;
  std::vector<double> second;
};

/// d emd / d a.mass[k] = 2 sum_{i >= k} (CDF_i(a) - CDF_i(b)); the gradient
/// for b is the negation.
EmdGradient emd_backward(const SoftHistogram& a, const SoftHistogram& b);

// Information measures use the natural logarithm. Marginals are the row and
// column sums of the joint table. All throw DegenerateDistribution for a
// table with no mass.
double mutual_information(const JointHistogram& joint);
double joint_entropy(const JointHistogram& joint);

/// Normalized information distance 1 - I/H in [0, 1]: zero for perfectly
/// dependent channels, one for independent ones. Throws
/// DegenerateDistribution when the joint entropy is zero.
double mi_distance(const JointHistogram& joint);

/// Gradient of mi_distance w.r.t. every joint cell (row-major K×K), with the
/// marginals differentiated as sums of the cells.
std::vector<double> mi_distance_backward(const JointHistogram& joint);

struct LossWeights {
  double emd = 1.0;
  double mi = 1.0;
  /// Slot for an adversarial term, which this library does not provide; must be 0.
  double adversarial = 0.0;

  /// Throws std::invalid_argument for negative weights or a nonzero adversarial weight.
  void validate() const;
};

struct LossReport {
  double total = 0.0;
  std::array<double, 3> emd{};
  std::array<double, 3> mi{};
  /// Channels whose MI term was dropped because the joint was degenerate.
  std::array<bool, 3> mi_skipped{};

  double emd_loss() const { return (emd[0] + emd[1] + emd[2]) / 3.0; }
  double mi_loss() const { return (mi[0] + mi[1] + mi[2]) / 3.0; }
};

using PixelGradient = std::array<Grid, 3>;

/// The color-transfer objective for a fixed source image and reference
/// histograms:
///   total = w.emd * mean_c emd(ref_c, hist(out_c))
///         + w.mi  * mean_c mi_distance(joint(out_c, src_c)).
///
/// Source activation stacks are built once, so repeated evaluation during
/// optimization only pays for the output image.
class ColorLoss {
 public:
  /// When skip_degenerate_mi is set, a channel whose joint has zero entropy
  /// contributes 0 to the MI term and is flagged in the report instead of
  /// throwing.
  ColorLoss(const ImageYUV& source, std::array<SoftHistogram, 3> reference, LossWeights weights,
            const BinningConfig& config, bool skip_degenerate_mi = false);

  LossReport evaluate(const ImageYUV& output) const;
  /// Also writes d total / d output pixel for each channel into *grad.
  LossReport evaluate(const ImageYUV& output, PixelGradient& grad) const;

  const BinningConfig& config() const { return config_; }
  const LossWeights& weights() const { return weights_; }
  const std::array<SoftHistogram, 3>& reference() const { return reference_; }

 private:
  LossReport run(const ImageYUV& output, PixelGradient* grad) const;

  BinningConfig config_;
  LossWeights weights_;
  bool skip_degenerate_mi_;
  std::size_t height_;
  std::size_t width_;
  std::array<SoftHistogram, 3> reference_;
  std::vector<ActivationStack> source_stacks_;
};

LossReport total_loss(const ImageYUV& output, const ImageYUV& source,
                      const std::array<SoftHistogram, 3>& reference, const LossWeights& weights,
                      const BinningConfig& config);

/// Soft histograms of the three channels of an image.
std::array<SoftHistogram, 3> channel_histograms(const ImageYUV& image, const BinningConfig& config);

}  // namespace histlayer
