#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "histlayer/colorspace.hpp"
#include "histlayer/metrics.hpp"

namespace histlayer {

/// Adam moments for a three-channel image treated as free parameters.
struct AdamState {
  std::size_t step = 0;
  double lr = 0.01;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::array<std::vector<double>, 3> m;
  std::array<std::vector<double>, 3> v;

  /// Zero moments sized for an image of `pixels` pixels per channel.
  static AdamState zeros(std::size_t pixels, double lr, double beta1 = 0.5, double beta2 = 0.999,
                         double eps = 1e-8);
};

/// One bias-corrected Adam update of `params` in place. Throws ShapeError if
/// the gradient or moment shapes do not match the image.
void adam_step(AdamState& state, ImageYUV& params, const PixelGradient& grads);

enum class InitMode { from_source, from_noise };

struct OptimizationConfig {
  std::size_t max_steps = 2000;
  LossWeights weights;
  BinningConfig binning = BinningConfig::with_bins(kDefaultBins);
  /// Pixel-space step size. Network-weight learning rates (~2e-4) are far
  /// too small when the pixels themselves are the parameters.
  double lr = 0.01;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double eps = 1e-8;
  std::uint64_t seed = 0;
  std::size_t log_every = 1;
  InitMode init = InitMode::from_source;

  /// Throws std::invalid_argument on out-of-range settings.
  void validate() const;
};

struct LossTrace {
  struct Record {
    std::size_t step = 0;
    double total = 0.0;
    double emd = 0.0;
    double mi = 0.0;

    friend bool operator==(const Record&, const Record&) = default;
  };

  std::vector<Record> records;
  /// Non-fatal events, e.g. an MI term skipped on a degenerate joint.
  std::vector<std::string> warnings;

  /// CSV with header "step,total,emd,mi" and 17 significant digits.
  void write_csv(std::ostream& os) const;
};

struct OptimizationResult {
  ImageYUV image;
  LossTrace trace;
  LossReport final_report;
};

/// Minimizes the color-transfer loss over the pixels of the output image.
///
/// The output starts as a copy of `source` or as seeded uniform noise, and
/// after every Adam step each pixel is clamped to the histogram range. The
/// trace holds the loss before step s for s = 0, log_every, 2 * log_every, ...
/// and the loss of the returned image at s = max_steps. Results are
/// bit-identical across runs for a fixed configuration and thread count.
///
/// Throws OptimizationError if the loss becomes non-finite.
OptimizationResult optimize(const ImageYUV& source, const std::array<SoftHistogram, 3>& reference,
                            const OptimizationConfig& config);

struct TransferResult {
  ImageRGB8 image;
  LossTrace trace;
  LossReport final_report;
};

/// Repaints `source` with the color distribution of `reference`. The images
/// may differ in size.
TransferResult color_transfer(const ImageRGB8& source, const ImageRGB8& reference,
                              const OptimizationConfig& config);

}  // namespace histlayer
