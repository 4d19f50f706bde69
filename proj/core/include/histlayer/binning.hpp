#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "histlayer/grid.hpp"

namespace histlayer {

inline constexpr std::size_t kDefaultBins = 256;
inline constexpr double kDefaultBandwidthRatio = 2.5;

/// Partition of [-1, 1] into K equal bins plus the kernel bandwidth.
///
/// Bin k covers [-1 + kL, -1 + (k+1)L] with L = 2/K and center
/// -1 + L(k + 1/2). The bandwidth B sets the softness of the bin
/// membership functions; B = L / 2.5 by default.
class BinningConfig {
 public:
  /// B = L / bandwidth_ratio.
  static BinningConfig with_bins(std::size_t bins, double bandwidth_ratio = kDefaultBandwidthRatio);
  static BinningConfig with_bandwidth(std::size_t bins, double bandwidth);

  std::size_t bins() const { return bins_; }
  double bin_width() const { return bin_width_; }
  double bandwidth() const { return bandwidth_; }

  double center(std::size_t k) const { return centers_[k]; }
  std::span<const double> centers() const { return centers_; }
  /// Lower edge of bin k; edge(K) is the top of the range.
  double edge(std::size_t k) const { return -1.0 + static_cast<double>(k) * bin_width_; }

  /// Index of the bin containing z, with out-of-range values pinned to the end bins.
  std::size_t bin_of(double z) const;

  /// Values are clamped to [-1 + L/2, 1 - L/2] before histogramming, which
  /// keeps the kernel mass of edge pixels inside [-1, 1].
  double clamp_min() const { return -1.0 + 0.5 * bin_width_; }
  double clamp_max() const { return 1.0 - 0.5 * bin_width_; }
  double clamp(double z) const;

  /// Bins on either side of a pixel's own bin that can carry a membership
  /// above the double-precision rounding floor (about 2.2e-16). Entries
  /// further away are stored as exact zeros.
  std::size_t support_radius() const;

  friend bool operator==(const BinningConfig& a, const BinningConfig& b) {
    return a.bins_ == b.bins_ && a.bandwidth_ == b.bandwidth_;
  }

 private:
  BinningConfig(std::size_t bins, double bandwidth);

  std::size_t bins_;
  double bin_width_;
  double bandwidth_;
  std::vector<double> centers_;
};

/// Logistic function, evaluated without overflow for any finite z.
double sigmoid(double z);

/// Derivative of the logistic function, sigma(z) * sigma(-z). Peaks at 0.25.
double sigmoid_kernel(double z);

/// Soft membership of intensity z in bin k:
///   sigma((z - mu_k + L/2) / B) - sigma((z - mu_k - L/2) / B).
/// A smooth stand-in for the indicator of bin k; maximal at the bin center.
double bin_membership(double z, std::size_t k, const BinningConfig& config);

/// d/dz of bin_membership.
double bin_membership_deriv(double z, std::size_t k, const BinningConfig& config);

/// The K activation maps of one channel: map k holds bin_membership(I(x), k)
/// for every pixel x.
///
/// Storage is banded. Each pixel keeps a fixed-width window of consecutive
/// bins around its own bin (see BinningConfig::support_radius) together with
/// the derivatives needed by the backward passes. Outside the window the map
/// value is zero. When the window covers all K bins the stack is dense.
class ActivationStack {
 public:
  const BinningConfig& config() const { return config_; }
  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t pixels() const { return values_.size(); }

  /// Channel intensities the stack was built from.
  std::span<const double> values() const { return values_; }

  std::size_t window() const { return window_; }
  std::size_t first_bin(std::size_t pixel) const { return first_[pixel]; }
  std::span<const double> activations(std::size_t pixel) const {
    return {activations_.data() + pixel * window_, window_};
  }
  std::span<const double> derivatives(std::size_t pixel) const {
    return {derivatives_.data() + pixel * window_, window_};
  }

  /// maps[k][pixel].
  double at(std::size_t k, std::size_t pixel) const;

  /// K×N row-major matrix whose row k is the flattened activation map k.
  std::vector<double> dense() const;

  bool same_domain(const ActivationStack& other) const {
    return height_ == other.height_ && width_ == other.width_ && config_ == other.config_;
  }

 private:
  friend ActivationStack activation_stack(const Channel&, const BinningConfig&);
  explicit ActivationStack(const BinningConfig& config) : config_(config) {}

  BinningConfig config_;
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t window_ = 0;
  std::vector<double> values_;
  std::vector<std::uint32_t> first_;
  std::vector<double> activations_;
  std::vector<double> derivatives_;
};

/// Applies the K membership functions to every pixel of the channel.
/// Throws std::domain_error if a value is non-finite or outside [-1, 1].
ActivationStack activation_stack(const Channel& channel, const BinningConfig& config);

}  // namespace histlayer
