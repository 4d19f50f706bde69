#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace histlayer {

inline constexpr double kDefaultGradStep = 1e-4;
inline constexpr double kRelErrorFloor = 1e-8;

struct GradCheckReport {
  std::string op_name;
  double max_rel_error = 0.0;
  std::size_t num_points = 0;
  double step = kDefaultGradStep;
  /// Coordinate at which max_rel_error occurred.
  std::size_t worst_index = 0;
};

using ScalarFn = std::function<double(std::span<const double>)>;
using GradientFn = std::function<std::vector<double>(std::span<const double>)>;

/// Compares analytic_grad(point) with central differences
///   (fn(x + h e_i) - fn(x - h e_i)) / 2h
/// coordinate by coordinate. Relative error is |a - b| / max(|a|, |b|, 1e-8).
/// Throws std::invalid_argument for step <= 0 or a gradient of the wrong
/// length, and std::domain_error if fn returns a non-finite value.
GradCheckReport check_scalar_fn(std::string op_name, const ScalarFn& fn,
                                const GradientFn& analytic_grad, std::span<const double> point,
                                double step = kDefaultGradStep);

/// End-to-end check of the color-transfer loss (EMD + MI weights 1, 1) on a
/// random size×size image against random reference histograms, over every
/// pixel of all three output channels.
GradCheckReport check_total_loss(std::size_t size, std::size_t bins, std::uint64_t seed,
                                 double step = kDefaultGradStep);

nlohmann::json to_json(const GradCheckReport& report);

}  // namespace histlayer
