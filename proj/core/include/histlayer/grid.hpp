#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "histlayer/errors.hpp"

namespace histlayer {

/// Row-major H×W grid of doubles.
///
/// Used both for image channels (intensities in [-1, 1]) and for
/// per-pixel gradients. Range requirements are checked by the operations
/// that consume a channel, not by the grid itself.
class Grid {
 public:
  Grid() = default;
  Grid(std::size_t height, std::size_t width, double fill = 0.0)
      : height_(height), width_(width), values_(height * width, fill) {}

  Grid(std::size_t height, std::size_t width, std::vector<double> values)
      : height_(height), width_(width), values_(std::move(values)) {
    if (values_.size() != height_ * width_) {
      throw ShapeError("grid: " + std::to_string(values_.size()) + " values for a " +
                       std::to_string(height_) + "x" + std::to_string(width_) + " grid");
    }
  }

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }

  double& operator()(std::size_t row, std::size_t col) { return values_[row * width_ + col]; }
  double operator()(std::size_t row, std::size_t col) const { return values_[row * width_ + col]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  bool same_shape(const Grid& other) const {
    return height_ == other.height_ && width_ == other.width_;
  }

  friend bool operator==(const Grid&, const Grid&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<double> values_;
};

/// One color channel of an image, the domain over which histograms are taken.
using Channel = Grid;

}  // namespace histlayer
