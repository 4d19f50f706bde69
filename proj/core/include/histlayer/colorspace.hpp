#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "histlayer/binning.hpp"
#include "histlayer/grid.hpp"

namespace histlayer {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb8&, const Rgb8&) = default;
};

class ImageRGB8 {
 public:
  ImageRGB8() = default;
  ImageRGB8(std::size_t height, std::size_t width, Rgb8 fill = {});
  ImageRGB8(std::size_t height, std::size_t width, std::vector<Rgb8> pixels);

  std::size_t height() const { return height_; }
  std::size_t width() const { return width_; }
  std::size_t size() const { return pixels_.size(); }

  Rgb8& operator()(std::size_t row, std::size_t col) { return pixels_[row * width_ + col]; }
  const Rgb8& operator()(std::size_t row, std::size_t col) const { return pixels_[row * width_ + col]; }
  Rgb8& operator[](std::size_t i) { return pixels_[i]; }
  const Rgb8& operator[](std::size_t i) const { return pixels_[i]; }

  const std::vector<Rgb8>& pixels() const { return pixels_; }

  friend bool operator==(const ImageRGB8&, const ImageRGB8&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<Rgb8> pixels_;
};

/// Three channels in [-1, 1]: luma Y and chroma U (blue difference) and V
/// (red difference).
struct ImageYUV {
  std::array<Channel, 3> channels;

  Channel& y() { return channels[0]; }
  Channel& u() { return channels[1]; }
  Channel& v() { return channels[2]; }
  const Channel& y() const { return channels[0]; }
  const Channel& u() const { return channels[1]; }
  const Channel& v() const { return channels[2]; }

  std::size_t height() const { return channels[0].height(); }
  std::size_t width() const { return channels[0].width(); }
  bool same_shape(const ImageYUV& other) const {
    return channels[0].same_shape(other.channels[0]);
  }

  /// Throws ShapeError unless all three channels share one shape.
  void validate() const;

  friend bool operator==(const ImageYUV&, const ImageYUV&) = default;
};

inline constexpr std::array<const char*, 3> kChannelNames = {"y", "u", "v"};

/// BT.601 luma weights with chroma scaled so that U and V span exactly
/// [-0.5, 0.5]; each channel is then mapped to [-1, 1] and clamped to the
/// histogram range [-1 + L/2, 1 - L/2] of `config`.
ImageYUV rgb_to_yuv(const ImageRGB8& image, const BinningConfig& config);

/// Algebraic inverse of rgb_to_yuv (ignoring the clamp), rounded to the
/// nearest integer and clipped to [0, 255].
ImageRGB8 yuv_to_rgb(const ImageYUV& image);

}  // namespace histlayer
