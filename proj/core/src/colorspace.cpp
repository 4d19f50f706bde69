#include "histlayer/colorspace.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "histlayer/errors.hpp"

namespace histlayer {

namespace {

constexpr double kRed = 0.299;
constexpr double kGreen = 0.587;
constexpr double kBlue = 0.114;
// U = (B - Y) * kUScale and V = (R - Y) * kVScale land in [-0.5, 0.5].
constexpr double kUScale = 0.5 / (1.0 - kBlue);
constexpr double kVScale = 0.5 / (1.0 - kRed);

std::uint8_t to_byte(double unit) {
  return static_cast<std::uint8_t>(std::clamp(std::lround(unit * 255.0), 0L, 255L));
}

}  // namespace

ImageRGB8::ImageRGB8(std::size_t height, std::size_t width, Rgb8 fill)
    : height_(height), width_(width), pixels_(height * width, fill) {}

ImageRGB8::ImageRGB8(std::size_t height, std::size_t width, std::vector<Rgb8> pixels)
    : height_(height), width_(width), pixels_(std::move(pixels)) {
  if (pixels_.size() != height_ * width_) {
    throw ShapeError("image: " + std::to_string(pixels_.size()) + " pixels for a " +
                     std::to_string(height_) + "x" + std::to_string(width_) + " image");
  }
}

void ImageYUV::validate() const {
  if (!channels[0].same_shape(channels[1]) || !channels[0].same_shape(channels[2])) {
    throw ShapeError("yuv image: channels have different shapes");
  }
}

ImageYUV rgb_to_yuv(const ImageRGB8& image, const BinningConfig& config) {
  const std::size_t h = image.height();
  const std::size_t w = image.width();
  ImageYUV out{{Channel(h, w), Channel(h, w), Channel(h, w)}};
  for (std::size_t i = 0; i < image.size(); ++i) {
    const double r = image[i].r / 255.0;
    const double g = image[i].g / 255.0;
    const double b = image[i].b / 255.0;
    const double y = kRed * r + kGreen * g + kBlue * b;
    const double u = std::clamp((b - y) * kUScale, -0.5, 0.5);
    const double v = std::clamp((r - y) * kVScale, -0.5, 0.5);
    out.y()[i] = config.clamp(2.0 * y - 1.0);
    out.u()[i] = config.clamp(2.0 * u);
    out.v()[i] = config.clamp(2.0 * v);
  }
  return out;
}

ImageRGB8 yuv_to_rgb(const ImageYUV& image) {
  image.validate();
  ImageRGB8 out(image.height(), image.width());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double y = 0.5 * (image.y()[i] + 1.0);
    const double u = 0.5 * image.u()[i];
    const double v = 0.5 * image.v()[i];
    const double r = y + v / kVScale;
    const double b = y + u / kUScale;
    const double g = (y - kRed * r - kBlue * b) / kGreen;
    out[i] = {to_byte(r), to_byte(g), to_byte(b)};
  }
  return out;
}

}  // namespace histlayer
