#include "histlayer/png_io.hpp"

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

#include "histlayer/errors.hpp"

namespace histlayer {

ImageRGB8 read_png(const std::filesystem::path& path) {
  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;

  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw IoError("cannot read PNG '" + path.string() + "': " + png.message);
  }
  png.format = PNG_FORMAT_RGB;
  std::vector<png_byte> buffer(PNG_IMAGE_SIZE(png));
  // Composite any alpha onto black.
  const png_color background{0, 0, 0};
  if (!png_image_finish_read(&png, &background, buffer.data(), 0, nullptr)) {
    const std::string message = png.message;
    png_image_free(&png);
    throw IoError("cannot decode PNG '" + path.string() + "': " + message);
  }

  ImageRGB8 image(png.height, png.width);
  for (std::size_t i = 0; i < image.size(); ++i) {
    image[i] = {buffer[3 * i], buffer[3 * i + 1], buffer[3 * i + 2]};
  }
  return image;
}

void write_png(const std::filesystem::path& path, const ImageRGB8& image) {
  if (image.size() == 0) throw IoError("cannot write an empty image to '" + path.string() + "'");
  std::vector<png_byte> buffer(3 * image.size());
  for (std::size_t i = 0; i < image.size(); ++i) {
    buffer[3 * i] = image[i].r;
    buffer[3 * i + 1] = image[i].g;
    buffer[3 * i + 2] = image[i].b;
  }

  png_image png;
  std::memset(&png, 0, sizeof png);
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&png, path.c_str(), 0, buffer.data(), 0, nullptr)) {
    throw IoError("cannot write PNG '" + path.string() + "': " + png.message);
  }
}

}  // namespace histlayer
