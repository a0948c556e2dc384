#include "agrieval/image_io.hpp"

#include <png.h>

#include <cstring>

namespace agrieval {

namespace {

struct PngImage {
  png_image image;
  PngImage() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;
};

[[noreturn]] void fail(const std::filesystem::path& path, const char* action,
                       const png_image& image) {
  throw IoError("cannot " + std::string(action) + " " + path.string() + ": " +
                image.message);
}

}  // namespace

ImageSize read_png_size(const std::filesystem::path& path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    fail(path, "read", png.image);
  }
  return {png.image.width, png.image.height};
}

ImageBuffer read_png(const std::filesystem::path& path) {
  PngImage png;
  if (!png_image_begin_read_from_file(&png.image, path.c_str())) {
    fail(path, "read", png.image);
  }
  png.image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> data(PNG_IMAGE_SIZE(png.image));
  if (!png_image_finish_read(&png.image, nullptr, data.data(), 0, nullptr)) {
    fail(path, "decode", png.image);
  }
  return ImageBuffer(png.image.width, png.image.height, std::move(data));
}

void write_png(const ImageBuffer& image, const std::filesystem::path& path) {
  PngImage png;
  png.image.width = image.width();
  png.image.height = image.height();
  png.image.format = PNG_FORMAT_RGB;
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (!png_image_write_to_file(&png.image, path.c_str(), 0,
                               image.data().data(), 0, nullptr)) {
    fail(path, "write", png.image);
  }
}

}  // namespace agrieval
