#pragma once

#include <filesystem>

#include "agrieval/core.hpp"

namespace agrieval {

// PNG codec. Grey, palette, alpha and 16-bit inputs are converted to 8-bit
// RGB on read. Writes are deterministic (no timestamps or text chunks).
ImageBuffer read_png(const std::filesystem::path& path);
void write_png(const ImageBuffer& image, const std::filesystem::path& path);

struct ImageSize {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
};
// Header-only read; throws IoError if the file is missing or not a PNG.
ImageSize read_png_size(const std::filesystem::path& path);

}  // namespace agrieval
