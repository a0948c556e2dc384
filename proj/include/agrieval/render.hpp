#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>

#include "agrieval/core.hpp"
#include "agrieval/dataset.hpp"

namespace agrieval {

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

struct OverlayStyle {
  Rgb truss_color{230, 40, 40};
  Rgb runner_color{40, 90, 230};
  int thickness = 2;
  bool draw_labels = true;
  bool draw_confidence = true;
  bool tint_masks = false;  // 50% blend of the class colour over mask pixels

  Rgb color(ClassLabel label) const {
    return label == ClassLabel::kTruss ? truss_color : runner_color;
  }
};

struct OverlayItem {
  ClassLabel label = ClassLabel::kTruss;
  BBox bbox{0, 0, 1, 1};
  std::optional<double> confidence;
  const BinaryMask* mask = nullptr;
};

// Box borders cover the pixels of [floor(x_min), ceil(x_max)) x
// [floor(y_min), ceil(y_max)) within `thickness` of the rectangle's edge;
// anything outside the image is clipped. Labels use a built-in 5x7 font and
// sit above the box, or just inside it when there is no room above.
// Throws InvalidParameter for thickness < 1.
ImageBuffer render_overlay(const ImageBuffer& image,
                           std::span<const OverlayItem> items,
                           const OverlayStyle& style = {});
ImageBuffer render_overlay(const ImageBuffer& image,
                           std::span<const Detection> detections,
                           const OverlayStyle& style = {});
ImageBuffer render_overlay(const ImageBuffer& image,
                           std::span<const InstanceAnnotation> annotations,
                           const OverlayStyle& style = {});

// Batch rendering to `out_dir/<image id>.png`. Source images are looked up in
// `image_dir`: by the file name of the entry's file_path for ground truth,
// and as `<image id>.png` for predictions (ground truth falls back to that
// too). Returns the number of images written. `threads` = 0 picks the
// hardware concurrency.
std::size_t render_ground_truth(const DatasetManifest& manifest,
                                const std::filesystem::path& image_dir,
                                const std::filesystem::path& out_dir,
                                const OverlayStyle& style = {},
                                unsigned threads = 0);
std::size_t render_predictions(std::span<const Detection> detections,
                               const std::filesystem::path& image_dir,
                               const std::filesystem::path& out_dir,
                               const OverlayStyle& style = {},
                               unsigned threads = 0);

}  // namespace agrieval
