#pragma once

// Geometry and raster primitives shared by every other module: RGB images,
// polygons, boxes, run-length encoded masks and overlap measures.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agrieval/errors.hpp"

namespace agrieval {

enum class ClassLabel { kTruss, kRunner };

inline constexpr ClassLabel kAllLabels[] = {ClassLabel::kTruss,
                                            ClassLabel::kRunner};

std::string_view to_string(ClassLabel label);
ClassLabel other_label(ClassLabel label);
// Case-insensitive; std::nullopt for anything outside {truss, runner}.
std::optional<ClassLabel> parse_label(std::string_view text);

/// 8-bit interleaved RGB raster, row-major.
class ImageBuffer {
 public:
  static constexpr std::size_t kChannels = 3;

  ImageBuffer(std::uint32_t width, std::uint32_t height, std::uint8_t fill = 0);
  ImageBuffer(std::uint32_t width, std::uint32_t height,
              std::vector<std::uint8_t> data);

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  std::size_t pixel_count() const {
    return static_cast<std::size_t>(width_) * height_;
  }

  std::span<const std::uint8_t> data() const { return data_; }
  std::span<std::uint8_t> mutable_data() { return data_; }

  std::uint8_t at(std::uint32_t x, std::uint32_t y, std::size_t c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }
  std::uint8_t& at(std::uint32_t x, std::uint32_t y, std::size_t c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * kChannels + c];
  }

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<std::uint8_t> data_;
};

struct Point {
  double x = 0.0;
  double y = 0.0;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Simple closed polygon in continuous pixel coordinates. Vertices may lie
/// outside the image; the closing edge is implicit.
class Polygon {
 public:
  // Throws DegenerateGeometry for < 3 vertices, non-finite coordinates or
  // zero signed area.
  explicit Polygon(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return vertices_; }
  double signed_area() const;

  friend bool operator==(const Polygon&, const Polygon&) = default;

 private:
  std::vector<Point> vertices_;
};

/// Axis-aligned box, x_min < x_max and y_min < y_max.
class BBox {
 public:
  BBox(double x_min, double y_min, double x_max, double y_max);

  double x_min() const { return x_min_; }
  double y_min() const { return y_min_; }
  double x_max() const { return x_max_; }
  double y_max() const { return y_max_; }
  double area() const { return (x_max_ - x_min_) * (y_max_ - y_min_); }

  friend bool operator==(const BBox&, const BBox&) = default;

 private:
  double x_min_, y_min_, x_max_, y_max_;
};

/// Binary mask stored as alternating run lengths, zero-run first. The first
/// run may be 0 (mask starts with a set pixel); no other run may be 0.
class BinaryMask {
 public:
  // Throws CorruptMask when the runs do not describe a width x height mask
  // canonically.
  BinaryMask(std::uint32_t width, std::uint32_t height,
             std::vector<std::uint32_t> runs);

  std::uint32_t width() const { return width_; }
  std::uint32_t height() const { return height_; }
  const std::vector<std::uint32_t>& runs() const { return runs_; }
  std::size_t area() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;

 private:
  std::uint32_t width_;
  std::uint32_t height_;
  std::vector<std::uint32_t> runs_;
};

// Row-major bits, one byte per pixel (0 or non-zero).
BinaryMask rle_encode(std::span<const std::uint8_t> dense, std::uint32_t width,
                      std::uint32_t height);
std::vector<std::uint8_t> rle_decode(const BinaryMask& mask);
// Validating decode of raw runs; throws CorruptMask on any inconsistency.
std::vector<std::uint8_t> rle_decode(std::span<const std::uint32_t> runs,
                                     std::uint32_t width, std::uint32_t height);

/// Pixel (row i, col j) is set iff its centre (j + 0.5, i + 0.5) lies inside
/// the polygon under the even-odd rule, with left edges inclusive and right
/// edges exclusive along each scanline.
BinaryMask polygon_to_mask(const Polygon& polygon, std::uint32_t width,
                           std::uint32_t height);

// Axis-aligned hull of the vertices clipped to [0,width] x [0,height].
// Throws DegenerateGeometry when the clipped hull is empty.
BBox polygon_bbox(const Polygon& polygon, std::uint32_t width,
                  std::uint32_t height);

double iou_bbox(const BBox& a, const BBox& b);
// 0 when both masks are empty. Throws ShapeMismatch on differing sizes.
double iou_mask(const BinaryMask& a, const BinaryMask& b);
std::size_t mask_intersection(const BinaryMask& a, const BinaryMask& b);

/// Ground-truth instance. Box and mask are derived from the polygon and the
/// owning image's dimensions at construction.
class InstanceAnnotation {
 public:
  // Throws DegenerateGeometry if the polygon covers no pixel centre.
  InstanceAnnotation(std::string image_id, ClassLabel label, Polygon polygon,
                     std::uint32_t image_width, std::uint32_t image_height);

  const std::string& image_id() const { return image_id_; }
  ClassLabel label() const { return label_; }
  const Polygon& polygon() const { return polygon_; }
  const BBox& bbox() const { return bbox_; }
  const BinaryMask& mask() const { return mask_; }

  friend bool operator==(const InstanceAnnotation&,
                         const InstanceAnnotation&) = default;

 private:
  std::string image_id_;
  ClassLabel label_;
  Polygon polygon_;
  BBox bbox_;
  BinaryMask mask_;
};

class Detection {
 public:
  // Throws ValidationError when confidence is outside [0,1] or NaN.
  Detection(std::string image_id, ClassLabel label, double confidence,
            BBox bbox, std::optional<BinaryMask> mask = std::nullopt);

  const std::string& image_id() const { return image_id_; }
  ClassLabel label() const { return label_; }
  double confidence() const { return confidence_; }
  const BBox& bbox() const { return bbox_; }
  const std::optional<BinaryMask>& mask() const { return mask_; }

  friend bool operator==(const Detection&, const Detection&) = default;

 private:
  std::string image_id_;
  ClassLabel label_;
  double confidence_;
  BBox bbox_;
  std::optional<BinaryMask> mask_;
};

}  // namespace agrieval
