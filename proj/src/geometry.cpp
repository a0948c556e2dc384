#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "agrieval/core.hpp"
#include "rle_builder.hpp"

namespace agrieval {

std::string_view to_string(ClassLabel label) {
  return label == ClassLabel::kTruss ? "truss" : "runner";
}

ClassLabel other_label(ClassLabel label) {
  return label == ClassLabel::kTruss ? ClassLabel::kRunner : ClassLabel::kTruss;
}

std::optional<ClassLabel> parse_label(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "truss") return ClassLabel::kTruss;
  if (lower == "runner") return ClassLabel::kRunner;
  return std::nullopt;
}

ImageBuffer::ImageBuffer(std::uint32_t width, std::uint32_t height,
                         std::uint8_t fill)
    : width_(width), height_(height) {
  if (width == 0 || height == 0) {
    throw InvalidParameter("image dimensions must be at least 1x1");
  }
  data_.assign(pixel_count() * kChannels, fill);
}

ImageBuffer::ImageBuffer(std::uint32_t width, std::uint32_t height,
                         std::vector<std::uint8_t> data)
    : width_(width), height_(height), data_(std::move(data)) {
  if (width == 0 || height == 0) {
    throw InvalidParameter("image dimensions must be at least 1x1");
  }
  if (data_.size() != pixel_count() * kChannels) {
    throw ShapeMismatch("image data has " + std::to_string(data_.size()) +
                        " bytes, expected " +
                        std::to_string(pixel_count() * kChannels));
  }
}

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
  if (vertices_.size() < 3) {
    throw DegenerateGeometry("polygon needs at least 3 vertices, got " +
                             std::to_string(vertices_.size()));
  }
  for (const auto& p : vertices_) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw DegenerateGeometry("polygon vertex is not finite");
    }
  }
  if (signed_area() == 0.0) {
    throw DegenerateGeometry("polygon has zero area");
  }
}

double Polygon::signed_area() const {
  // Shoelace formula.
  double twice = 0.0;
  const std::size_t n = vertices_.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    twice += vertices_[j].x * vertices_[i].y - vertices_[i].x * vertices_[j].y;
  }
  return twice / 2.0;
}

BBox::BBox(double x_min, double y_min, double x_max, double y_max)
    : x_min_(x_min), y_min_(y_min), x_max_(x_max), y_max_(y_max) {
  // Negated comparisons also reject NaN.
  if (!(x_min < x_max) || !(y_min < y_max) || !std::isfinite(x_min) ||
      !std::isfinite(y_min) || !std::isfinite(x_max) || !std::isfinite(y_max)) {
    throw DegenerateGeometry("invalid box [" + std::to_string(x_min) + ", " +
                             std::to_string(y_min) + ", " +
                             std::to_string(x_max) + ", " +
                             std::to_string(y_max) + "]");
  }
}

BBox polygon_bbox(const Polygon& polygon, std::uint32_t width,
                  std::uint32_t height) {
  double x0 = polygon.vertices().front().x, x1 = x0;
  double y0 = polygon.vertices().front().y, y1 = y0;
  for (const auto& p : polygon.vertices()) {
    x0 = std::min(x0, p.x);
    x1 = std::max(x1, p.x);
    y0 = std::min(y0, p.y);
    y1 = std::max(y1, p.y);
  }
  const double w = width, h = height;
  x0 = std::clamp(x0, 0.0, w);
  x1 = std::clamp(x1, 0.0, w);
  y0 = std::clamp(y0, 0.0, h);
  y1 = std::clamp(y1, 0.0, h);
  if (!(x0 < x1) || !(y0 < y1)) {
    throw DegenerateGeometry("polygon lies outside the image");
  }
  return BBox(x0, y0, x1, y1);
}

BinaryMask polygon_to_mask(const Polygon& polygon, std::uint32_t width,
                           std::uint32_t height) {
  if (width == 0 || height == 0) {
    throw InvalidParameter("mask dimensions must be at least 1x1");
  }
  const auto& v = polygon.vertices();
  const std::size_t n = v.size();
  detail::RleBuilder builder;
  std::vector<double> xs;
  xs.reserve(n);

  for (std::uint32_t row = 0; row < height; ++row) {
    const double y = row + 0.5;
    xs.clear();
    // Half-open in y: an edge counts when exactly one endpoint is above y.
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const Point& a = v[i];
      const Point& b = v[j];
      if ((a.y > y) != (b.y > y)) {
        xs.push_back((b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x);
      }
    }
    std::sort(xs.begin(), xs.end());
    const std::uint64_t row_start = static_cast<std::uint64_t>(row) * width;
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Columns whose centre c satisfies xs[k] <= c < xs[k+1].
      const double lo = xs[k], hi = xs[k + 1];
      double first = std::ceil(lo - 0.5);
      first = std::max(first, 0.0);
      while (first > 0 && (first - 1.0) + 0.5 >= lo) first -= 1.0;
      while (first + 0.5 < lo) first += 1.0;
      double last = std::ceil(hi - 0.5);  // exclusive
      last = std::min(last, static_cast<double>(width));
      while (last < width && last + 0.5 < hi) last += 1.0;
      while (last > 0 && (last - 1.0) + 0.5 >= hi) last -= 1.0;
      if (first >= last) continue;
      builder.push_set(row_start + static_cast<std::uint64_t>(first),
                       row_start + static_cast<std::uint64_t>(last));
    }
  }
  return BinaryMask(width, height,
                    builder.finish(static_cast<std::uint64_t>(width) * height));
}

double iou_bbox(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x_max(), b.x_max()) - std::max(a.x_min(), b.x_min());
  const double iy = std::min(a.y_max(), b.y_max()) - std::max(a.y_min(), b.y_min());
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  return std::clamp(inter / uni, 0.0, 1.0);
}

InstanceAnnotation::InstanceAnnotation(std::string image_id, ClassLabel label,
                                       Polygon polygon,
                                       std::uint32_t image_width,
                                       std::uint32_t image_height)
    : image_id_(std::move(image_id)),
      label_(label),
      polygon_(std::move(polygon)),
      bbox_(polygon_bbox(polygon_, image_width, image_height)),
      mask_(polygon_to_mask(polygon_, image_width, image_height)) {
  if (mask_.area() == 0) {
    throw DegenerateGeometry("polygon covers no pixel centre");
  }
}

Detection::Detection(std::string image_id, ClassLabel label, double confidence,
                     BBox bbox, std::optional<BinaryMask> mask)
    : image_id_(std::move(image_id)),
      label_(label),
      confidence_(confidence),
      bbox_(bbox),
      mask_(std::move(mask)) {
  if (!(confidence >= 0.0 && confidence <= 1.0)) {
    throw ValidationError("detection confidence " + std::to_string(confidence) +
                          " outside [0,1]");
  }
}

}  // namespace agrieval
