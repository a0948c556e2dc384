#include "agrieval/render.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <string>

namespace agrieval {

namespace {

// 5x7 glyphs, one byte per row, bit 4 is the leftmost column.
struct Glyph {
  char ch;
  std::array<std::uint8_t, 7> rows;
};

constexpr Glyph kFont[] = {
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x11, 0x19, 0x15, 0x13, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x15, 0x0A}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x11, 0x0A, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'%', {0x18, 0x19, 0x02, 0x04, 0x08, 0x13, 0x03}},
};

constexpr int kGlyphW = 5;
constexpr int kGlyphH = 7;
constexpr int kAdvance = kGlyphW + 1;
constexpr int kLabelH = kGlyphH + 2;

const Glyph* find_glyph(char c) {
  const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  for (const auto& g : kFont) {
    if (g.ch == up) return &g;
  }
  return nullptr;  // blank
}

class Canvas {
 public:
  explicit Canvas(ImageBuffer& img) : img_(img) {}

  bool inside(long x, long y) const {
    return x >= 0 && y >= 0 && x < static_cast<long>(img_.width()) &&
           y < static_cast<long>(img_.height());
  }

  void set(long x, long y, Rgb c) {
    if (!inside(x, y)) return;
    const auto ux = static_cast<std::uint32_t>(x);
    const auto uy = static_cast<std::uint32_t>(y);
    img_.at(ux, uy, 0) = c.r;
    img_.at(ux, uy, 1) = c.g;
    img_.at(ux, uy, 2) = c.b;
  }

  void blend(long x, long y, Rgb c) {
    if (!inside(x, y)) return;
    const auto ux = static_cast<std::uint32_t>(x);
    const auto uy = static_cast<std::uint32_t>(y);
    const std::uint8_t ch[3] = {c.r, c.g, c.b};
    for (std::size_t k = 0; k < 3; ++k) {
      img_.at(ux, uy, k) =
          static_cast<std::uint8_t>((img_.at(ux, uy, k) + ch[k] + 1) / 2);
    }
  }

  long width() const { return img_.width(); }
  long height() const { return img_.height(); }

 private:
  ImageBuffer& img_;
};

// Inclusive pixel rectangle covered by a continuous box.
struct PixelRect {
  long x0, y0, x1, y1;
};

PixelRect to_pixels(const BBox& b) {
  return {static_cast<long>(std::floor(b.x_min())),
          static_cast<long>(std::floor(b.y_min())),
          static_cast<long>(std::ceil(b.x_max())) - 1,
          static_cast<long>(std::ceil(b.y_max())) - 1};
}

void draw_border(Canvas& canvas, const PixelRect& r, int t, Rgb color) {
  const long xa = std::max(r.x0, 0L), xb = std::min(r.x1, canvas.width() - 1);
  const long ya = std::max(r.y0, 0L), yb = std::min(r.y1, canvas.height() - 1);
  for (long y = ya; y <= yb; ++y) {
    const bool edge_row = y < r.y0 + t || y > r.y1 - t;
    for (long x = xa; x <= xb; ++x) {
      if (edge_row || x < r.x0 + t || x > r.x1 - t) canvas.set(x, y, color);
    }
  }
}

void draw_label(Canvas& canvas, const PixelRect& r, int thickness,
                const std::string& text, Rgb color) {
  const long w = static_cast<long>(text.size()) * kAdvance + 1;
  long left = std::max(r.x0, 0L);
  if (left + w > canvas.width()) left = std::max(0L, canvas.width() - w);
  long top = r.y0 - kLabelH;
  if (top < 0) top = std::max(r.y0, 0L) + thickness;  // no room above the box
  for (long y = top; y < top + kLabelH; ++y) {
    for (long x = left; x < left + w; ++x) canvas.set(x, y, color);
  }
  const Rgb ink{255, 255, 255};
  for (std::size_t i = 0; i < text.size(); ++i) {
    const Glyph* g = find_glyph(text[i]);
    if (!g) continue;
    const long gx = left + 1 + static_cast<long>(i) * kAdvance;
    for (int row = 0; row < kGlyphH; ++row) {
      for (int col = 0; col < kGlyphW; ++col) {
        if (g->rows[row] & (0x10 >> col)) canvas.set(gx + col, top + 1 + row, ink);
      }
    }
  }
}

bool intersects(const PixelRect& r, const Canvas& c) {
  return r.x1 >= 0 && r.y1 >= 0 && r.x0 < c.width() && r.y0 < c.height();
}

}  // namespace

ImageBuffer render_overlay(const ImageBuffer& image,
                           std::span<const OverlayItem> items,
                           const OverlayStyle& style) {
  if (style.thickness < 1) {
    throw InvalidParameter("overlay thickness must be >= 1, got " +
                           std::to_string(style.thickness));
  }
  ImageBuffer out = image;
  if (items.empty()) return out;
  Canvas canvas(out);

  if (style.tint_masks) {
    for (const auto& item : items) {
      const BinaryMask* m = item.mask;
      if (!m || m->width() != out.width() || m->height() != out.height()) continue;
      const Rgb color = style.color(item.label);
      std::uint64_t pos = 0;
      for (std::size_t i = 0; i < m->runs().size(); ++i) {
        if (i & 1) {
          for (std::uint64_t p = pos; p < pos + m->runs()[i]; ++p) {
            canvas.blend(static_cast<long>(p % out.width()),
                         static_cast<long>(p / out.width()), color);
          }
        }
        pos += m->runs()[i];
      }
    }
  }

  for (const auto& item : items) {
    const PixelRect r = to_pixels(item.bbox);
    if (!intersects(r, canvas)) continue;
    draw_border(canvas, r, style.thickness, style.color(item.label));
  }
  if (style.draw_labels) {
    for (const auto& item : items) {
      const PixelRect r = to_pixels(item.bbox);
      if (!intersects(r, canvas)) continue;
      std::string text(to_string(item.label));
      if (style.draw_confidence && item.confidence) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), " %.2f", *item.confidence);
        text += buf;
      }
      draw_label(canvas, r, style.thickness, text, style.color(item.label));
    }
  }
  return out;
}

ImageBuffer render_overlay(const ImageBuffer& image,
                           std::span<const Detection> detections,
                           const OverlayStyle& style) {
  std::vector<OverlayItem> items;
  items.reserve(detections.size());
  for (const auto& d : detections) {
    items.push_back({d.label(), d.bbox(), d.confidence(),
                     d.mask() ? &*d.mask() : nullptr});
  }
  return render_overlay(image, std::span<const OverlayItem>(items), style);
}

ImageBuffer render_overlay(const ImageBuffer& image,
                           std::span<const InstanceAnnotation> annotations,
                           const OverlayStyle& style) {
  std::vector<OverlayItem> items;
  items.reserve(annotations.size());
  for (const auto& a : annotations) {
    items.push_back({a.label(), a.bbox(), std::nullopt, &a.mask()});
  }
  return render_overlay(image, std::span<const OverlayItem>(items), style);
}

}  // namespace agrieval
