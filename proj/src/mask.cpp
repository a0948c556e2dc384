#include <algorithm>
#include <string>

#include "agrieval/core.hpp"

namespace agrieval {

namespace {

void check_runs(std::span<const std::uint32_t> runs, std::uint32_t width,
                std::uint32_t height) {
  if (width == 0 || height == 0) {
    throw CorruptMask("mask dimensions must be at least 1x1");
  }
  if (runs.empty()) throw CorruptMask("mask has no runs");
  std::uint64_t sum = 0;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (i > 0 && runs[i] == 0) {
      throw CorruptMask("zero-length run at position " + std::to_string(i));
    }
    sum += runs[i];
  }
  const std::uint64_t expected = static_cast<std::uint64_t>(width) * height;
  if (sum != expected) {
    throw CorruptMask("runs sum to " + std::to_string(sum) + ", expected " +
                      std::to_string(expected));
  }
}

}  // namespace

BinaryMask::BinaryMask(std::uint32_t width, std::uint32_t height,
                       std::vector<std::uint32_t> runs)
    : width_(width), height_(height), runs_(std::move(runs)) {
  check_runs(runs_, width_, height_);
}

std::size_t BinaryMask::area() const {
  std::size_t n = 0;
  for (std::size_t i = 1; i < runs_.size(); i += 2) n += runs_[i];
  return n;
}

BinaryMask rle_encode(std::span<const std::uint8_t> dense, std::uint32_t width,
                      std::uint32_t height) {
  if (dense.size() != static_cast<std::size_t>(width) * height) {
    throw ShapeMismatch("dense mask has " + std::to_string(dense.size()) +
                        " pixels, expected " +
                        std::to_string(static_cast<std::size_t>(width) * height));
  }
  std::vector<std::uint32_t> runs;
  bool value = false;
  std::uint32_t count = 0;
  for (std::uint8_t px : dense) {
    const bool bit = px != 0;
    if (bit != value) {
      runs.push_back(count);
      value = bit;
      count = 0;
    }
    ++count;
  }
  runs.push_back(count);
  return BinaryMask(width, height, std::move(runs));
}

std::vector<std::uint8_t> rle_decode(const BinaryMask& mask) {
  std::vector<std::uint8_t> dense;
  dense.reserve(static_cast<std::size_t>(mask.width()) * mask.height());
  std::uint8_t value = 0;
  for (std::uint32_t run : mask.runs()) {
    dense.insert(dense.end(), run, value);
    value ^= 1;
  }
  return dense;
}

std::vector<std::uint8_t> rle_decode(std::span<const std::uint32_t> runs,
                                     std::uint32_t width, std::uint32_t height) {
  check_runs(runs, width, height);
  return rle_decode(
      BinaryMask(width, height, std::vector<std::uint32_t>(runs.begin(), runs.end())));
}

std::size_t mask_intersection(const BinaryMask& a, const BinaryMask& b) {
  if (a.width() != b.width() || a.height() != b.height()) {
    throw ShapeMismatch("mask sizes differ: " + std::to_string(a.width()) + "x" +
                        std::to_string(a.height()) + " vs " +
                        std::to_string(b.width()) + "x" +
                        std::to_string(b.height()));
  }
  // Walk both run lists in lockstep.
  const auto& ra = a.runs();
  const auto& rb = b.runs();
  std::size_t ia = 0, ib = 0;
  std::uint64_t left_a = ra[0], left_b = rb[0];
  std::size_t inter = 0;
  while (ia < ra.size() && ib < rb.size()) {
    if (left_a == 0) {
      if (++ia < ra.size()) left_a = ra[ia];
      continue;
    }
    if (left_b == 0) {
      if (++ib < rb.size()) left_b = rb[ib];
      continue;
    }
    const std::uint64_t step = std::min(left_a, left_b);
    if ((ia & 1) && (ib & 1)) inter += step;
    left_a -= step;
    left_b -= step;
  }
  return inter;
}

double iou_mask(const BinaryMask& a, const BinaryMask& b) {
  const std::size_t inter = mask_intersection(a, b);
  const std::size_t uni = a.area() + b.area() - inter;
  if (uni == 0) return 0.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

}  // namespace agrieval
