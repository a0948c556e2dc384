#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace agrieval::detail {

// Accumulates set spans in increasing, non-overlapping order and emits the
// canonical zero-first run list.
class RleBuilder {
 public:
  void push_set(std::uint64_t begin, std::uint64_t end) {
    if (begin >= end) return;
    if (begin < cursor_) throw std::logic_error("RleBuilder spans out of order");
    if (begin == cursor_ && !runs_.empty() && in_ones_) {
      runs_.back() += static_cast<std::uint32_t>(end - begin);
    } else {
      runs_.push_back(static_cast<std::uint32_t>(begin - cursor_));  // zeros
      runs_.push_back(static_cast<std::uint32_t>(end - begin));
    }
    in_ones_ = true;
    cursor_ = end;
  }

  std::vector<std::uint32_t> finish(std::uint64_t total) {
    if (runs_.empty()) {
      runs_.push_back(static_cast<std::uint32_t>(total));
    } else if (total > cursor_) {
      runs_.push_back(static_cast<std::uint32_t>(total - cursor_));
    }
    return std::move(runs_);
  }

 private:
  std::vector<std::uint32_t> runs_;
  std::uint64_t cursor_ = 0;
  bool in_ones_ = false;
};

}  // namespace agrieval::detail
