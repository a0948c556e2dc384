#pragma once

#include <fstream>
#include <initializer_list>
#include <string>

#include "agrieval/dataset.hpp"
#include "oracles.hpp"

namespace agrieval::testing {

// 64x64 entry holding one small square per listed label, laid out left to
// right so instances never overlap.
inline ManifestEntry make_entry(const std::string& id, Split split,
                                std::initializer_list<ClassLabel> labels = {}) {
  ManifestEntry e;
  e.image_id = id;
  e.file_path = id + ".png";
  e.width = 64;
  e.height = 64;
  e.split = split;
  double x = 2;
  for (ClassLabel label : labels) {
    e.annotations.emplace_back(id, label, rect_polygon(x, 4, x + 8, 20), 64, 64);
    x += 12;
  }
  return e;
}

inline DatasetManifest composition_manifest(int truss_only, int runner_only,
                                            int both, int empty = 0) {
  DatasetManifest m;
  int n = 0;
  auto add = [&](int count, std::initializer_list<ClassLabel> labels) {
    for (int i = 0; i < count; ++i, ++n) {
      m.entries.push_back(make_entry("img_" + std::to_string(n), Split::kTest, labels));
    }
  };
  add(truss_only, {ClassLabel::kTruss});
  add(runner_only, {ClassLabel::kRunner});
  add(both, {ClassLabel::kTruss, ClassLabel::kRunner});
  add(empty, {});
  return m;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace agrieval::testing
