#include <map>
#include <set>

#include "agrieval/image_io.hpp"
#include "agrieval/render.hpp"
#include "parallel.hpp"

namespace agrieval {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
}

std::vector<std::string> output_names(const std::vector<std::string_view>& ids) {
  std::set<std::string> seen;
  std::vector<std::string> names;
  for (auto id : ids) {
    std::string name = safe_file_stem(id) + ".png";
    if (!seen.insert(name).second) {
      throw ValidationError("image ids map to the same output file '" + name + "'");
    }
    names.push_back(std::move(name));
  }
  return names;
}

}  // namespace

std::size_t render_ground_truth(const DatasetManifest& manifest,
                                const fs::path& image_dir, const fs::path& out_dir,
                                const OverlayStyle& style, unsigned threads) {
  std::vector<std::string_view> ids;
  for (const auto& e : manifest.entries) ids.push_back(e.image_id);
  const auto names = output_names(ids);
  ensure_dir(out_dir);
  detail::parallel_for(manifest.entries.size(), threads, [&](std::size_t i) {
    const ManifestEntry& e = manifest.entries[i];
    fs::path src = image_dir / fs::path(e.file_path).filename();
    std::error_code ec;
    if (!fs::exists(src, ec)) src = image_dir / (e.image_id + ".png");
    const ImageBuffer image = read_png(src);
    write_png(render_overlay(image, std::span<const InstanceAnnotation>(e.annotations),
                             style),
              out_dir / names[i]);
  });
  return manifest.entries.size();
}

std::size_t render_predictions(std::span<const Detection> detections,
                               const fs::path& image_dir, const fs::path& out_dir,
                               const OverlayStyle& style, unsigned threads) {
  std::map<std::string_view, std::vector<Detection>> by_image;
  for (const auto& d : detections) by_image[d.image_id()].push_back(d);
  std::vector<std::string_view> ids;
  std::vector<const std::vector<Detection>*> groups;
  for (const auto& [id, dets] : by_image) {
    ids.push_back(id);
    groups.push_back(&dets);
  }
  const auto names = output_names(ids);
  ensure_dir(out_dir);
  detail::parallel_for(ids.size(), threads, [&](std::size_t i) {
    const ImageBuffer image = read_png(image_dir / (std::string(ids[i]) + ".png"));
    write_png(render_overlay(image, std::span<const Detection>(*groups[i]), style),
              out_dir / names[i]);
  });
  return ids.size();
}

}  // namespace agrieval
