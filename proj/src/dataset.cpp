#include "agrieval/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <set>

#include "agrieval/image_io.hpp"
#include "json_util.hpp"

namespace agrieval {

namespace fs = std::filesystem;
using detail::json;

std::string_view to_string(Split split) {
  return split == Split::kTrain ? "train" : "test";
}

std::optional<Split> parse_split(std::string_view text) {
  if (text == "train") return Split::kTrain;
  if (text == "test") return Split::kTest;
  return std::nullopt;
}

std::string safe_file_stem(std::string_view image_id) {
  std::string out;
  out.reserve(image_id.size());
  for (char c : image_id) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '-' || c == '_' || c == '.';
    out.push_back(ok ? c : '_');
  }
  if (out.empty() || out == "." || out == "..") out = "_" + out;
  return out;
}

const ManifestEntry* DatasetManifest::find(std::string_view image_id) const {
  for (const auto& e : entries) {
    if (e.image_id == image_id) return &e;
  }
  return nullptr;
}

fs::path DatasetManifest::image_path(const ManifestEntry& entry) const {
  const fs::path p(entry.file_path);
  if (p.is_absolute() || base_dir.empty()) return p;
  return base_dir / p;
}

void validate_manifest(const DatasetManifest& manifest) {
  std::set<std::string_view> ids;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const auto& e = manifest.entries[i];
    if (e.image_id.empty()) {
      throw ValidationError("entries[" + std::to_string(i) + "]: empty image_id");
    }
    if (!ids.insert(e.image_id).second) {
      throw ValidationError("duplicate image_id '" + e.image_id + "'");
    }
    if (e.width == 0 || e.height == 0) {
      throw ValidationError("image '" + e.image_id + "': zero width or height");
    }
    for (std::size_t k = 0; k < e.annotations.size(); ++k) {
      const auto& a = e.annotations[k];
      if (a.image_id() != e.image_id) {
        throw ValidationError("image '" + e.image_id + "' annotation " +
                              std::to_string(k) + " belongs to image '" +
                              a.image_id() + "'");
      }
      if (a.mask().width() != e.width || a.mask().height() != e.height) {
        throw ValidationError("image '" + e.image_id + "' annotation " +
                              std::to_string(k) +
                              " was rasterized at a different size");
      }
    }
  }
}

namespace {

Polygon parse_points(const json& points, const std::string& where) {
  if (!points.is_array()) throw FormatError(where + ": expected an array of points");
  std::vector<Point> vertices;
  vertices.reserve(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const json& p = points[i];
    const std::string at = where + "[" + std::to_string(i) + "]";
    if (!p.is_array() || p.size() != 2) {
      throw FormatError(at + ": expected [x, y]");
    }
    vertices.push_back({detail::as_number(p[0], at), detail::as_number(p[1], at)});
  }
  return Polygon(std::move(vertices));
}

Provenance parse_provenance(const json& j, const std::string& where) {
  Provenance p;
  p.source_image_id = detail::get_string(j, "source_image_id", where);
  p.kind = detail::get_string(j, "kind", where);
  const json& params = detail::require(j, "parameters", where);
  if (!params.is_object() || params.size() != 1) {
    throw FormatError(where + ".parameters: expected an object with one entry");
  }
  p.parameter_name = params.begin().key();
  p.parameter = detail::as_number(params.begin().value(), where + ".parameters");
  const auto u64max = std::numeric_limits<std::uint64_t>::max();
  p.seed = detail::as_uint(detail::require(j, "seed", where), where + ".seed", u64max);
  p.image_seed = detail::as_uint(detail::require(j, "image_seed", where),
                                 where + ".image_seed", u64max);
  p.rng = detail::get_string(j, "rng", where);
  return p;
}

json provenance_to_json(const Provenance& p) {
  return json{{"source_image_id", p.source_image_id},
              {"kind", p.kind},
              {"parameters", json{{p.parameter_name, p.parameter}}},
              {"seed", p.seed},
              {"image_seed", p.image_seed},
              {"rng", p.rng}};
}

ManifestEntry parse_entry(const json& j, std::size_t index) {
  const std::string where = "entries[" + std::to_string(index) + "]";
  ManifestEntry e;
  e.image_id = detail::get_string(j, "image_id", where);
  e.file_path = detail::get_string(j, "file_path", where);
  constexpr std::uint64_t kMaxDim = 1u << 30;
  e.width = static_cast<std::uint32_t>(
      detail::as_uint(detail::require(j, "width", where), where + ".width", kMaxDim));
  e.height = static_cast<std::uint32_t>(detail::as_uint(
      detail::require(j, "height", where), where + ".height", kMaxDim));
  if (e.width == 0 || e.height == 0) {
    throw ValidationError(where + " ('" + e.image_id + "'): zero width or height");
  }
  const std::string split = detail::get_string(j, "split", where);
  const auto parsed_split = parse_split(split);
  if (!parsed_split) {
    throw FormatError(where + ".split: expected 'train' or 'test', got '" +
                      split + "'");
  }
  e.split = *parsed_split;

  const json& anns = detail::get_array(j, "annotations", where);
  for (std::size_t k = 0; k < anns.size(); ++k) {
    const std::string at = where + ".annotations[" + std::to_string(k) + "]";
    const std::string label_text = detail::get_string(anns[k], "label", at);
    const auto label = parse_label(label_text);
    if (!label || label_text != to_string(*label)) {
      throw ValidationError(at + " ('" + e.image_id + "'): unknown label '" +
                            label_text + "'");
    }
    try {
      Polygon polygon = parse_points(detail::require(anns[k], "polygon", at),
                                     at + ".polygon");
      e.annotations.emplace_back(e.image_id, *label, std::move(polygon), e.width,
                                 e.height);
    } catch (const DegenerateGeometry& err) {
      throw ValidationError(at + " (image '" + e.image_id + "', " + label_text +
                            "): " + err.what());
    }
  }
  if (auto it = j.find("provenance"); it != j.end() && !it->is_null()) {
    e.provenance = parse_provenance(*it, where + ".provenance");
  }
  return e;
}

}  // namespace

DatasetManifest parse_manifest(std::string_view json_text,
                               const fs::path& base_dir) {
  const json root = detail::parse_json(json_text, "manifest");
  detail::check_version(root, "manifest");
  const json& entries = detail::get_array(root, "entries", "manifest");
  DatasetManifest manifest;
  manifest.base_dir = base_dir;
  manifest.entries.reserve(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    manifest.entries.push_back(parse_entry(entries[i], i));
  }
  validate_manifest(manifest);
  return manifest;
}

DatasetManifest load_manifest(const fs::path& path, const LoadOptions& options) {
  DatasetManifest manifest =
      parse_manifest(detail::read_text_file(path), path.parent_path());
  if (!options.check_image_headers) return manifest;
  for (const auto& e : manifest.entries) {
    const fs::path image = manifest.image_path(e);
    std::error_code ec;
    if (!fs::exists(image, ec)) {
      if (options.require_images) {
        throw IoError("image file not found: " + image.string());
      }
      continue;
    }
    std::string ext = image.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (ext != ".png") continue;
    const ImageSize size = read_png_size(image);
    if (size.width != e.width || size.height != e.height) {
      throw ValidationError("image '" + e.image_id + "': manifest declares " +
                            std::to_string(e.width) + "x" +
                            std::to_string(e.height) + " but " + image.string() +
                            " is " + std::to_string(size.width) + "x" +
                            std::to_string(size.height));
    }
  }
  return manifest;
}

std::string manifest_to_json(const DatasetManifest& manifest,
                             const fs::path& target_dir) {
  json entries = json::array();
  for (const auto& e : manifest.entries) {
    json anns = json::array();
    for (const auto& a : e.annotations) {
      json poly = json::array();
      for (const auto& p : a.polygon().vertices()) poly.push_back({p.x, p.y});
      anns.push_back({{"label", to_string(a.label())}, {"polygon", std::move(poly)}});
    }
    std::string file_path = e.file_path;
    if (!fs::path(file_path).is_absolute() && !manifest.base_dir.empty()) {
      // Re-anchor relative paths at the directory the manifest is written to.
      const fs::path abs_image =
          fs::absolute(manifest.base_dir / file_path).lexically_normal();
      const fs::path abs_target = fs::absolute(target_dir).lexically_normal();
      const fs::path rel = abs_image.lexically_relative(abs_target);
      file_path = rel.empty() ? abs_image.generic_string() : rel.generic_string();
    }
    json entry = {{"image_id", e.image_id},
                  {"file_path", file_path},
                  {"width", e.width},
                  {"height", e.height},
                  {"split", to_string(e.split)},
                  {"annotations", std::move(anns)}};
    if (e.provenance) entry["provenance"] = provenance_to_json(*e.provenance);
    entries.push_back(std::move(entry));
  }
  const json root = {{"version", 1}, {"entries", std::move(entries)}};
  return root.dump(2) + "\n";
}

void write_manifest(const DatasetManifest& manifest, const fs::path& path) {
  validate_manifest(manifest);
  fs::path dir = path.parent_path();
  if (dir.empty()) dir = ".";
  detail::write_text_file(path, manifest_to_json(manifest, dir));
}

DatasetManifest import_polygon_annotations(const fs::path& dir,
                                           Split default_split) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    throw IoError("not a directory: " + dir.string());
  }
  // (relative json path, split), sorted for a stable entry order.
  std::vector<std::pair<fs::path, Split>> files;
  auto collect = [&](const fs::path& sub, Split split) {
    const fs::path root = dir / sub;
    if (!fs::is_directory(root, ec)) return;
    for (const auto& item : fs::directory_iterator(root)) {
      if (item.is_regular_file() && item.path().extension() == ".json") {
        files.emplace_back(sub / item.path().filename(), split);
      }
    }
  };
  collect("", default_split);
  collect("train", Split::kTrain);
  collect("test", Split::kTest);
  std::sort(files.begin(), files.end());

  DatasetManifest manifest;
  manifest.base_dir = dir;
  std::vector<std::string> unknown;
  for (const auto& [rel, split] : files) {
    const std::string where = rel.generic_string();
    const json root = detail::parse_json(detail::read_text_file(dir / rel), where);
    if (!root.is_object()) throw FormatError(where + ": expected an object");
    if (!root.contains("imageWidth") || !root.contains("imageHeight")) {
      throw FormatError(where + ": missing image dimensions (imageWidth/imageHeight)");
    }
    ManifestEntry e;
    e.image_id = rel.stem().string();
    e.split = split;
    e.width = static_cast<std::uint32_t>(
        detail::as_uint(root["imageWidth"], where + ".imageWidth", 1u << 30));
    e.height = static_cast<std::uint32_t>(
        detail::as_uint(root["imageHeight"], where + ".imageHeight", 1u << 30));
    if (e.width == 0 || e.height == 0) {
      throw FormatError(where + ": zero image dimensions");
    }
    fs::path image_rel = rel.parent_path() / (rel.stem().string() + ".png");
    if (auto it = root.find("imagePath"); it != root.end() && it->is_string()) {
      image_rel = rel.parent_path() / fs::path(it->get<std::string>()).filename();
    }
    e.file_path = image_rel.generic_string();

    const json& shapes = detail::get_array(root, "shapes", where);
    for (std::size_t k = 0; k < shapes.size(); ++k) {
      const std::string at = where + ".shapes[" + std::to_string(k) + "]";
      const std::string label_text = detail::get_string(shapes[k], "label", at);
      const auto label = parse_label(label_text);
      if (!label) {
        unknown.push_back("'" + label_text + "' (" + at + ")");
        continue;
      }
      try {
        e.annotations.emplace_back(
            e.image_id, *label,
            parse_points(detail::require(shapes[k], "points", at), at + ".points"),
            e.width, e.height);
      } catch (const DegenerateGeometry& err) {
        throw ValidationError(at + ": " + err.what());
      }
    }
    manifest.entries.push_back(std::move(e));
  }
  if (!unknown.empty()) {
    std::string msg = "unknown label(s): ";
    for (std::size_t i = 0; i < unknown.size(); ++i) {
      if (i) msg += ", ";
      msg += unknown[i];
    }
    throw ValidationError(msg);
  }
  validate_manifest(manifest);
  return manifest;
}

CompositionStats dataset_stats(const DatasetManifest& manifest) {
  if (manifest.entries.empty()) throw EmptyDataset("manifest has no images");
  CompositionStats s;
  std::size_t truss_only = 0, runner_only = 0, both = 0, empty = 0;
  for (const auto& e : manifest.entries) {
    ++s.n_total;
    (e.split == Split::kTrain ? s.n_train : s.n_test)++;
    bool truss = false, runner = false;
    for (const auto& a : e.annotations) {
      (a.label() == ClassLabel::kTruss ? truss : runner) = true;
    }
    if (truss && runner) {
      ++both;
    } else if (truss) {
      ++truss_only;
    } else if (runner) {
      ++runner_only;
    } else {
      ++empty;
    }
  }
  const double n = static_cast<double>(s.n_total);
  s.frac_truss_only = truss_only / n;
  s.frac_runner_only = runner_only / n;
  s.frac_both = both / n;
  s.frac_empty = empty / n;
  return s;
}

}  // namespace agrieval
