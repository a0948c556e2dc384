#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "agrieval/core.hpp"

namespace agrieval {

enum class Split { kTrain, kTest };

std::string_view to_string(Split split);
std::optional<Split> parse_split(std::string_view text);

/// Where an augmented image came from and how it was produced.
struct Provenance {
  std::string source_image_id;
  std::string kind;            // gaussian | speckle | poisson | saltpepper
  std::string parameter_name;  // sigma | severity | peak | amount
  double parameter = 0.0;
  std::uint64_t seed = 0;        // global seed given by the caller
  std::uint64_t image_seed = 0;  // per-image seed actually used
  std::string rng;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

struct ManifestEntry {
  std::string image_id;
  std::string file_path;  // relative paths resolve against the manifest dir
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  Split split = Split::kTest;
  std::vector<InstanceAnnotation> annotations;
  std::optional<Provenance> provenance;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::filesystem::path base_dir;

  const ManifestEntry* find(std::string_view image_id) const;
  std::filesystem::path image_path(const ManifestEntry& entry) const;

  // Compares entries only; base_dir is where the manifest happens to live.
  friend bool operator==(const DatasetManifest& a, const DatasetManifest& b) {
    return a.entries == b.entries;
  }
};

struct CompositionStats {
  std::size_t n_total = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  double frac_truss_only = 0.0;
  double frac_runner_only = 0.0;
  double frac_both = 0.0;
  double frac_empty = 0.0;
};

// Image id with every character outside [A-Za-z0-9._-] replaced by '_', for
// naming output files.
std::string safe_file_stem(std::string_view image_id);

// Checks id uniqueness and annotation ownership; throws ValidationError.
void validate_manifest(const DatasetManifest& manifest);

struct LoadOptions {
  // Compare declared width/height against the PNG header of every image file
  // that exists on disk.
  bool check_image_headers = true;
  // Treat a missing image file as an IoError instead of skipping the check.
  bool require_images = false;
};

DatasetManifest load_manifest(const std::filesystem::path& path,
                              const LoadOptions& options = {});
DatasetManifest parse_manifest(std::string_view json_text,
                               const std::filesystem::path& base_dir = {});
// file_path values are rewritten relative to the directory of `path`.
void write_manifest(const DatasetManifest& manifest,
                    const std::filesystem::path& path);
std::string manifest_to_json(const DatasetManifest& manifest,
                             const std::filesystem::path& target_dir);

/// Converts a directory of per-image polygon JSON files ({imageWidth,
/// imageHeight, shapes: [{label, points}]}) into a manifest. Files directly in
/// `dir` get `default_split`; files under `dir/train` and `dir/test` get
/// the split named by their subdirectory.
DatasetManifest import_polygon_annotations(const std::filesystem::path& dir,
                                           Split default_split = Split::kTest);

// Throws EmptyDataset for a manifest without entries.
CompositionStats dataset_stats(const DatasetManifest& manifest);

}  // namespace agrieval
