// agrieval: batch command-line front end.
//
//   agrieval import  <in_dir> <out_manifest> [--split train|test]
//   agrieval augment <manifest> <out_dir> --noise K [--param P] [--seed S]
//   agrieval stats   <manifest>
//   agrieval eval    <manifest> <predictions> [--iou T] [--iou-kind box|mask]
//                    [--report out.json]
//   agrieval render  <manifest-or-predictions> <image_dir> <out_dir>
//
// Exit codes: 0 success, 1 validation/format error, 2 I/O error,
// 3 invalid parameters. Diagnostics go to stderr; with --json, stdout carries
// a single JSON document and nothing else.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "agrieval/augment.hpp"
#include "agrieval/dataset.hpp"
#include "agrieval/eval.hpp"
#include "agrieval/render.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kIo = 2,
  kParameter = 3,
};

int exit_code_for(agrieval::ErrorCategory category) {
  switch (category) {
    case agrieval::ErrorCategory::kValidation: return kValidation;
    case agrieval::ErrorCategory::kIo: return kIo;
    case agrieval::ErrorCategory::kParameter: return kParameter;
  }
  return kValidation;
}

unsigned worker_threads() {
  const char* env = std::getenv("AGRIEVAL_THREADS");
  if (!env || !*env) return 0;
  char* end = nullptr;
  const long n = std::strtol(env, &end, 10);
  if (*end != '\0' || n < 1) {
    throw agrieval::InvalidParameter(std::string("AGRIEVAL_THREADS must be a positive integer, got '") +
                                     env + "'");
  }
  return static_cast<unsigned>(n);
}

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::map<agrieval::ClassLabel, std::size_t> instance_counts(
    const agrieval::DatasetManifest& m) {
  std::map<agrieval::ClassLabel, std::size_t> counts{{agrieval::ClassLabel::kTruss, 0},
                                                     {agrieval::ClassLabel::kRunner, 0}};
  for (const auto& e : m.entries) {
    for (const auto& a : e.annotations) ++counts[a.label()];
  }
  return counts;
}

int cmd_import(const fs::path& in_dir, const fs::path& out_manifest,
               const std::string& split_text, bool as_json) {
  const auto split = agrieval::parse_split(split_text);
  if (!split) throw agrieval::InvalidParameter("--split must be 'train' or 'test'");
  const auto manifest = agrieval::import_polygon_annotations(in_dir, *split);
  if (manifest.entries.empty()) {
    std::cerr << "warning: no annotation files found in " << in_dir.string()
              << "; writing an empty manifest\n";
  }
  agrieval::write_manifest(manifest, out_manifest);
  const auto counts = instance_counts(manifest);
  if (as_json) {
    json out = {{"images", manifest.entries.size()}, {"instances", json::object()}};
    for (const auto& [label, n] : counts) out["instances"][std::string(to_string(label))] = n;
    std::cout << out.dump() << "\n";
  } else {
    std::cout << "imported " << manifest.entries.size() << " image(s)\n";
    for (const auto& [label, n] : counts) {
      std::cout << "  " << to_string(label) << ": " << n << " instance(s)\n";
    }
  }
  return kOk;
}

int cmd_augment(const fs::path& manifest_path, const fs::path& out_dir,
                const std::string& noise, std::optional<double> param,
                std::uint64_t seed, bool as_json) {
  const auto spec = agrieval::make_noise_spec(noise, param, seed);
  const auto manifest = agrieval::load_manifest(manifest_path);
  const auto augmented =
      agrieval::augment_dataset(manifest, spec, out_dir, worker_threads());
  const fs::path out_manifest = out_dir / "manifest.json";
  agrieval::write_manifest(augmented, out_manifest);
  if (as_json) {
    std::cout << json{{"images", augmented.entries.size()},
                      {"manifest", out_manifest.string()},
                      {"kind", agrieval::noise_name(spec.kind)},
                      {std::string(agrieval::noise_parameter_name(spec.kind)),
                       agrieval::noise_parameter(spec.kind)},
                      {"seed", spec.seed}}
                     .dump()
              << "\n";
  } else {
    std::cout << "augmented " << augmented.entries.size() << " image(s) with "
              << agrieval::noise_name(spec.kind) << " ("
              << agrieval::noise_parameter_name(spec.kind) << "="
              << agrieval::noise_parameter(spec.kind) << ", seed=" << spec.seed
              << ") -> " << out_manifest.string() << "\n";
  }
  return kOk;
}

int cmd_stats(const fs::path& manifest_path, bool as_json) {
  const auto manifest = agrieval::load_manifest(manifest_path);
  const auto s = agrieval::dataset_stats(manifest);
  if (as_json) {
    std::cout << json{{"n_total", s.n_total},
                      {"n_train", s.n_train},
                      {"n_test", s.n_test},
                      {"frac_truss_only", s.frac_truss_only},
                      {"frac_runner_only", s.frac_runner_only},
                      {"frac_both", s.frac_both},
                      {"frac_empty", s.frac_empty}}
                     .dump()
              << "\n";
  } else {
    std::cout << "images        " << s.n_total << " (train " << s.n_train
              << ", test " << s.n_test << ")\n"
              << "truss only    " << fixed(s.frac_truss_only) << "\n"
              << "runner only   " << fixed(s.frac_runner_only) << "\n"
              << "both          " << fixed(s.frac_both) << "\n"
              << "no instances  " << fixed(s.frac_empty) << "\n";
  }
  return kOk;
}

int cmd_eval(const fs::path& manifest_path, const fs::path& predictions_path,
             double iou, const std::string& iou_kind, const std::string& report,
             bool as_json) {
  const auto kind = agrieval::parse_iou_kind(iou_kind);
  if (!kind) throw agrieval::InvalidParameter("--iou-kind must be 'box' or 'mask'");
  const agrieval::MatchConfig cfg{iou, *kind};
  agrieval::validate(cfg);
  const auto manifest =
      agrieval::load_manifest(manifest_path, {.check_image_headers = false});
  const auto predictions = agrieval::load_predictions(predictions_path);
  const auto result = agrieval::evaluate(manifest, predictions, cfg);
  if (result.n_images == 0) {
    std::cerr << "warning: manifest has no test-split images; nothing evaluated\n";
  }
  const std::string report_json = agrieval::report_to_json(result);
  const std::string table = agrieval::report_to_table(result);
  if (!report.empty()) {
    const fs::path json_path(report);
    fs::path table_path = json_path;
    table_path.replace_extension(".txt");
    if (table_path == json_path) table_path += ".txt";
    for (const auto& [path, text] : {std::pair{json_path, report_json},
                                     std::pair{table_path, table}}) {
      std::FILE* f = std::fopen(path.c_str(), "wb");
      if (!f) throw agrieval::IoError("cannot open " + path.string() + " for writing");
      const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
      if (std::fclose(f) != 0 || !ok) throw agrieval::IoError("cannot write " + path.string());
    }
  }
  if (as_json) {
    std::cout << report_json;
  } else {
    std::cout << table;
  }
  return kOk;
}

int cmd_render(const fs::path& input, const fs::path& image_dir,
               const fs::path& out_dir, const agrieval::OverlayStyle& style,
               bool as_json) {
  std::ifstream in(input, std::ios::binary);
  if (!in) throw agrieval::IoError("cannot open " + input.string());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  json probe;
  try {
    probe = json::parse(text);
  } catch (const json::parse_error& e) {
    throw agrieval::FormatError(input.string() + ": " + e.what());
  }
  std::size_t written = 0;
  if (probe.is_object() && probe.contains("entries")) {
    const auto manifest = agrieval::parse_manifest(text, input.parent_path());
    written = agrieval::render_ground_truth(manifest, image_dir, out_dir, style,
                                            worker_threads());
  } else if (probe.is_object() && probe.contains("predictions")) {
    const auto dets = agrieval::parse_predictions(text);
    written = agrieval::render_predictions(dets, image_dir, out_dir, style,
                                           worker_threads());
  } else {
    throw agrieval::FormatError(input.string() +
                                ": neither a manifest nor a predictions file");
  }
  if (as_json) {
    std::cout << json{{"images", written}, {"out_dir", out_dir.string()}}.dump() << "\n";
  } else {
    std::cout << "rendered " << written << " image(s) into " << out_dir.string() << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Noise augmentation and detection evaluation for truss/runner annotations"};
  app.require_subcommand(1);
  bool as_json = false;
  app.add_flag("--json", as_json, "Print one machine-readable JSON document on stdout");

  std::string in_dir, out_path, split = "test";
  auto* import = app.add_subcommand("import", "Convert per-image polygon JSON files into a manifest");
  import->add_option("in_dir", in_dir, "Directory of per-image annotation files")->required();
  import->add_option("out_manifest", out_path, "Manifest file to write")->required();
  import->add_option("--split", split, "Split for files not under train/ or test/")
      ->check(CLI::IsMember({"train", "test"}));

  std::string manifest_path, out_dir, noise;
  std::optional<double> param;
  std::uint64_t seed = 0;
  auto* augment = app.add_subcommand("augment", "Write a noised copy of every image");
  augment->add_option("manifest", manifest_path, "Input manifest")->required();
  augment->add_option("out_dir", out_dir, "Output directory")->required();
  augment->add_option("--noise", noise, "gaussian | speckle | poisson | saltpepper")
      ->required();
  augment->add_option("--param", param,
                      "sigma / severity / peak / amount (defaults 51, 2, 40, 0.1)");
  augment->add_option("--seed", seed, "Global seed (default 0)");

  auto* stats = app.add_subcommand("stats", "Dataset composition statistics");
  stats->add_option("manifest", manifest_path, "Input manifest")->required();

  std::string predictions_path, iou_kind = "box", report;
  double iou = 0.5;
  auto* eval = app.add_subcommand("eval", "Precision, recall, F1, AP and mAP");
  eval->add_option("manifest", manifest_path, "Ground-truth manifest")->required();
  eval->add_option("predictions", predictions_path, "Predictions JSON")->required();
  eval->add_option("--iou", iou, "IoU threshold in (0, 1]");
  eval->add_option("--iou-kind", iou_kind, "box | mask");
  eval->add_option("--report", report, "Write the report JSON here (table goes next to it as .txt)");

  std::string input, image_dir;
  agrieval::OverlayStyle style;
  bool no_labels = false, no_confidence = false;
  auto* render = app.add_subcommand("render", "Draw labelled boxes onto images");
  render->add_option("input", input, "Manifest (ground truth) or predictions JSON")->required();
  render->add_option("image_dir", image_dir, "Directory holding the source PNGs")->required();
  render->add_option("out_dir", out_dir, "Output directory")->required();
  render->add_option("--thickness", style.thickness, "Border thickness in pixels");
  render->add_flag("--no-labels", no_labels, "Do not draw class labels");
  render->add_flag("--no-confidence", no_confidence, "Do not draw confidences");
  render->add_flag("--tint-masks", style.tint_masks, "Blend class colour over masks");

  for (auto* sub : {import, augment, stats, eval, render}) {
    sub->add_flag("--json", as_json, "Print one machine-readable JSON document on stdout");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kParameter;
  }

  try {
    if (*import) return cmd_import(in_dir, out_path, split, as_json);
    if (*augment) return cmd_augment(manifest_path, out_dir, noise, param, seed, as_json);
    if (*stats) return cmd_stats(manifest_path, as_json);
    if (*eval) {
      return cmd_eval(manifest_path, predictions_path, iou, iou_kind, report, as_json);
    }
    if (*render) {
      style.draw_labels = !no_labels;
      style.draw_confidence = !no_confidence;
      return cmd_render(input, image_dir, out_dir, style, as_json);
    }
  } catch (const agrieval::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.category());
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kValidation;
  }
  return kOk;
}
