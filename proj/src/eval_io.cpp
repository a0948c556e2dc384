#include <cstdio>

#include "agrieval/eval.hpp"
#include "json_util.hpp"

namespace agrieval {

using detail::json;

namespace {

Detection parse_prediction(const json& j, std::size_t index) {
  const std::string where = "predictions[" + std::to_string(index) + "]";
  const std::string image_id = detail::get_string(j, "image_id", where);
  const std::string label_text = detail::get_string(j, "label", where);
  const auto label = parse_label(label_text);
  if (!label || label_text != to_string(*label)) {
    throw ValidationError(where + ": unknown label '" + label_text +
                          "' (expected 'truss' or 'runner')");
  }
  const double confidence =
      detail::as_number(detail::require(j, "confidence", where), where + ".confidence");

  const json& box = detail::get_array(j, "bbox", where);
  if (box.size() != 4) throw FormatError(where + ".bbox: expected 4 numbers");
  double c[4];
  for (int k = 0; k < 4; ++k) c[k] = detail::as_number(box[k], where + ".bbox");

  std::optional<BinaryMask> mask;
  const bool has_rle = j.contains("mask_rle") && !j["mask_rle"].is_null();
  const bool has_size = j.contains("mask_size") && !j["mask_size"].is_null();
  if (has_rle != has_size) {
    throw FormatError(where + ": mask_rle and mask_size must be given together");
  }
  try {
    if (has_rle) {
      const json& size = detail::get_array(j, "mask_size", where);
      if (size.size() != 2) throw FormatError(where + ".mask_size: expected [w, h]");
      const auto w = detail::as_uint(size[0], where + ".mask_size", 1u << 30);
      const auto h = detail::as_uint(size[1], where + ".mask_size", 1u << 30);
      const json& rle = detail::get_array(j, "mask_rle", where);
      std::vector<std::uint32_t> runs;
      runs.reserve(rle.size());
      for (const auto& r : rle) {
        runs.push_back(static_cast<std::uint32_t>(
            detail::as_uint(r, where + ".mask_rle", 0xffffffffu)));
      }
      mask.emplace(static_cast<std::uint32_t>(w), static_cast<std::uint32_t>(h),
                   std::move(runs));
    }
    return Detection(image_id, *label, confidence, BBox(c[0], c[1], c[2], c[3]),
                     std::move(mask));
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(where + " (image '" + image_id + "'): " + e.what());
  }
}

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

}  // namespace

std::vector<Detection> parse_predictions(std::string_view json_text) {
  const json root = detail::parse_json(json_text, "predictions");
  detail::check_version(root, "predictions");
  const json& items = detail::get_array(root, "predictions", "predictions");
  std::vector<Detection> dets;
  dets.reserve(items.size());
  for (std::size_t i = 0; i < items.size(); ++i) {
    dets.push_back(parse_prediction(items[i], i));
  }
  return dets;
}

std::vector<Detection> load_predictions(const std::filesystem::path& path) {
  return parse_predictions(detail::read_text_file(path));
}

std::string predictions_to_json(std::span<const Detection> dets) {
  json items = json::array();
  for (const auto& d : dets) {
    json item = {{"image_id", d.image_id()},
                 {"label", to_string(d.label())},
                 {"confidence", d.confidence()},
                 {"bbox",
                  {d.bbox().x_min(), d.bbox().y_min(), d.bbox().x_max(),
                   d.bbox().y_max()}}};
    if (d.mask()) {
      item["mask_rle"] = d.mask()->runs();
      item["mask_size"] = {d.mask()->width(), d.mask()->height()};
    }
    items.push_back(std::move(item));
  }
  return json{{"version", 1}, {"predictions", std::move(items)}}.dump(2) + "\n";
}

void write_predictions(std::span<const Detection> dets,
                       const std::filesystem::path& path) {
  detail::write_text_file(path, predictions_to_json(dets));
}

std::string report_to_json(const MetricsReport& report) {
  json per_class = json::object();
  for (const auto& [label, m] : report.per_class) {
    per_class[std::string(to_string(label))] = {
        {"tp", m.tp},       {"fp", m.fp},         {"fn", m.fn},
        {"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1},
        {"ap", m.ap}};
  }
  json confusion = json::array();
  for (const auto& [key, count] : report.confusion) {
    confusion.push_back({{"ground_truth", to_string(key.first)},
                         {"predicted", to_string(key.second)},
                         {"count", count}});
  }
  const json root = {{"version", 1},
                     {"iou_threshold", report.iou_threshold},
                     {"iou_kind", to_string(report.iou_kind)},
                     {"n_images", report.n_images},
                     {"per_class", std::move(per_class)},
                     {"map", report.map},
                     {"confusion", std::move(confusion)}};
  return root.dump(2) + "\n";
}

std::string report_to_table(const MetricsReport& report) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof(line), "%-8s %10s %8s %9s %6s %6s %6s %8s\n",
                "Class", "Precision", "Recall", "F1 score", "TP", "FP", "FN",
                "AP");
  out += line;
  for (const auto& [label, m] : report.per_class) {
    std::snprintf(line, sizeof(line), "%-8s %10s %8s %9s %6zu %6zu %6zu %8s\n",
                  std::string(to_string(label)).c_str(),
                  fixed(m.precision).c_str(), fixed(m.recall).c_str(),
                  fixed(m.f1).c_str(), m.tp, m.fp, m.fn, fixed(m.ap).c_str());
    out += line;
  }
  out += "mAP@" + fixed(report.iou_threshold, 2) + " (" +
         std::string(to_string(report.iou_kind)) + "): " + fixed(report.map) +
         " over " + std::to_string(report.n_images) + " test image(s)\n";
  for (const auto& [key, count] : report.confusion) {
    out += "confused: " + std::string(to_string(key.first)) + " predicted as " +
           std::string(to_string(key.second)) + ": " + std::to_string(count) +
           "\n";
  }
  return out;
}

}  // namespace agrieval
