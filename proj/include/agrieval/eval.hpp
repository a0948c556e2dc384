#pragma once

// Detection-vs-ground-truth matching and the metrics built on it.
//
// Matching is greedy: detections are visited by descending confidence (ties
// by ascending index) and each claims the unmatched ground truth with the
// highest overlap, provided that overlap reaches the threshold. Precision,
// recall and F1 are micro-averaged: counts are summed over every test image
// before the ratios are taken. AP is the all-point interpolated area under
// the precision/recall staircase at a single IoU threshold.

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agrieval/core.hpp"
#include "agrieval/dataset.hpp"

namespace agrieval {

enum class IouKind { kBox, kMask };

std::string_view to_string(IouKind kind);
std::optional<IouKind> parse_iou_kind(std::string_view text);

struct MatchConfig {
  double iou_threshold = 0.5;
  IouKind iou_kind = IouKind::kBox;
};

// Throws InvalidParameter unless 0 < iou_threshold <= 1.
void validate(const MatchConfig& cfg);

struct MatchPair {
  std::size_t detection = 0;
  std::size_t ground_truth = 0;
  double iou = 0.0;
  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

struct MatchResult {
  std::vector<MatchPair> pairs;  // in matching order
  std::vector<std::size_t> unmatched_detections;
  std::vector<std::size_t> unmatched_gt;
};

// Overlap under cfg.iou_kind. Throws MissingMask if a mask IoU is requested
// for a detection without a mask.
double overlap(const Detection& det, const InstanceAnnotation& gt,
               IouKind kind);

/// Greedy one-to-one matching of detections to ground truth on one image for
/// one class; indices refer to the input spans.
MatchResult match_detections(std::span<const Detection> dets,
                             std::span<const InstanceAnnotation> gts,
                             const MatchConfig& cfg);

// Zero when the denominator is zero.
double recall(std::size_t tp, std::size_t fn);
double precision(std::size_t tp, std::size_t fp);
double f1(double pr, double re);

/// All-point interpolated AP for one class across many images. Returns 0 when
/// the class has no ground truth.
double average_precision(std::span<const Detection> dets,
                         std::span<const InstanceAnnotation> gts,
                         ClassLabel label, const MatchConfig& cfg);

// Unweighted mean of AP over the classes present in gts; throws
// EmptyGroundTruth when gts is empty.
double mean_average_precision(std::span<const Detection> dets,
                              std::span<const InstanceAnnotation> gts,
                              const MatchConfig& cfg);

// Keyed by (ground-truth label, predicted label).
using ConfusionMap = std::map<std::pair<ClassLabel, ClassLabel>, std::size_t>;

/// Counts detections that miss every ground truth of their own class but
/// overlap (>= threshold) a still-unmatched ground truth of the other class.
/// Never alters the intra-class tp/fp/fn.
ConfusionMap cross_class_confusion(std::span<const Detection> dets,
                                   std::span<const InstanceAnnotation> gts,
                                   const MatchConfig& cfg);

struct ClassMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double ap = 0.0;
  friend bool operator==(const ClassMetrics&, const ClassMetrics&) = default;
};

struct MetricsReport {
  std::map<ClassLabel, ClassMetrics> per_class;  // always holds both labels
  double map = 0.0;  // 0 when the evaluated images hold no ground truth
  ConfusionMap confusion;
  std::size_t n_images = 0;  // test-split images evaluated
  double iou_threshold = 0.5;
  IouKind iou_kind = IouKind::kBox;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Evaluates predictions against the test split of `manifest`. Predictions on
/// train images are ignored; predictions naming an unknown image, or carrying
/// a mask whose size differs from its image, raise ValidationError.
MetricsReport evaluate(const DatasetManifest& manifest,
                       std::span<const Detection> predictions,
                       const MatchConfig& cfg);

// Predictions file: {"version": 1, "predictions": [{image_id, label,
// confidence, bbox: [x_min, y_min, x_max, y_max], mask_rle?, mask_size?}]}.
std::vector<Detection> parse_predictions(std::string_view json_text);
std::vector<Detection> load_predictions(const std::filesystem::path& path);
std::string predictions_to_json(std::span<const Detection> dets);
void write_predictions(std::span<const Detection> dets,
                       const std::filesystem::path& path);

std::string report_to_json(const MetricsReport& report);
// Plain-text table: one row per class with Precision, Recall, F1 columns,
// followed by counts, AP and mAP.
std::string report_to_table(const MetricsReport& report);

}  // namespace agrieval
