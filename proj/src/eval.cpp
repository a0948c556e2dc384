#include "agrieval/eval.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>
#include <unordered_map>

namespace agrieval {

std::string_view to_string(IouKind kind) {
  return kind == IouKind::kBox ? "box" : "mask";
}

std::optional<IouKind> parse_iou_kind(std::string_view text) {
  if (text == "box") return IouKind::kBox;
  if (text == "mask") return IouKind::kMask;
  return std::nullopt;
}

void validate(const MatchConfig& cfg) {
  if (!(cfg.iou_threshold > 0.0 && cfg.iou_threshold <= 1.0)) {
    throw InvalidParameter("IoU threshold must be in (0, 1], got " +
                           std::to_string(cfg.iou_threshold));
  }
}

double overlap(const Detection& det, const InstanceAnnotation& gt,
               IouKind kind) {
  if (kind == IouKind::kBox) return iou_bbox(det.bbox(), gt.bbox());
  if (!det.mask()) {
    throw MissingMask("detection on image '" + det.image_id() +
                      "' has no mask but mask IoU was requested");
  }
  return iou_mask(*det.mask(), gt.mask());
}

namespace {

using DetRefs = std::vector<const Detection*>;
using GtRefs = std::vector<const InstanceAnnotation*>;

// Total order used wherever input order must not leak into results:
// confidence descending, then the remaining fields. Detections that compare
// equal are interchangeable.
bool canonical_less(const Detection& a, const Detection& b) {
  if (a.confidence() != b.confidence()) return a.confidence() > b.confidence();
  const auto key = [](const Detection& d) {
    return std::make_tuple(std::string_view(d.image_id()), d.label(),
                           d.bbox().x_min(), d.bbox().y_min(), d.bbox().x_max(),
                           d.bbox().y_max(), d.mask().has_value());
  };
  if (key(a) != key(b)) return key(a) < key(b);
  if (a.mask() && b.mask()) return a.mask()->runs() < b.mask()->runs();
  return false;
}

DetRefs canonical_refs(std::span<const Detection> dets) {
  DetRefs refs;
  refs.reserve(dets.size());
  for (const auto& d : dets) refs.push_back(&d);
  std::stable_sort(refs.begin(), refs.end(),
                   [](const Detection* a, const Detection* b) {
                     return canonical_less(*a, *b);
                   });
  return refs;
}

GtRefs gt_refs(std::span<const InstanceAnnotation> gts) {
  GtRefs refs;
  refs.reserve(gts.size());
  for (const auto& g : gts) refs.push_back(&g);
  return refs;
}

// Greedy core. `order` lists detection indices in visiting order; returns the
// matched ground-truth index per visited detection (or npos).
constexpr std::size_t npos = static_cast<std::size_t>(-1);

template <typename IouFn>
std::vector<std::pair<std::size_t, double>> greedy(std::size_t n_dets,
                                                   std::size_t n_gts,
                                                   IouFn&& iou,
                                                   double threshold) {
  std::vector<std::pair<std::size_t, double>> result(n_dets, {npos, 0.0});
  std::vector<bool> taken(n_gts, false);
  for (std::size_t d = 0; d < n_dets; ++d) {
    std::size_t best = npos;
    double best_iou = -1.0;
    for (std::size_t g = 0; g < n_gts; ++g) {
      if (taken[g]) continue;
      const double v = iou(d, g);
      if (v >= threshold && v > best_iou) {
        best = g;
        best_iou = v;
      }
    }
    if (best != npos) {
      taken[best] = true;
      result[d] = {best, best_iou};
    }
  }
  return result;
}

struct ClassMatch {
  std::vector<bool> det_tp;  // aligned with the input detection order
  std::size_t tp = 0, fp = 0, fn = 0;
  DetRefs unmatched_dets;
  GtRefs unmatched_gts;
};

// Per-image greedy matching of one class. `dets` must already be in
// canonical order, which makes greedy visiting order equal to input order.
ClassMatch match_class(const DetRefs& dets, const GtRefs& gts,
                       const MatchConfig& cfg) {
  std::unordered_map<std::string_view, std::pair<std::vector<std::size_t>,
                                                  std::vector<std::size_t>>>
      by_image;
  std::vector<std::string_view> image_order;
  auto slot = [&](std::string_view id) -> auto& {
    auto [it, inserted] = by_image.try_emplace(id);
    if (inserted) image_order.push_back(id);
    return it->second;
  };
  for (std::size_t i = 0; i < dets.size(); ++i) slot(dets[i]->image_id()).first.push_back(i);
  for (std::size_t j = 0; j < gts.size(); ++j) slot(gts[j]->image_id()).second.push_back(j);

  ClassMatch out;
  out.det_tp.assign(dets.size(), false);
  std::vector<bool> gt_used(gts.size(), false);
  for (std::string_view id : image_order) {
    const auto& [di, gi] = by_image[id];
    const auto assignment = greedy(
        di.size(), gi.size(),
        [&](std::size_t d, std::size_t g) {
          return overlap(*dets[di[d]], *gts[gi[g]], cfg.iou_kind);
        },
        cfg.iou_threshold);
    for (std::size_t d = 0; d < di.size(); ++d) {
      if (assignment[d].first != npos) {
        out.det_tp[di[d]] = true;
        gt_used[gi[assignment[d].first]] = true;
      }
    }
  }
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (out.det_tp[i]) {
      ++out.tp;
    } else {
      ++out.fp;
      out.unmatched_dets.push_back(dets[i]);
    }
  }
  for (std::size_t j = 0; j < gts.size(); ++j) {
    if (!gt_used[j]) {
      ++out.fn;
      out.unmatched_gts.push_back(gts[j]);
    }
  }
  return out;
}

DetRefs of_label(const DetRefs& dets, ClassLabel label) {
  DetRefs out;
  for (const auto* d : dets) {
    if (d->label() == label) out.push_back(d);
  }
  return out;
}

GtRefs of_label(const GtRefs& gts, ClassLabel label) {
  GtRefs out;
  for (const auto* g : gts) {
    if (g->label() == label) out.push_back(g);
  }
  return out;
}

// AP from an already class-filtered, canonically ordered detection list.
double ap_from_match(const ClassMatch& m, std::size_t n_gt) {
  if (n_gt == 0) return 0.0;
  const std::size_t n = m.det_tp.size();
  std::vector<double> prec(n), rec(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (m.det_tp[i]) ++tp;
    prec[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    rec[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
  }
  // Precision envelope: best precision at any equal-or-higher recall.
  for (std::size_t i = n; i-- > 1;) prec[i - 1] = std::max(prec[i - 1], prec[i]);
  double ap = 0.0, prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (rec[i] - prev_recall) * prec[i];
    prev_recall = rec[i];
  }
  return ap;
}

double average_precision_refs(const DetRefs& dets, const GtRefs& gts,
                              ClassLabel label, const MatchConfig& cfg) {
  const DetRefs d = of_label(dets, label);
  const GtRefs g = of_label(gts, label);
  if (g.empty()) return 0.0;
  return ap_from_match(match_class(d, g, cfg), g.size());
}

ConfusionMap confusion_from_unmatched(DetRefs dets, const GtRefs& gts,
                                      const MatchConfig& cfg) {
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection* a, const Detection* b) {
                     return canonical_less(*a, *b);
                   });
  std::unordered_map<std::string_view, std::vector<std::size_t>> gts_by_image;
  for (std::size_t j = 0; j < gts.size(); ++j) {
    gts_by_image[gts[j]->image_id()].push_back(j);
  }
  ConfusionMap confusion;
  std::vector<bool> used(gts.size(), false);
  for (const Detection* det : dets) {
    auto it = gts_by_image.find(det->image_id());
    if (it == gts_by_image.end()) continue;
    std::size_t best = npos;
    double best_iou = -1.0;
    for (std::size_t j : it->second) {
      if (used[j] || gts[j]->label() == det->label()) continue;
      const double v = overlap(*det, *gts[j], cfg.iou_kind);
      if (v >= cfg.iou_threshold && v > best_iou) {
        best = j;
        best_iou = v;
      }
    }
    if (best != npos) {
      used[best] = true;
      ++confusion[{gts[best]->label(), det->label()}];
    }
  }
  return confusion;
}

}  // namespace

MatchResult match_detections(std::span<const Detection> dets,
                             std::span<const InstanceAnnotation> gts,
                             const MatchConfig& cfg) {
  validate(cfg);
  std::vector<std::size_t> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return dets[a].confidence() > dets[b].confidence();
  });
  const auto assignment = greedy(
      order.size(), gts.size(),
      [&](std::size_t d, std::size_t g) {
        return overlap(dets[order[d]], gts[g], cfg.iou_kind);
      },
      cfg.iou_threshold);

  MatchResult result;
  std::vector<bool> gt_used(gts.size(), false);
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (assignment[k].first != npos) {
      result.pairs.push_back({order[k], assignment[k].first, assignment[k].second});
      gt_used[assignment[k].first] = true;
    } else {
      result.unmatched_detections.push_back(order[k]);
    }
  }
  std::sort(result.unmatched_detections.begin(), result.unmatched_detections.end());
  for (std::size_t g = 0; g < gts.size(); ++g) {
    if (!gt_used[g]) result.unmatched_gt.push_back(g);
  }
  return result;
}

double recall(std::size_t tp, std::size_t fn) {
  if (tp + fn == 0) return 0.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fn);
}

double precision(std::size_t tp, std::size_t fp) {
  if (tp + fp == 0) return 0.0;
  return static_cast<double>(tp) / static_cast<double>(tp + fp);
}

double f1(double pr, double re) {
  if (pr + re == 0.0) return 0.0;
  return 2.0 * pr * re / (pr + re);
}

double average_precision(std::span<const Detection> dets,
                         std::span<const InstanceAnnotation> gts,
                         ClassLabel label, const MatchConfig& cfg) {
  validate(cfg);
  return average_precision_refs(canonical_refs(dets), gt_refs(gts), label, cfg);
}

double mean_average_precision(std::span<const Detection> dets,
                              std::span<const InstanceAnnotation> gts,
                              const MatchConfig& cfg) {
  validate(cfg);
  if (gts.empty()) throw EmptyGroundTruth("no ground-truth instances");
  const DetRefs d = canonical_refs(dets);
  const GtRefs g = gt_refs(gts);
  double sum = 0.0;
  int classes = 0;
  for (ClassLabel label : kAllLabels) {
    if (of_label(g, label).empty()) continue;
    sum += average_precision_refs(d, g, label, cfg);
    ++classes;
  }
  return sum / classes;
}

ConfusionMap cross_class_confusion(std::span<const Detection> dets,
                                   std::span<const InstanceAnnotation> gts,
                                   const MatchConfig& cfg) {
  validate(cfg);
  const DetRefs d = canonical_refs(dets);
  const GtRefs g = gt_refs(gts);
  DetRefs unmatched_dets;
  GtRefs unmatched_gts;
  for (ClassLabel label : kAllLabels) {
    ClassMatch m = match_class(of_label(d, label), of_label(g, label), cfg);
    unmatched_dets.insert(unmatched_dets.end(), m.unmatched_dets.begin(),
                          m.unmatched_dets.end());
    unmatched_gts.insert(unmatched_gts.end(), m.unmatched_gts.begin(),
                         m.unmatched_gts.end());
  }
  return confusion_from_unmatched(std::move(unmatched_dets), unmatched_gts, cfg);
}

MetricsReport evaluate(const DatasetManifest& manifest,
                       std::span<const Detection> predictions,
                       const MatchConfig& cfg) {
  validate(cfg);
  std::unordered_map<std::string_view, const ManifestEntry*> entries;
  for (const auto& e : manifest.entries) entries.emplace(e.image_id, &e);

  DetRefs dets;
  for (const auto& p : predictions) {
    auto it = entries.find(p.image_id());
    if (it == entries.end()) {
      throw ValidationError("prediction references unknown image '" +
                            p.image_id() + "'");
    }
    const ManifestEntry& e = *it->second;
    if (p.mask() && (p.mask()->width() != e.width || p.mask()->height() != e.height)) {
      throw ValidationError("prediction mask for image '" + p.image_id() +
                            "' is " + std::to_string(p.mask()->width()) + "x" +
                            std::to_string(p.mask()->height()) +
                            ", image is " + std::to_string(e.width) + "x" +
                            std::to_string(e.height));
    }
    if (e.split == Split::kTest) dets.push_back(&p);
  }
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Detection* a, const Detection* b) {
                     return canonical_less(*a, *b);
                   });

  MetricsReport report;
  report.iou_threshold = cfg.iou_threshold;
  report.iou_kind = cfg.iou_kind;
  GtRefs gts;
  for (const auto& e : manifest.entries) {
    if (e.split != Split::kTest) continue;
    ++report.n_images;
    for (const auto& a : e.annotations) gts.push_back(&a);
  }

  DetRefs unmatched_dets;
  GtRefs unmatched_gts;
  double ap_sum = 0.0;
  int ap_classes = 0;
  for (ClassLabel label : kAllLabels) {
    const GtRefs class_gts = of_label(gts, label);
    ClassMatch m = match_class(of_label(dets, label), class_gts, cfg);
    ClassMetrics cm;
    cm.tp = m.tp;
    cm.fp = m.fp;
    cm.fn = m.fn;
    cm.precision = precision(m.tp, m.fp);
    cm.recall = recall(m.tp, m.fn);
    cm.f1 = f1(cm.precision, cm.recall);
    cm.ap = ap_from_match(m, class_gts.size());
    if (!class_gts.empty()) {
      ap_sum += cm.ap;
      ++ap_classes;
    }
    report.per_class[label] = cm;
    unmatched_dets.insert(unmatched_dets.end(), m.unmatched_dets.begin(),
                          m.unmatched_dets.end());
    unmatched_gts.insert(unmatched_gts.end(), m.unmatched_gts.begin(),
                         m.unmatched_gts.end());
  }
  report.map = ap_classes > 0 ? ap_sum / ap_classes : 0.0;
  report.confusion =
      confusion_from_unmatched(std::move(unmatched_dets), unmatched_gts, cfg);
  return report;
}

}  // namespace agrieval
