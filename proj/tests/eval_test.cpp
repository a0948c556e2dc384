#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "agrieval/eval.hpp"
#include "fixtures.hpp"

namespace agrieval {
namespace {

using enum ClassLabel;
using testing::rect_polygon;

InstanceAnnotation gt(const std::string& image, ClassLabel label, double x0,
                      double y0, double x1, double y1, std::uint32_t size = 100) {
  return InstanceAnnotation(image, label, rect_polygon(x0, y0, x1, y1), size, size);
}

Detection det(const std::string& image, ClassLabel label, double conf, double x0,
              double y0, double x1, double y1) {
  return Detection(image, label, conf, BBox(x0, y0, x1, y1));
}

ManifestEntry entry(const std::string& id, Split split,
                    std::vector<InstanceAnnotation> anns) {
  ManifestEntry e;
  e.image_id = id;
  e.file_path = id + ".png";
  e.width = 100;
  e.height = 100;
  e.split = split;
  e.annotations = std::move(anns);
  return e;
}

TEST(RatioTest, RecallExamples) {
  EXPECT_DOUBLE_EQ(recall(95, 5), 0.95);
  EXPECT_DOUBLE_EQ(recall(53, 47), 0.53);
  EXPECT_EQ(recall(0, 0), 0.0);
}

TEST(RatioTest, PrecisionExamples) {
  EXPECT_DOUBLE_EQ(precision(91, 9), 0.91);
  EXPECT_DOUBLE_EQ(precision(83, 17), 0.83);
  EXPECT_EQ(precision(0, 0), 0.0);
}

TEST(RatioTest, F1Examples) {
  EXPECT_NEAR(f1(0.91, 0.95), 0.9296, 5e-5);
  EXPECT_NEAR(f1(0.83, 0.53), 0.6469, 5e-5);
  EXPECT_EQ(f1(0.0, 0.0), 0.0);
}

TEST(RatioTest, F1IsAtMostTheArithmeticMean) {
  for (int i = 0; i <= 100; ++i) {
    for (int j = 0; j <= 100; ++j) {
      const double pr = i / 100.0, re = j / 100.0;
      const double v = f1(pr, re);
      EXPECT_LE(v, (pr + re) / 2 + 1e-15);
      if (pr > 0 && re > 0) {
        EXPECT_GE(v, std::min(pr, re) - 1e-15);
        EXPECT_LE(v, std::max(pr, re) + 1e-15);
      }
    }
  }
}

TEST(MatchTest, SinglePair) {
  // IoU = 0.8: 80 / 100 with the detection inside the ground truth.
  const std::vector<InstanceAnnotation> gts = {gt("a", kTruss, 0, 0, 10, 10)};
  const std::vector<Detection> dets = {det("a", kTruss, 0.5, 0, 0, 10, 8)};
  const MatchResult r = match_detections(dets, gts, {});
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_NEAR(r.pairs[0].iou, 0.8, 1e-12);
  EXPECT_TRUE(r.unmatched_detections.empty());
  EXPECT_TRUE(r.unmatched_gt.empty());
}

TEST(MatchTest, HigherConfidenceWins) {
  const std::vector<InstanceAnnotation> gts = {gt("a", kTruss, 0, 0, 10, 10)};
  const std::vector<Detection> dets = {det("a", kTruss, 0.8, 0, 0, 10, 10),
                                       det("a", kTruss, 0.9, 0, 0, 10, 9)};
  const MatchResult r = match_detections(dets, gts, {});
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].detection, 1u);
  EXPECT_EQ(r.unmatched_detections, std::vector<std::size_t>{0});
}

TEST(MatchTest, ConfidenceTieGoesToLowerIndex) {
  const std::vector<InstanceAnnotation> gts = {gt("a", kTruss, 0, 0, 10, 10)};
  const std::vector<Detection> dets = {det("a", kTruss, 0.7, 0, 0, 10, 9),
                                       det("a", kTruss, 0.7, 0, 0, 10, 10)};
  const MatchResult r = match_detections(dets, gts, {});
  ASSERT_EQ(r.pairs.size(), 1u);
  EXPECT_EQ(r.pairs[0].detection, 0u);
}

TEST(MatchTest, MaskIouWithoutMaskThrows) {
  const std::vector<InstanceAnnotation> gts = {gt("a", kTruss, 0, 0, 10, 10)};
  const std::vector<Detection> dets = {det("a", kTruss, 0.5, 0, 0, 10, 10)};
  EXPECT_THROW(match_detections(dets, gts, {0.5, IouKind::kMask}), MissingMask);
}

TEST(MatchTest, MaskIouUsesMasks) {
  const InstanceAnnotation g = gt("a", kTruss, 0, 0, 10, 10, 20);
  const std::vector<InstanceAnnotation> gts = {g};
  // Same box, but the mask covers only half the ground truth.
  const BinaryMask half = polygon_to_mask(rect_polygon(0, 0, 10, 5), 20, 20);
  const std::vector<Detection> dets = {
      Detection("a", kTruss, 0.5, BBox(0, 0, 10, 10), half)};
  EXPECT_EQ(match_detections(dets, gts, {0.5, IouKind::kBox}).pairs.size(), 1u);
  const MatchResult r = match_detections(dets, gts, {0.6, IouKind::kMask});
  EXPECT_TRUE(r.pairs.empty());
  EXPECT_NEAR(overlap(dets[0], g, IouKind::kMask), 0.5, 1e-12);
}

TEST(MatchTest, InvalidThreshold) {
  EXPECT_THROW(validate(MatchConfig{0.0, IouKind::kBox}), InvalidParameter);
  EXPECT_THROW(validate(MatchConfig{1.5, IouKind::kBox}), InvalidParameter);
  EXPECT_NO_THROW(validate(MatchConfig{1.0, IouKind::kBox}));
}

// Random boxes on a coarse integer grid so overlaps and exact ties are common.
testing::Box random_box(std::mt19937_64& rng, int size) {
  std::uniform_int_distribution<int> pos(0, size - 2);
  std::uniform_int_distribution<int> ext(1, size / 2);
  const int x = pos(rng), y = pos(rng);
  return {double(x), double(y), double(std::min(size, x + ext(rng))),
          double(std::min(size, y + ext(rng)))};
}

TEST(MatchPropertyTest, InvariantsAgainstBruteForce) {
  std::mt19937_64 rng(1234);
  std::uniform_int_distribution<int> count(0, 5);
  std::uniform_real_distribution<double> conf(0, 1);
  const double thresholds[] = {0.1, 0.3, 0.5, 0.7};
  int equal_cases = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const int nd = count(rng), ng = count(rng);
    std::vector<Detection> dets;
    std::vector<InstanceAnnotation> gts;
    for (int i = 0; i < ng; ++i) {
      const auto b = random_box(rng, 12);
      gts.push_back(gt("a", kTruss, b.x0, b.y0, b.x1, b.y1, 12));
    }
    for (int i = 0; i < nd; ++i) {
      const auto b = random_box(rng, 12);
      dets.push_back(det("a", kTruss, conf(rng), b.x0, b.y0, b.x1, b.y1));
    }
    const double thr = thresholds[trial % 4];
    const MatchResult r = match_detections(dets, gts, {thr, IouKind::kBox});

    std::vector<int> det_seen(nd, 0), gt_seen(ng, 0);
    for (const auto& p : r.pairs) {
      ++det_seen[p.detection];
      ++gt_seen[p.ground_truth];
      ASSERT_GE(p.iou, thr);
      ASSERT_DOUBLE_EQ(p.iou, iou_bbox(dets[p.detection].bbox(), gts[p.ground_truth].bbox()));
    }
    for (auto d : r.unmatched_detections) ++det_seen[d];
    for (auto g : r.unmatched_gt) ++gt_seen[g];
    for (int v : det_seen) ASSERT_EQ(v, 1);
    for (int v : gt_seen) ASSERT_EQ(v, 1);

    std::vector<std::vector<double>> iou(nd, std::vector<double>(ng));
    bool contention = false;
    for (int d = 0; d < nd; ++d) {
      int above = 0;
      for (int g = 0; g < ng; ++g) {
        iou[d][g] = iou_bbox(dets[d].bbox(), gts[g].bbox());
        above += iou[d][g] >= thr;
      }
      contention |= above > 1;
    }
    for (int g = 0; g < ng; ++g) {
      int above = 0;
      for (int d = 0; d < nd; ++d) above += iou[d][g] >= thr;
      contention |= above > 1;
    }
    const int best = testing::max_matching(iou, thr);
    ASSERT_LE(static_cast<int>(r.pairs.size()), best);
    if (!contention) {
      ASSERT_EQ(static_cast<int>(r.pairs.size()), best);
      ++equal_cases;
    }
  }
  EXPECT_GT(equal_cases, 100);
}

TEST(ApTest, PerfectAndEmpty) {
  const std::vector<InstanceAnnotation> gts = {gt("a", kTruss, 0, 0, 10, 10)};
  const std::vector<Detection> one = {det("a", kTruss, 0.9, 0, 0, 10, 10)};
  EXPECT_DOUBLE_EQ(average_precision(one, gts, kTruss, {}), 1.0);
  EXPECT_EQ(average_precision({}, gts, kTruss, {}), 0.0);
  EXPECT_EQ(average_precision(one, gts, kRunner, {}), 0.0);
}

TEST(ApTest, HandWorkedStaircase) {
  const std::vector<InstanceAnnotation> gts = {gt("a", kTruss, 0, 0, 10, 10),
                                               gt("a", kTruss, 50, 50, 60, 60)};
  const std::vector<Detection> dets = {det("a", kTruss, 0.9, 0, 0, 10, 10),
                                       det("a", kTruss, 0.8, 80, 80, 90, 90),
                                       det("a", kTruss, 0.7, 50, 50, 60, 60)};
  EXPECT_NEAR(average_precision(dets, gts, kTruss, {}), 1.0 * 0.5 + 2.0 / 3.0 * 0.5,
              1e-12);
  EXPECT_NEAR(average_precision(dets, gts, kTruss, {}), 0.8333, 1e-4);
}

TEST(ApTest, MatchesBruteForceStaircase) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> n_det(0, 6), n_gt(0, 5), image(0, 2);
  std::uniform_real_distribution<double> conf(0, 1);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<testing::OracleDet> odets;
    std::vector<testing::OracleGt> ogts;
    std::vector<Detection> dets;
    std::vector<InstanceAnnotation> gts;
    const int ng = n_gt(rng), nd = n_det(rng);
    for (int i = 0; i < ng; ++i) {
      const int im = image(rng);
      const auto b = random_box(rng, 12);
      ogts.push_back({im, b});
      gts.push_back(gt(std::to_string(im), kTruss, b.x0, b.y0, b.x1, b.y1, 12));
    }
    for (int i = 0; i < nd; ++i) {
      const int im = image(rng);
      const auto b = random_box(rng, 12);
      const double c = conf(rng);
      odets.push_back({im, c, b});
      dets.push_back(det(std::to_string(im), kTruss, c, b.x0, b.y0, b.x1, b.y1));
    }
    // Runner items must not leak into the truss AP.
    dets.push_back(det("0", kRunner, 0.99, 0, 0, 12, 12));
    const double thr = trial % 2 ? 0.5 : 0.25;
    ASSERT_NEAR(average_precision(dets, gts, kTruss, {thr, IouKind::kBox}),
                testing::brute_force_ap(odets, ogts, thr), 1e-12)
        << "trial " << trial;
  }
}

TEST(MapTest, Examples) {
  const std::vector<InstanceAnnotation> truss_only = {gt("a", kTruss, 0, 0, 10, 10)};
  const std::vector<Detection> hit = {det("a", kTruss, 0.9, 0, 0, 10, 10)};
  EXPECT_DOUBLE_EQ(mean_average_precision(hit, truss_only, {}), 1.0);
  EXPECT_THROW(mean_average_precision(hit, {}, {}), EmptyGroundTruth);

  // AP(truss) = 0.8333 (hand staircase), AP(runner) = 0.5 (one of two found).
  const std::vector<InstanceAnnotation> gts = {
      gt("a", kTruss, 0, 0, 10, 10), gt("a", kTruss, 50, 50, 60, 60),
      gt("b", kRunner, 0, 0, 10, 10), gt("b", kRunner, 50, 50, 60, 60)};
  const std::vector<Detection> dets = {
      det("a", kTruss, 0.9, 0, 0, 10, 10), det("a", kTruss, 0.8, 80, 80, 90, 90),
      det("a", kTruss, 0.7, 50, 50, 60, 60), det("b", kRunner, 0.6, 0, 0, 10, 10)};
  EXPECT_NEAR(mean_average_precision(dets, gts, {}), (5.0 / 6.0 + 0.5) / 2, 1e-12);
}

TEST(ConfusionTest, Examples) {
  const std::vector<InstanceAnnotation> gts = {gt("a", kRunner, 0, 0, 10, 10)};
  const std::vector<Detection> wrong = {det("a", kTruss, 0.9, 0, 0, 10, 9)};
  const ConfusionMap c = cross_class_confusion(wrong, gts, {});
  ASSERT_EQ(c.size(), 1u);
  EXPECT_EQ(c.at({kRunner, kTruss}), 1u);

  const std::vector<Detection> right = {det("a", kRunner, 0.9, 0, 0, 10, 9)};
  EXPECT_TRUE(cross_class_confusion(right, gts, {}).empty());
}

TEST(ConfusionTest, MixedFixtureHandCount) {
  const std::vector<InstanceAnnotation> gts = {
      gt("a", kRunner, 0, 0, 10, 10),   gt("a", kTruss, 20, 20, 30, 30),
      gt("a", kRunner, 40, 40, 50, 50), gt("b", kTruss, 0, 0, 10, 10),
      gt("b", kTruss, 60, 60, 70, 70)};
  const std::vector<Detection> dets = {
      det("a", kTruss, 0.9, 0, 0, 10, 10),    // runner seen as truss
      det("a", kTruss, 0.8, 20, 20, 30, 30),  // correct
      det("a", kRunner, 0.7, 20, 20, 30, 30), // over a matched truss
      det("a", kRunner, 0.6, 40, 40, 50, 50), // correct
      det("b", kRunner, 0.5, 0, 0, 10, 10),   // truss seen as runner
      det("b", kRunner, 0.4, 0, 0, 10, 10),   // duplicate: gt already claimed
      det("b", kRunner, 0.3, 60, 60, 70, 70), // truss seen as runner
  };
  // The truss gt at (20,20) is matched intra-class, so the runner detection on
  // it is not a confusion.
  const ConfusionMap c = cross_class_confusion(dets, gts, {});
  EXPECT_EQ(c.size(), 2u);
  EXPECT_EQ(c.at({kRunner, kTruss}), 1u);
  EXPECT_EQ(c.at({kTruss, kRunner}), 2u);
}

DatasetManifest four_image_manifest() {
  DatasetManifest m;
  m.entries = {
      entry("A", Split::kTest,
            {gt("A", kTruss, 10, 10, 30, 30), gt("A", kRunner, 50, 50, 70, 70)}),
      entry("B", Split::kTest, {gt("B", kTruss, 10, 10, 30, 30)}),
      entry("C", Split::kTest, {gt("C", kRunner, 20, 20, 40, 60)}),
      entry("D", Split::kTest,
            {gt("D", kTruss, 60, 10, 80, 40), gt("D", kTruss, 10, 60, 30, 90)}),
      entry("T", Split::kTrain, {gt("T", kTruss, 10, 10, 30, 30)}),
  };
  return m;
}

std::vector<Detection> four_image_predictions() {
  return {
      det("A", kTruss, 0.9, 10, 10, 30, 30),   // TP
      det("A", kRunner, 0.8, 50, 50, 70, 70),  // TP
      det("A", kTruss, 0.3, 50, 50, 70, 70),   // FP, runner gt already matched
      det("B", kTruss, 0.7, 12, 10, 30, 30),   // TP at IoU 0.9
      det("B", kTruss, 0.6, 12, 10, 30, 30),   // FP duplicate
      det("C", kTruss, 0.85, 20, 20, 40, 60),  // FP, confused runner
      det("D", kTruss, 0.5, 60, 10, 80, 40),   // TP
      det("D", kRunner, 0.4, 85, 85, 95, 95),  // FP
      det("T", kRunner, 0.99, 0, 0, 5, 5),     // train image, ignored
  };
}

TEST(EvaluateTest, FourImageFixture) {
  const MetricsReport r =
      evaluate(four_image_manifest(), four_image_predictions(), {});
  EXPECT_EQ(r.n_images, 4u);
  const ClassMetrics& t = r.per_class.at(kTruss);
  EXPECT_EQ(t.tp, 3u);
  EXPECT_EQ(t.fp, 3u);
  EXPECT_EQ(t.fn, 1u);
  EXPECT_DOUBLE_EQ(t.precision, 0.5);
  EXPECT_DOUBLE_EQ(t.recall, 0.75);
  EXPECT_DOUBLE_EQ(t.f1, 0.6);
  // Sweep: .9 TP, .85 FP, .7 TP, .6 FP, .5 TP, .3 FP over 4 gts.
  // Envelope: r=.25 p=1, r=.5 p=2/3, r=.75 p=3/5.
  EXPECT_NEAR(t.ap, 0.25 * 1 + 0.25 * (2.0 / 3) + 0.25 * 0.6, 1e-12);
  EXPECT_NEAR(t.ap, 17.0 / 30, 1e-12);
  const ClassMetrics& ru = r.per_class.at(kRunner);
  EXPECT_EQ(ru.tp, 1u);
  EXPECT_EQ(ru.fp, 1u);
  EXPECT_EQ(ru.fn, 1u);
  EXPECT_DOUBLE_EQ(ru.precision, 0.5);
  EXPECT_DOUBLE_EQ(ru.recall, 0.5);
  EXPECT_DOUBLE_EQ(ru.f1, 0.5);
  EXPECT_DOUBLE_EQ(ru.ap, 0.5);
  EXPECT_NEAR(r.map, (17.0 / 30 + 0.5) / 2, 1e-12);
  ASSERT_EQ(r.confusion.size(), 1u);
  EXPECT_EQ(r.confusion.at({kRunner, kTruss}), 1u);
}

TEST(EvaluateTest, ZeroPredictions) {
  const MetricsReport r = evaluate(four_image_manifest(), {}, {});
  for (auto label : kAllLabels) {
    const ClassMetrics& c = r.per_class.at(label);
    EXPECT_EQ(c.precision, 0.0);
    EXPECT_EQ(c.recall, 0.0);
    EXPECT_EQ(c.f1, 0.0);
    EXPECT_EQ(c.tp, 0u);
  }
  EXPECT_EQ(r.per_class.at(kTruss).fn, 4u);
  EXPECT_TRUE(r.confusion.empty());
}

TEST(EvaluateTest, OracleDetectorScoresOne) {
  const DatasetManifest m = four_image_manifest();
  std::vector<Detection> preds;
  for (const auto& e : m.entries) {
    for (const auto& a : e.annotations) {
      preds.emplace_back(a.image_id(), a.label(), 1.0, a.bbox(), a.mask());
    }
  }
  for (IouKind kind : {IouKind::kBox, IouKind::kMask}) {
    const MetricsReport r = evaluate(m, preds, {0.5, kind});
    for (auto label : kAllLabels) {
      const ClassMetrics& c = r.per_class.at(label);
      EXPECT_EQ(c.precision, 1.0);
      EXPECT_EQ(c.recall, 1.0);
      EXPECT_EQ(c.f1, 1.0);
      EXPECT_EQ(c.ap, 1.0);
    }
    EXPECT_EQ(r.map, 1.0);
  }
}

TEST(EvaluateTest, UnknownImageIsRejected) {
  const std::vector<Detection> preds = {det("nope", kTruss, 0.5, 0, 0, 5, 5)};
  EXPECT_THROW(evaluate(four_image_manifest(), preds, {}), ValidationError);
}

TEST(EvaluateTest, MaskSizeMismatchIsRejected) {
  const std::vector<Detection> preds = {
      Detection("A", kTruss, 0.5, BBox(0, 0, 5, 5), BinaryMask(10, 10, {100}))};
  EXPECT_THROW(evaluate(four_image_manifest(), preds, {}), ValidationError);
}

TEST(EvaluateTest, NoGroundTruthGivesZeroMap) {
  DatasetManifest m;
  m.entries = {entry("E", Split::kTest, {})};
  const std::vector<Detection> preds = {det("E", kTruss, 0.5, 0, 0, 5, 5)};
  const MetricsReport r = evaluate(m, preds, {});
  EXPECT_EQ(r.map, 0.0);
  EXPECT_EQ(r.per_class.at(kTruss).fp, 1u);
}

struct RandomCase {
  DatasetManifest manifest;
  std::vector<Detection> preds;
};

RandomCase random_case(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_img(1, 3), n_obj(0, 4), pick(0, 1);
  // Coarse confidences so ties are frequent.
  std::uniform_int_distribution<int> conf(0, 4);
  RandomCase c;
  const int images = n_img(rng);
  for (int i = 0; i < images; ++i) {
    const std::string id = "im" + std::to_string(i);
    ManifestEntry e;
    e.image_id = id;
    e.file_path = id + ".png";
    e.width = e.height = 12;
    e.split = Split::kTest;
    for (int k = n_obj(rng); k > 0; --k) {
      const auto b = random_box(rng, 12);
      e.annotations.push_back(
          gt(id, pick(rng) ? kTruss : kRunner, b.x0, b.y0, b.x1, b.y1, 12));
    }
    for (int k = n_obj(rng) + 1; k > 0; --k) {
      const auto b = random_box(rng, 12);
      c.preds.push_back(det(id, pick(rng) ? kTruss : kRunner, conf(rng) / 4.0,
                            b.x0, b.y0, b.x1, b.y1));
    }
    c.manifest.entries.push_back(std::move(e));
  }
  return c;
}

TEST(EvaluatePropertyTest, PermutationInvariance) {
  std::mt19937_64 rng(555);
  for (int trial = 0; trial < 1000; ++trial) {
    RandomCase c = random_case(rng);
    const MetricsReport base = evaluate(c.manifest, c.preds, {});
    for (int s = 0; s < 3; ++s) {
      std::shuffle(c.preds.begin(), c.preds.end(), rng);
      ASSERT_EQ(evaluate(c.manifest, c.preds, {}), base) << "trial " << trial;
    }
  }
}

TEST(EvaluatePropertyTest, Monotonicity) {
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> conf(0, 1);
  int recall_checks = 0, precision_checks = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    RandomCase c = random_case(rng);
    const MetricsReport base = evaluate(c.manifest, c.preds, {});

    // A detection exactly on some ground truth left unmatched.
    std::vector<std::pair<ClassLabel, const InstanceAnnotation*>> candidates;
    for (const auto& e : c.manifest.entries) {
      for (const auto& a : e.annotations) {
        std::vector<Detection> same;
        for (const auto& d : c.preds) {
          if (d.image_id() == a.image_id() && d.label() == a.label()) same.push_back(d);
        }
        std::vector<InstanceAnnotation> gts;
        for (const auto& b : e.annotations) {
          if (b.label() == a.label()) gts.push_back(b);
        }
        const MatchResult r = match_detections(same, gts, {});
        for (auto g : r.unmatched_gt) {
          if (gts[g] == a) candidates.emplace_back(a.label(), &a);
        }
      }
    }
    if (!candidates.empty()) {
      const auto& [label, a] = candidates[trial % candidates.size()];
      auto more = c.preds;
      more.emplace_back(a->image_id(), label, conf(rng), a->bbox());
      const MetricsReport after = evaluate(c.manifest, more, {});
      ASSERT_GE(after.per_class.at(label).recall, base.per_class.at(label).recall);
      ASSERT_EQ(after.per_class.at(label).tp, base.per_class.at(label).tp + 1);
      ++recall_checks;
    }

    // A detection far outside every box cannot match anything.
    const ClassLabel label = trial % 2 ? kTruss : kRunner;
    auto more = c.preds;
    more.emplace_back("im0", label, conf(rng), BBox(200, 200, 210, 210));
    const MetricsReport after = evaluate(c.manifest, more, {});
    ASSERT_LE(after.per_class.at(label).precision, base.per_class.at(label).precision);
    ASSERT_EQ(after.per_class.at(label).fp, base.per_class.at(label).fp + 1);
    ++precision_checks;
  }
  EXPECT_GT(recall_checks, 300);
  EXPECT_EQ(precision_checks, 1000);
}

TEST(EvaluatePropertyTest, MetricsStayInUnitInterval) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const RandomCase c = random_case(rng);
    const MetricsReport r = evaluate(c.manifest, c.preds, {0.3, IouKind::kBox});
    for (const auto& [label, m] : r.per_class) {
      for (double v : {m.precision, m.recall, m.f1, m.ap}) {
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, 1.0);
      }
      ASSERT_LE(m.f1, (m.precision + m.recall) / 2 + 1e-15);
    }
    ASSERT_GE(r.map, 0.0);
    ASSERT_LE(r.map, 1.0);
  }
}

TEST(PredictionsIoTest, RoundTrip) {
  std::vector<Detection> dets = four_image_predictions();
  dets.emplace_back("A", kRunner, 0.25, BBox(1, 2, 3, 4),
                    polygon_to_mask(rect_polygon(1, 2, 3, 4), 100, 100));
  EXPECT_EQ(parse_predictions(predictions_to_json(dets)), dets);
}

TEST(PredictionsIoTest, Errors) {
  EXPECT_THROW(parse_predictions(R"({"version": 1, "predictions": [{"image_id": "a",
    "label": "truss", "confidence": 0.5, "bbox": [0, 0, 1]}]})"),
               FormatError);
  EXPECT_THROW(parse_predictions(R"({"version": 1, "predictions": [{"image_id": "a",
    "label": "leaf", "confidence": 0.5, "bbox": [0, 0, 1, 1]}]})"),
               ValidationError);
  EXPECT_THROW(parse_predictions(R"({"version": 1, "predictions": [{"image_id": "a",
    "label": "truss", "confidence": 1.5, "bbox": [0, 0, 1, 1]}]})"),
               ValidationError);
  EXPECT_THROW(parse_predictions(R"({"version": 1, "predictions": [{"image_id": "a",
    "label": "truss", "confidence": 0.5, "bbox": [0, 0, 1, 1], "mask_rle": [1]}]})"),
               FormatError);
  EXPECT_THROW(parse_predictions(R"({"version": 1, "predictions": [{"image_id": "a",
    "label": "truss", "confidence": 0.5, "bbox": [0, 0, 1, 1], "mask_rle": [3],
    "mask_size": [2, 2]}]})"),
               ValidationError);
}

TEST(ReportTest, TableAndJson) {
  const MetricsReport r =
      evaluate(four_image_manifest(), four_image_predictions(), {});
  const std::string table = report_to_table(r);
  EXPECT_NE(table.find("Precision"), std::string::npos);
  EXPECT_NE(table.find("F1"), std::string::npos);
  EXPECT_LT(table.find("Precision"), table.find("Recall"));
  EXPECT_NE(table.find("truss"), std::string::npos);
  const std::string json = report_to_json(r);
  EXPECT_NE(json.find("\"map\""), std::string::npos);
  EXPECT_NE(json.find("\"confusion\""), std::string::npos);
}

}  // namespace
}  // namespace agrieval
