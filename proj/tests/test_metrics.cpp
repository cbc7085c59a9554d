#include <gtest/gtest.h>

#include <random>

#include "keyedge/error.hpp"
#include "keyedge/metrics.hpp"
#include "support.hpp"

using namespace keyedge;
using keyedge::test::deg;

namespace {

DetectionRecord det(Box2D b, double conf, double depth, double gamma = 0.0) {
  return DetectionRecord{b, conf, depth, gamma, ""};
}

GroundTruthRecord gt(Box2D b, double depth, double gamma = 0.0) {
  return GroundTruthRecord{b, depth, gamma, ""};
}

// Three cars, four detections: a duplicate on the first car and a miss.
struct Fixture {
  std::vector<GroundTruthRecord> gts{
      gt({100, 100, 200, 180}, 10.0, deg(-20.0)),
      gt({300, 120, 360, 170}, 20.0, deg(5.0)),
      gt({500, 140, 540, 170}, 40.0, deg(15.0)),
  };
  std::vector<DetectionRecord> dets{
      det({102, 101, 201, 181}, 0.9, 11.0, deg(-20.0)),   // TP, err 0.1
      det({301, 121, 361, 171}, 0.8, 19.0, deg(5.0)),     // TP, err 0.05
      det({101, 100, 200, 179}, 0.7, 10.5, deg(-20.0)),   // duplicate, FP
      det({700, 100, 760, 150}, 0.6, 30.0, deg(25.0)),    // no GT, FP
  };
};

}  // namespace

TEST(Metrics, Iou) {
  const Box2D a{0, 0, 1, 1};
  EXPECT_DOUBLE_EQ(iou_2d(a, a), 1.0);
  EXPECT_DOUBLE_EQ(iou_2d(a, {2, 2, 3, 3}), 0.0);
  EXPECT_DOUBLE_EQ(iou_2d(a, {0.5, 0, 1.5, 1}), 1.0 / 3.0);
}

TEST(Metrics, GreedyMatching) {
  const Fixture f;
  const auto m = match_detections(f.dets, f.gts, 0.7);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[0].detection, 0u);
  EXPECT_TRUE(m[0].true_positive);
  EXPECT_TRUE(m[1].true_positive);
  EXPECT_FALSE(m[2].true_positive);  // same car, lower confidence
  EXPECT_FALSE(m[3].true_positive);

  const std::vector<GroundTruthRecord> one{gt({0, 0, 10, 10}, 10)};
  const std::vector<DetectionRecord> half{det({0, 0, 10, 5}, 1.0, 10)};
  EXPECT_FALSE(match_detections(half, one, 0.7)[0].true_positive);
  EXPECT_TRUE(match_detections(half, one, 0.5)[0].true_positive);
  EXPECT_THROW(match_detections(half, one, 0.0), Error);
}

TEST(Metrics, MatchingStaysInsideFrame) {
  std::vector<GroundTruthRecord> g{gt({0, 0, 10, 10}, 10)};
  std::vector<DetectionRecord> d{det({0, 0, 10, 10}, 1.0, 10)};
  g[0].frame = "000001";
  d[0].frame = "000002";
  EXPECT_FALSE(match_detections(d, g, 0.7)[0].true_positive);
}

TEST(Metrics, FixtureMatchesOracle) {
  const Fixture f;
  // Hand sweep: recall 1/3 at 0.9 (s=0.1), 2/3 at 0.8 (s=0.075). Envelope is
  // 0.1 for k=1..13, 0.075 for k=14..26 and 0 past the 2/3 ceiling.
  const double expected = (13 * 0.1 + 13 * 0.075) / 40.0;
  EXPECT_NEAR(arde(f.dets, f.gts, 0.7), expected, 1e-14);
  EXPECT_NEAR(test::brute_force_arde(f.dets, f.gts, 0.7), expected, 1e-14);
  const ArdeResult r = arde_detailed(f.dets, f.gts, 0.7);
  EXPECT_EQ(r.true_positives, 2u);
  EXPECT_NEAR(r.max_recall, 2.0 / 3.0, 1e-15);
  EXPECT_FALSE(r.score[26].has_value());
  EXPECT_NEAR(*r.score[20], 0.075, 1e-15);
}

TEST(Metrics, PerfectAndSingleDetection) {
  const std::vector<GroundTruthRecord> one{gt({0, 0, 10, 10}, 10)};
  EXPECT_DOUBLE_EQ(arde(std::vector<DetectionRecord>{det({0, 0, 10, 10}, 1, 10)}, one, 0.7), 0.0);
  EXPECT_NEAR(arde(std::vector<DetectionRecord>{det({0, 0, 10, 10}, 1, 11)}, one, 0.7), 0.1,
              1e-15);
  EXPECT_DOUBLE_EQ(arde(std::vector<DetectionRecord>{}, one, 0.7), 0.0);
  EXPECT_THROW(arde(std::vector<DetectionRecord>{}, std::vector<GroundTruthRecord>{}, 0.7), Error);
}

TEST(Metrics, RandomSetsMatchBruteForce) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const test::DetectionSet s = test::random_detection_set(rng);
    std::vector<double> oracle_env;
    const double oracle = test::brute_force_arde(s.dets, s.gts, 0.5, &oracle_env);
    const ArdeResult r = arde_detailed(s.dets, s.gts, 0.5);
    EXPECT_NEAR(r.value, oracle, 1e-12);
    for (int k = 0; k < kRecallPoints; ++k) {
      EXPECT_NEAR(r.envelope[k], oracle_env[k], 1e-12);
      if (k > 0) EXPECT_LE(r.envelope[k], r.envelope[k - 1]);
    }
  }
}

TEST(Metrics, ConfidenceRescalingInvariant) {
  std::mt19937_64 rng(23);
  for (int i = 0; i < 50; ++i) {
    test::DetectionSet s = test::random_detection_set(rng);
    const double before = arde(s.dets, s.gts, 0.5);
    for (auto& d : s.dets) d.confidence = std::exp(3.0 * d.confidence) - 7.0;
    EXPECT_DOUBLE_EQ(arde(s.dets, s.gts, 0.5), before);
  }
}

TEST(Metrics, BinsAgreeWithGlobalAndSubsets) {
  const Fixture f;
  const std::vector<double> wide{deg(-90), deg(90)};
  const auto one = arde_by_viewing_angle(f.dets, f.gts, 0.7, wide);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_DOUBLE_EQ(*one[0].arde, arde(f.dets, f.gts, 0.7));

  const std::vector<double> edges{deg(-30), deg(0), deg(10), deg(20), deg(30)};
  const auto bins = arde_by_viewing_angle(f.dets, f.gts, 0.7, edges);
  ASSERT_EQ(bins.size(), 4u);
  // Bin [-30, 0): first car and both of its detections.
  EXPECT_EQ(bins[0].ground_truth_count, 1u);
  EXPECT_EQ(bins[0].detection_count, 2u);
  EXPECT_NEAR(*bins[0].arde, 0.1, 1e-15);
  EXPECT_NEAR(*bins[1].arde, 0.05, 1e-15);
  EXPECT_DOUBLE_EQ(*bins[2].arde, 0.0);  // one gt, no detections
  EXPECT_FALSE(bins[3].arde.has_value());
  EXPECT_EQ(bins[3].detection_count, 1u);  // unmatched, placed by its own angle

  EXPECT_THROW(arde_by_viewing_angle(f.dets, f.gts, 0.7, std::vector<double>{0.0}), Error);
  EXPECT_THROW(arde_by_viewing_angle(f.dets, f.gts, 0.7, std::vector<double>{1.0, 0.0}), Error);
}

TEST(Metrics, IdenticalBinsGiveIdenticalValues) {
  Fixture f;
  // Mirror every record into a second, disjoint angle range.
  const std::size_t n_gt = f.gts.size(), n_det = f.dets.size();
  for (std::size_t i = 0; i < n_gt; ++i) {
    auto g = f.gts[i];
    g.viewing_angle += deg(100);
    g.frame = "mirror";
    f.gts.push_back(g);
  }
  for (std::size_t i = 0; i < n_det; ++i) {
    auto d = f.dets[i];
    *d.viewing_angle += deg(100);
    d.frame = "mirror";
    f.dets.push_back(d);
  }
  const std::vector<double> edges{deg(-90), deg(60), deg(210)};
  const auto bins = arde_by_viewing_angle(f.dets, f.gts, 0.7, edges);
  EXPECT_DOUBLE_EQ(*bins[0].arde, *bins[1].arde);
}

TEST(Metrics, PerBinOracleOnSyntheticSweep) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<GroundTruthRecord> gts;
  std::vector<DetectionRecord> dets;
  for (int i = 0; i < 200; ++i) {
    const double depth = 5.0 + 55.0 * unit(rng);
    const double gamma = deg(-30.0 + 50.0 * unit(rng));
    const Box2D b{40.0 * i, 100, 40.0 * i + 30, 130};
    gts.push_back(gt(b, depth, gamma));
    if (unit(rng) < 0.8) {
      dets.push_back(det(b, unit(rng), depth * (1 + 0.004 * depth * (unit(rng) - 0.5)), gamma));
    }
  }
  std::vector<double> edges;
  for (int e = -30; e <= 20; e += 10) edges.push_back(deg(e));
  const auto bins = arde_by_viewing_angle(dets, gts, 0.7, edges);
  for (const AngleBin& bin : bins) {
    std::vector<GroundTruthRecord> bg;
    std::vector<DetectionRecord> bd;
    for (const auto& g : gts) {
      if (g.viewing_angle >= bin.lower && g.viewing_angle < bin.upper) bg.push_back(g);
    }
    for (const auto& d : dets) {
      if (*d.viewing_angle >= bin.lower && *d.viewing_angle < bin.upper) bd.push_back(d);
    }
    ASSERT_FALSE(bg.empty());
    EXPECT_NEAR(*bin.arde, test::brute_force_arde(bd, bg, 0.7), 1e-12);
  }
}
