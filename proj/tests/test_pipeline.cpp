#include <gtest/gtest.h>

#include <sstream>

#include "keyedge/error.hpp"
#include "keyedge/pipeline.hpp"
#include "support.hpp"

using namespace keyedge;
using keyedge::test::deg;

namespace {
const std::string kData = KEYEDGE_TEST_DATA;
}

TEST(Pipeline, SynthThenSolveIsExact) {
  SynthOptions o;
  o.scene.count = 300;
  o.scene.seed = 12;
  const auto records = synthesize(o);
  const auto solved = solve_records(records);
  ASSERT_EQ(solved.size(), records.size());
  for (std::size_t i = 0; i < solved.size(); ++i) {
    EXPECT_EQ(solved[i].id, records[i].id);
    EXPECT_LT(test::rel_err(solved[i].result.fused.depth, records[i].d_obj), 1e-9);
    EXPECT_LT(test::angle_err(solved[i].result.fused.theta, records[i].angles.egocentric), 1e-9);
  }
}

TEST(Pipeline, NoisySynthCarriesSigma) {
  SynthOptions o;
  o.scene.count = 20;
  o.scene.seed = 3;
  o.noise = {NoiseKind::GaussianHeight, 0.5};
  o.noise_seed = 9;
  const auto a = synthesize(o);
  const auto b = synthesize(o);
  ASSERT_TRUE(a[0].ratio_sigma.has_value());
  EXPECT_GT((*a[0].ratio_sigma)[0], 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].heights, b[i].heights);
}

TEST(Pipeline, LabelgenDirectory) {
  const LabelgenResult r = labelgen(kData + "/kitti/label_2", kData + "/kitti/calib", {});
  EXPECT_EQ(r.records.size(), 9u);  // 11 rows minus 2 DontCare
  EXPECT_EQ(r.records.front().id, "000000:0");
  EXPECT_EQ(r.records.back().frame, "000001");
  const LabelgenResult f = labelgen(kData + "/kitti/label_2", kData + "/kitti/calib", {true});
  EXPECT_EQ(f.records.size(), 8u);
  EXPECT_EQ(f.skipped.size(), 1u);

  const LabelgenResult single = labelgen(kData + "/kitti/label_2/000000.txt",
                                         kData + "/kitti/calib/000000.txt", {});
  EXPECT_EQ(single.records.size(), 4u);
  for (const auto& s : solve_records(single.records)) {
    const auto& rec = *std::find_if(single.records.begin(), single.records.end(),
                                    [&](const RatioRecord& x) { return x.id == s.id; });
    EXPECT_LT(test::rel_err(s.result.fused.depth, rec.d_obj), 1e-9);
  }
}

TEST(Pipeline, ArdeReportJson) {
  std::vector<GroundTruthRecord> gts{{{0, 0, 10, 10}, 10.0, deg(-5), ""}};
  std::vector<DetectionRecord> dets{{{0, 0, 10, 10}, 0.9, 11.0, std::nullopt, ""}};
  const std::vector<double> edges{deg(-10), deg(0), deg(10)};
  const ArdeReport report = evaluate_arde(dets, gts, 0.7, edges);
  EXPECT_NEAR(report.global.value, 0.1, 1e-15);
  ASSERT_EQ(report.bins.size(), 2u);
  EXPECT_FALSE(report.bins[1].arde.has_value());
  std::ostringstream out;
  write_arde_report_json(out, report);
  EXPECT_NE(out.str().find("\"arde\""), std::string::npos);
}

TEST(Pipeline, SensitivityNoiseFreeIsExact) {
  SensitivityConfig cfg = default_sensitivity_config();
  cfg.noise_kind = NoiseKind::None;
  cfg.noise_levels = {0.0};
  cfg.trials_per_cell = 100;
  cfg.seed = 5;
  for (const SensitivityRow& row : run_sensitivity(cfg)) {
    EXPECT_EQ(row.failures, 0u);
    EXPECT_LE(row.mean_rel_depth_error, 1e-9);
    EXPECT_LE(row.mean_abs_yaw_error, 1e-9);
  }
}

TEST(Pipeline, SensitivityThreadCountDoesNotChangeBytes) {
  SensitivityConfig cfg = default_sensitivity_config();
  cfg.noise_levels = {0.5};
  cfg.trials_per_cell = 200;
  cfg.seed = 8;
  std::string outputs[3];
  const unsigned threads[3] = {1, 3, 8};
  for (int i = 0; i < 3; ++i) {
    cfg.threads = threads[i];
    std::ostringstream out;
    write_sensitivity_csv(out, cfg.noise_kind, run_sensitivity(cfg));
    outputs[i] = out.str();
  }
  EXPECT_EQ(outputs[0], outputs[1]);
  EXPECT_EQ(outputs[0], outputs[2]);
  EXPECT_EQ(outputs[0].rfind("noise_kind,noise_px,depth_min", 0), 0u);
}

TEST(Pipeline, SensitivityConfigErrors) {
  SensitivityConfig cfg = default_sensitivity_config();
  cfg.depth_edges = {5.0};
  EXPECT_THROW(run_sensitivity(cfg), Error);
  cfg = default_sensitivity_config();
  cfg.trials_per_cell = 0;
  EXPECT_THROW(run_sensitivity(cfg), Error);
  EXPECT_THROW(noise_kind_from_string("salt"), Error);
}
