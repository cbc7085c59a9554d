#pragma once

// Batch operations behind the command-line subcommands.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "keyedge/metrics.hpp"
#include "keyedge/records.hpp"
#include "keyedge/scene.hpp"

namespace keyedge {

// KITTI object camera P2 focal length, used when no calibration is supplied.
inline constexpr double kKittiFocal = 721.5377;

struct SynthOptions {
  SceneConfig scene;
  CameraIntrinsics intrinsics{kKittiFocal, 609.5593, 172.854, std::nullopt};
  NoiseModel noise;
  std::uint64_t noise_seed = 0;
};

// Ratio records for a synthetic scene; heights carry the configured noise and
// ratio sigmas follow from it (all zero without noise).
std::vector<RatioRecord> synthesize(const SynthOptions& options);

struct LabelgenOptions {
  bool skip_flagged = false;
};

struct LabelgenResult {
  std::vector<RatioRecord> records;
  std::vector<std::string> skipped;  // one message per object left out
};

// `labels` and `calib` are either single files or directories of
// <frame>.txt files; a single calib file applies to every label file.
LabelgenResult labelgen(const std::filesystem::path& labels, const std::filesystem::path& calib,
                        const LabelgenOptions& options);

std::vector<SolveRecord> solve_records(std::span<const RatioRecord> records);

struct ArdeReport {
  double iou_min = kDefaultIouMin;
  std::size_t detections = 0;
  std::size_t ground_truth = 0;
  ArdeResult global;
  std::vector<AngleBin> bins;
};

ArdeReport evaluate_arde(std::span<const DetectionRecord> detections,
                         std::span<const GroundTruthRecord> ground_truth, double iou_min,
                         std::span<const double> bin_edges);

void write_arde_report_json(std::ostream& out, const ArdeReport& report);

struct SensitivityConfig {
  NoiseKind noise_kind = NoiseKind::GaussianHeight;
  std::vector<double> noise_levels{0.0, 0.5, 1.0};     // pixels
  std::vector<double> depth_edges{5.0, 20.0, 40.0, 60.0};
  std::vector<double> gamma_edges;                     // radians; defaults to -30..20 deg in 10 deg steps
  std::size_t trials_per_cell = 1000;
  Range length{3.5, 4.8};
  Range width{1.5, 1.95};
  Range height{1.4, 1.8};
  CameraIntrinsics intrinsics{kKittiFocal, 609.5593, 172.854, std::nullopt};
  std::uint64_t seed = 0;
  unsigned threads = 0;  // 0: hardware concurrency; never changes the output

  void validate() const;
};

SensitivityConfig default_sensitivity_config();

struct SensitivityRow {
  double noise_level = 0.0;
  Range depth;
  Range gamma;
  std::size_t trials = 0;
  std::size_t failures = 0;  // trials where every tuple was rejected
  double mean_rel_depth_error = 0.0;
  double median_rel_depth_error = 0.0;
  double mean_abs_yaw_error = 0.0;
  double median_abs_yaw_error = 0.0;
};

// Rows ordered by noise level, then depth band, then gamma bin.
std::vector<SensitivityRow> run_sensitivity(const SensitivityConfig& config);

void write_sensitivity_csv(std::ostream& out, NoiseKind kind,
                           std::span<const SensitivityRow> rows);

const char* to_string(NoiseKind kind);
NoiseKind noise_kind_from_string(const std::string& name);

}  // namespace keyedge
