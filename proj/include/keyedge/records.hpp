#pragma once

// On-disk records. JSON-lines: UTF-8, one object per line, LF endings. CSV
// files carry a header row and mirror the JSON field names, with nested
// arrays flattened (bbox -> bbox_left, ...).

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "keyedge/kitti.hpp"
#include "keyedge/metrics.hpp"
#include "keyedge/uncertainty.hpp"

namespace keyedge {

// Ground-truth (or synthetic) keyedge-ratio record.
struct RatioRecord {
  std::string id;
  std::string frame;
  std::string class_name = "Car";
  Dimensions dims;
  Vec3 center;
  AngleTriple angles;
  double d_obj = 0.0;
  std::array<double, 4> heights{};  // h_a..h_d, pixels
  ObjectRatios ratios;
  CameraCentricRatios camera_centric;  // its group is the record's "group"
  std::optional<std::array<double, 4>> ratio_sigma;  // sigma_ab, sigma_bc, sigma_cd, sigma_da
  std::optional<Box2D> bbox;
  std::optional<double> file_alpha;
  double truncated = 0.0;
  int occluded = 0;
  bool flagged = false;
};

RatioRecord make_ratio_record(std::string id, const BoxPose3D& pose,
                              const KeyedgeObservation& observation);
RatioRecord make_ratio_record(std::string id, std::string frame, const GroundTruthObject& gt);

// Tuples for recovery, with the record's ratio sigmas. Without sigmas every
// tuple gets zero spread, which fuses to the plain mean of the estimates.
std::array<RatioWithSigma, 4> record_tuples(const RatioRecord& record);

struct SolveRecord {
  std::string id;
  double length = 0.0;
  double width = 0.0;
  FusionResult result;
};

// Readers throw ParseError(line, 0) on malformed JSON or missing fields. A
// ratio record may carry camera-centric ratios plus "group" instead of the
// object-centric r_ab..r_da; those are converted on read.
std::vector<RatioRecord> read_ratio_records(std::istream& in);
void write_ratio_records_jsonl(std::ostream& out, std::span<const RatioRecord> records);
void write_ratio_records_csv(std::ostream& out, std::span<const RatioRecord> records);

std::vector<SolveRecord> read_solve_records(std::istream& in);
void write_solve_records_jsonl(std::ostream& out, std::span<const SolveRecord> records);
void write_solve_records_csv(std::ostream& out, std::span<const SolveRecord> records);

// Detection lines: {"bbox": [l, t, r, b], "confidence", "d_est", "gamma_est"?, "frame"?}.
// Ground-truth lines: {"bbox", "d_gt" (or "d_obj"), "gamma_gt" (or "gamma"), "frame"?}.
std::vector<DetectionRecord> read_detections(std::istream& in);
std::vector<GroundTruthRecord> read_ground_truth(std::istream& in);
void write_detections_jsonl(std::ostream& out, std::span<const DetectionRecord> records);
void write_ground_truth_jsonl(std::ostream& out, std::span<const GroundTruthRecord> records);

// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

}  // namespace keyedge
