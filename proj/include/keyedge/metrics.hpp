#pragma once

// Average relative depth error (ARDE): an AOS-style recall sweep in which the
// per-recall score is the mean relative depth error of the true positives.
//
// Detections are ranked by descending confidence (ties keep input order) and
// greedily matched one-to-one to ground truth of the same frame. A cutoff is a
// confidence threshold; it keeps every detection at or above it. For the
// recall points k/40, s(k) is taken at the highest threshold reaching recall
// >= k/40, the envelope is e(k) = max_{k' >= k} s(k'), and recall points the
// detections never reach contribute 0.

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace keyedge {

inline constexpr double kDefaultIouMin = 0.7;
inline constexpr int kRecallPoints = 40;

struct Box2D {
  double left = 0.0;
  double top = 0.0;
  double right = 0.0;
  double bottom = 0.0;

  double area() const { return (right - left) * (bottom - top); }
  void validate() const;
};

struct DetectionRecord {
  Box2D box;
  double confidence = 0.0;
  double depth = 0.0;  // estimated
  std::optional<double> viewing_angle;
  std::string frame;
};

struct GroundTruthRecord {
  Box2D box;
  double depth = 0.0;
  double viewing_angle = 0.0;
  std::string frame;
};

double iou_2d(const Box2D& a, const Box2D& b);

struct Match {
  std::size_t detection = 0;  // index into the input detections
  bool true_positive = false;
  std::optional<std::size_t> ground_truth;
};

// Detection indices sorted by descending confidence, stable.
std::vector<std::size_t> confidence_order(std::span<const DetectionRecord> detections);

// One entry per detection, in descending confidence order.
std::vector<Match> match_detections(std::span<const DetectionRecord> detections,
                                    std::span<const GroundTruthRecord> ground_truth,
                                    double iou_min);

struct ArdeResult {
  double value = 0.0;
  std::array<std::optional<double>, kRecallPoints> score;  // s(k/40), empty when unreachable
  std::array<double, kRecallPoints> envelope{};
  double max_recall = 0.0;
  std::size_t true_positives = 0;
};

// Throws NoGroundTruth on an empty ground-truth set.
ArdeResult arde_detailed(std::span<const DetectionRecord> detections,
                         std::span<const GroundTruthRecord> ground_truth, double iou_min);

double arde(std::span<const DetectionRecord> detections,
            std::span<const GroundTruthRecord> ground_truth, double iou_min);

struct AngleBin {
  double lower = 0.0;  // radians, inclusive
  double upper = 0.0;  // radians, exclusive
  std::size_t ground_truth_count = 0;
  std::size_t detection_count = 0;
  std::optional<double> arde;  // empty when the bin holds no ground truth
};

// Ground truth is binned by viewing angle. Detections follow their matched
// ground truth; unmatched detections use their own viewing angle when present
// and are dropped otherwise. Bins are evaluated in parallel.
std::vector<AngleBin> arde_by_viewing_angle(std::span<const DetectionRecord> detections,
                                            std::span<const GroundTruthRecord> ground_truth,
                                            double iou_min, std::span<const double> bin_edges);

}  // namespace keyedge
