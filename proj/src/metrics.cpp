#include "keyedge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>

#include "keyedge/error.hpp"

namespace keyedge {
namespace {

void check_iou_min(double iou_min) {
  if (!(iou_min > 0.0) || !(iou_min <= 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "iou_min must lie in (0, 1]");
  }
}

double relative_depth_error(double estimate, double truth) {
  return std::abs(estimate - truth) / truth;
}

}  // namespace

void Box2D::validate() const {
  if (!(right > left) || !(bottom > top)) {
    throw Error(ErrorCode::InvalidArgument, "2D box must have right > left and bottom > top");
  }
}

double iou_2d(const Box2D& a, const Box2D& b) {
  const double iw = std::min(a.right, b.right) - std::max(a.left, b.left);
  const double ih = std::min(a.bottom, b.bottom) - std::max(a.top, b.top);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  return inter / (a.area() + b.area() - inter);
}

std::vector<std::size_t> confidence_order(std::span<const DetectionRecord> detections) {
  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return detections[i].confidence > detections[j].confidence;
  });
  return order;
}

std::vector<Match> match_detections(std::span<const DetectionRecord> detections,
                                    std::span<const GroundTruthRecord> ground_truth,
                                    double iou_min) {
  check_iou_min(iou_min);
  for (const DetectionRecord& d : detections) {
    d.box.validate();
    if (!std::isfinite(d.confidence)) {
      throw Error(ErrorCode::InvalidArgument, "detection confidence must be finite");
    }
  }
  for (const GroundTruthRecord& g : ground_truth) g.box.validate();

  std::vector<bool> taken(ground_truth.size(), false);
  std::vector<Match> matches;
  matches.reserve(detections.size());
  for (std::size_t det : confidence_order(detections)) {
    double best_iou = -1.0;
    std::optional<std::size_t> best;
    for (std::size_t g = 0; g < ground_truth.size(); ++g) {
      if (taken[g] || ground_truth[g].frame != detections[det].frame) continue;
      const double iou = iou_2d(detections[det].box, ground_truth[g].box);
      if (iou > best_iou) {
        best_iou = iou;
        best = g;
      }
    }
    Match m{det, false, std::nullopt};
    if (best && best_iou >= iou_min) {
      taken[*best] = true;
      m.true_positive = true;
      m.ground_truth = best;
    }
    matches.push_back(m);
  }
  return matches;
}

ArdeResult arde_detailed(std::span<const DetectionRecord> detections,
                         std::span<const GroundTruthRecord> ground_truth, double iou_min) {
  if (ground_truth.empty()) {
    throw Error(ErrorCode::NoGroundTruth, "ARDE needs at least one ground-truth object");
  }
  for (const GroundTruthRecord& g : ground_truth) {
    if (!(g.depth > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "ground-truth depth must be positive");
    }
  }
  const std::vector<Match> matches = match_detections(detections, ground_truth, iou_min);
  const std::size_t n_gt = ground_truth.size();

  // Cumulative (tp, error sum) at each confidence threshold, highest first.
  struct Cutoff {
    std::size_t tp;
    double error_sum;
  };
  std::vector<Cutoff> cutoffs;
  std::size_t tp = 0;
  double error_sum = 0.0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const Match& m = matches[i];
    if (m.true_positive) {
      ++tp;
      error_sum += relative_depth_error(detections[m.detection].depth,
                                        ground_truth[*m.ground_truth].depth);
    }
    const bool last_of_threshold =
        i + 1 == matches.size() ||
        detections[matches[i + 1].detection].confidence != detections[m.detection].confidence;
    if (last_of_threshold) cutoffs.push_back({tp, error_sum});
  }

  ArdeResult result;
  result.true_positives = tp;
  result.max_recall = static_cast<double>(tp) / static_cast<double>(n_gt);

  std::size_t c = 0;
  for (int k = 1; k <= kRecallPoints; ++k) {
    // recall >= k/40  <=>  40 * tp >= k * n_gt
    while (c < cutoffs.size() &&
           cutoffs[c].tp * kRecallPoints < static_cast<std::size_t>(k) * n_gt) {
      ++c;
    }
    if (c == cutoffs.size()) break;
    result.score[k - 1] = cutoffs[c].error_sum / static_cast<double>(cutoffs[c].tp);
  }

  std::optional<double> running;
  for (int k = kRecallPoints; k >= 1; --k) {
    if (const auto& s = result.score[k - 1]) {
      running = running ? std::max(*running, *s) : *s;
    }
    result.envelope[k - 1] = running.value_or(0.0);
  }
  double total = 0.0;
  for (double e : result.envelope) total += e;
  result.value = total / kRecallPoints;
  return result;
}

double arde(std::span<const DetectionRecord> detections,
            std::span<const GroundTruthRecord> ground_truth, double iou_min) {
  return arde_detailed(detections, ground_truth, iou_min).value;
}

std::vector<AngleBin> arde_by_viewing_angle(std::span<const DetectionRecord> detections,
                                            std::span<const GroundTruthRecord> ground_truth,
                                            double iou_min, std::span<const double> bin_edges) {
  if (bin_edges.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two bin edges");
  }
  for (std::size_t i = 1; i < bin_edges.size(); ++i) {
    if (!(bin_edges[i] > bin_edges[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "bin edges must be strictly increasing");
    }
  }
  const std::size_t n_bins = bin_edges.size() - 1;
  auto bin_of = [&](double angle) -> std::optional<std::size_t> {
    if (!(angle >= bin_edges.front()) || !(angle < bin_edges.back())) return std::nullopt;
    const auto it = std::upper_bound(bin_edges.begin(), bin_edges.end(), angle);
    return static_cast<std::size_t>(it - bin_edges.begin()) - 1;
  };

  std::vector<std::vector<GroundTruthRecord>> bin_gts(n_bins);
  std::vector<std::optional<std::size_t>> gt_bin(ground_truth.size());
  for (std::size_t g = 0; g < ground_truth.size(); ++g) {
    gt_bin[g] = bin_of(ground_truth[g].viewing_angle);
    if (gt_bin[g]) bin_gts[*gt_bin[g]].push_back(ground_truth[g]);
  }

  // Keep input order inside each bin so confidence ties resolve identically.
  std::vector<std::optional<std::size_t>> det_bin(detections.size());
  for (const Match& m : match_detections(detections, ground_truth, iou_min)) {
    if (m.ground_truth) {
      det_bin[m.detection] = gt_bin[*m.ground_truth];
    } else if (const auto& gamma = detections[m.detection].viewing_angle) {
      det_bin[m.detection] = bin_of(*gamma);
    }
  }
  std::vector<std::vector<DetectionRecord>> bin_dets(n_bins);
  for (std::size_t d = 0; d < detections.size(); ++d) {
    if (det_bin[d]) bin_dets[*det_bin[d]].push_back(detections[d]);
  }

  std::vector<std::future<std::optional<double>>> pending;
  pending.reserve(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    pending.push_back(std::async(std::launch::async, [&, b]() -> std::optional<double> {
      if (bin_gts[b].empty()) return std::nullopt;
      return arde(bin_dets[b], bin_gts[b], iou_min);
    }));
  }
  std::vector<AngleBin> bins(n_bins);
  for (std::size_t b = 0; b < n_bins; ++b) {
    bins[b].lower = bin_edges[b];
    bins[b].upper = bin_edges[b + 1];
    bins[b].ground_truth_count = bin_gts[b].size();
    bins[b].detection_count = bin_dets[b].size();
    bins[b].arde = pending[b].get();
  }
  return bins;
}

}  // namespace keyedge
