#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <vector>

#include "keyedge/geometry.hpp"
#include "keyedge/metrics.hpp"
#include "keyedge/scene.hpp"

namespace keyedge::test {

inline double deg(double d) { return d * kPi / 180.0; }

inline double rel_err(double a, double b) { return std::abs(a - b) / std::abs(b); }

inline double angle_err(double a, double b) { return std::abs(angle_difference(a, b)); }

inline CameraIntrinsics kitti_camera(double focal = 721.5377) {
  return CameraIntrinsics{focal, 609.5593, 172.854, std::nullopt};
}

// Non-degenerate pose drawn from the default scene ranges.
inline BoxPose3D random_pose(std::uint64_t seed, std::uint64_t index) {
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.count = 1;
  for (std::uint64_t attempt = 0;; ++attempt) {
    const BoxPose3D p = sample_pose(cfg, index * 1000 + attempt);
    if (!is_degenerate(p)) return p;
  }
}

// Exhaustive ARDE: for every distinct confidence cutoff, rematch the detections
// at or above it from scratch, then take s(k) at the first cutoff reaching k/40.
inline double brute_force_arde(const std::vector<DetectionRecord>& dets,
                               const std::vector<GroundTruthRecord>& gts, double iou_min,
                               std::vector<double>* envelope_out = nullptr) {
  std::set<double, std::greater<>> cutoffs;
  for (const auto& d : dets) cutoffs.insert(d.confidence);

  struct Point {
    int tp;
    double score;
  };
  std::vector<Point> points;
  for (double cut : cutoffs) {
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (dets[i].confidence >= cut) kept.push_back(i);
    }
    std::stable_sort(kept.begin(), kept.end(), [&](std::size_t a, std::size_t b) {
      return dets[a].confidence > dets[b].confidence;
    });
    std::vector<bool> used(gts.size(), false);
    int tp = 0;
    double err = 0.0;
    for (std::size_t i : kept) {
      int best = -1;
      double best_iou = -1.0;
      for (std::size_t g = 0; g < gts.size(); ++g) {
        if (used[g] || gts[g].frame != dets[i].frame) continue;
        const double iou = iou_2d(dets[i].box, gts[g].box);
        if (iou > best_iou) {
          best_iou = iou;
          best = static_cast<int>(g);
        }
      }
      if (best >= 0 && best_iou >= iou_min) {
        used[best] = true;
        ++tp;
        err += std::abs(dets[i].depth - gts[best].depth) / gts[best].depth;
      }
    }
    points.push_back({tp, tp > 0 ? err / tp : 0.0});
  }

  std::vector<double> s(41, -1.0);
  for (int k = 1; k <= 40; ++k) {
    for (const Point& p : points) {
      if (p.tp > 0 && p.tp * 40 >= k * static_cast<int>(gts.size())) {
        s[k] = p.score;
        break;
      }
    }
  }
  std::vector<double> env(41, 0.0);
  double total = 0.0;
  for (int k = 1; k <= 40; ++k) {
    double m = 0.0;
    for (int j = k; j <= 40; ++j) m = std::max(m, s[j]);
    env[k] = m;
    total += m;
  }
  if (envelope_out) envelope_out->assign(env.begin() + 1, env.end());
  return total / 40.0;
}

// Random detection set of at most max_dets detections scattered around a few
// ground-truth boxes, with deliberate duplicates and confidence ties.
struct DetectionSet {
  std::vector<DetectionRecord> dets;
  std::vector<GroundTruthRecord> gts;
};

inline DetectionSet random_detection_set(std::mt19937_64& rng, int max_dets = 12) {
  std::uniform_int_distribution<int> n_gt_dist(1, 5);
  std::uniform_int_distribution<int> n_det_dist(0, max_dets);
  std::uniform_real_distribution<double> pos(0.0, 400.0);
  std::uniform_real_distribution<double> size(20.0, 120.0);
  std::uniform_real_distribution<double> depth(5.0, 60.0);
  std::uniform_real_distribution<double> jitter(-15.0, 15.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> conf_level(0, 6);

  DetectionSet set;
  const int n_gt = n_gt_dist(rng);
  for (int i = 0; i < n_gt; ++i) {
    GroundTruthRecord g;
    g.box.left = pos(rng);
    g.box.top = pos(rng);
    g.box.right = g.box.left + size(rng);
    g.box.bottom = g.box.top + size(rng);
    g.depth = depth(rng);
    g.viewing_angle = deg(-40.0 + 80.0 * unit(rng));
    set.gts.push_back(g);
  }
  const int n_det = n_det_dist(rng);
  for (int i = 0; i < n_det; ++i) {
    DetectionRecord d;
    const GroundTruthRecord& g = set.gts[rng() % set.gts.size()];
    const double s = unit(rng) < 0.7 ? 0.2 : 1.0;  // mostly near-hits
    d.box.left = g.box.left + s * jitter(rng);
    d.box.top = g.box.top + s * jitter(rng);
    d.box.right = std::max(d.box.left + 5.0, g.box.right + s * jitter(rng));
    d.box.bottom = std::max(d.box.top + 5.0, g.box.bottom + s * jitter(rng));
    d.confidence = conf_level(rng) / 6.0;  // coarse levels force ties
    d.depth = g.depth * (1.0 + 0.3 * (unit(rng) - 0.5));
    d.viewing_angle = g.viewing_angle;
    set.dets.push_back(d);
  }
  return set;
}

}  // namespace keyedge::test
