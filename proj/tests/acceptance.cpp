// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "keyedge/indexing.hpp"
#include "keyedge/kitti.hpp"
#include "keyedge/pipeline.hpp"
#include "keyedge/recovery.hpp"
#include "keyedge/uncertainty.hpp"
#include "support.hpp"

using namespace keyedge;
using keyedge::test::deg;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome round_trip() {
  const auto start = Clock::now();
  SceneConfig cfg;
  cfg.count = 10000;
  cfg.seed = 2024;
  cfg.gamma = {deg(-40), deg(40)};
  const auto poses = generate_scene(cfg);
  double worst_theta = 0.0, worst_depth = 0.0;
  std::size_t solved = 0;
  for (const BoxPose3D& p : poses) {
    const ObjectRatios r = keyedge_ratios(project_keyedges(p, test::kitti_camera()));
    for (const RatioTuple& t : object_centric_tuples(r)) {
      const PoseEstimate e = solve_reference(t, p.dims.length, p.dims.width);
      worst_theta = std::max(worst_theta, test::angle_err(e.theta, p.yaw));
      worst_depth = std::max(worst_depth, test::rel_err(e.d_obj, p.center.z));
      ++solved;
    }
  }
  const double t = seconds_since(start);
  Outcome o;
  o.pass = solved == 40000 && worst_theta <= 1e-9 && worst_depth <= 1e-9 && t < 5.0;
  o.detail = fmt("40000 tuples, max |dtheta| %.2e rad, max rel depth err %.2e, %.2f s",
                 worst_theta, worst_depth, t);
  return o;
}

Outcome worked_example() {
  const double l = 4.0, w = 2.0, th = deg(30.0);
  const BoxPose3D pose{{-l / 2 * std::cos(th) + w / 2 * std::sin(th), 0.0,
                        10.0 + l / 2 * std::sin(th) + w / 2 * std::cos(th)},
                       {l, w, 1.5}, th};
  const ObjectRatios r = keyedge_ratios(project_keyedges(pose, test::kitti_camera()));
  const TupleSet ts = object_centric_tuples(r);
  const PoseEstimate b = solve_reference(ts[index_of(Keyedge::B)], l, w);
  const PoseEstimate a = solve_reference(ts[index_of(Keyedge::A)], l, w);
  const double tol = 1e-7;
  Outcome o;
  o.pass = std::abs(r.ratio(Keyedge::B, Keyedge::A) - 1.1732051) < tol &&
           std::abs(r.ratio(Keyedge::B, Keyedge::C) - 1.2) < tol &&
           std::abs(b.theta - th) < tol && std::abs(b.d_ref - 10.0) < tol &&
           std::abs(b.d_obj - 11.8660254) < tol && std::abs(a.theta - th) < tol &&
           std::abs(a.d_obj - 11.8660254) < tol && std::abs(a.d_obj - b.d_obj) < tol;
  o.detail = fmt("r_ba %.10f r_bc %.10f, d_obj(b) %.10f d_obj(a) %.10f",
                 r.ratio(Keyedge::B, Keyedge::A), r.ratio(Keyedge::B, Keyedge::C), b.d_obj, a.d_obj);
  return o;
}

Outcome intrinsics_independence() {
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const BoxPose3D p = test::random_pose(303, i);
    const auto base = solve_all(
        object_centric_tuples(keyedge_ratios(project_keyedges(p, test::kitti_camera()))),
        p.dims.length, p.dims.width);
    for (double scale : {0.5, 0.75, 1.5, 2.0, 3.0, 4.0}) {
      const auto other = solve_all(
          object_centric_tuples(
              keyedge_ratios(project_keyedges(p, test::kitti_camera(721.5377 * scale)))),
          p.dims.length, p.dims.width);
      for (std::size_t k = 0; k < base.estimates.size(); ++k) {
        worst = std::max(worst, test::rel_err(other.estimates[k].d_obj, base.estimates[k].d_obj));
        worst = std::max(worst, test::angle_err(other.estimates[k].theta, base.estimates[k].theta) /
                                    std::max(1.0, std::abs(base.estimates[k].theta)));
      }
    }
  }
  Outcome o;
  o.pass = worst <= 1e-12;
  o.detail = fmt("1000 poses x focal 0.5x..4x, max relative drift %.2e", worst);
  return o;
}

double d_obj_of(Keyedge ref, double r1, double r2, double l, double w) {
  return solve_reference({ref, r1, r2}, l, w).d_obj;
}

Outcome gradient_check() {
  const auto start = Clock::now();
  double worst = 0.0;
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const BoxPose3D p = test::random_pose(404, i);
    const double l = p.dims.length, w = p.dims.width;
    const TupleSet ts =
        object_centric_tuples(keyedge_ratios(project_keyedges(p, test::kitti_camera())));
    const RatioTuple t = ts[i % 4];
    const DepthPartials dp = depth_partials(t, l, w);
    // Five-point central stencil.
    auto fd = [&](bool first) {
      const double x = first ? t.r1 : t.r2;
      const double h = 1e-4 * x;
      auto f = [&](double v) {
        return first ? d_obj_of(t.reference, v, t.r2, l, w) : d_obj_of(t.reference, t.r1, v, l, w);
      };
      return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
    };
    const double f1 = fd(true), f2 = fd(false);
    worst = std::max(worst, std::abs(dp.d_r1 - f1) / std::abs(f1));
    worst = std::max(worst, std::abs(dp.d_r2 - f2) / std::abs(f2));
  }
  const double t = seconds_since(start);
  Outcome o;
  o.pass = worst <= 1e-6 && t < 2.0;
  o.detail = fmt("1000 tuples, max relative error %.2e, %.3f s", worst, t);
  return o;
}

Outcome fusion() {
  auto member = [](double d, double s) {
    PoseEstimate e;
    e.d_obj = d;
    return SigmaEstimate{e, s};
  };
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> depth(5.0, 60.0), sigma(0.001, 5.0);
  std::uniform_int_distribution<int> count(1, 4);
  double worst_mean = 0.0;
  bool hull = true;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = count(rng);
    const double s = sigma(rng);
    std::vector<SigmaEstimate> equal, mixed;
    double sum = 0.0, lo = 1e300, hi = -1e300;
    for (int i = 0; i < n; ++i) {
      const double d = depth(rng);
      equal.push_back(member(d, s));
      mixed.push_back(member(d, sigma(rng)));
      sum += d;
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    worst_mean = std::max(worst_mean, std::abs(fuse(equal).depth - sum / n));
    const double f = fuse(mixed).depth;
    hull = hull && f >= lo && f <= hi;
  }
  const double fixture =
      fuse(std::vector<SigmaEstimate>{member(10.0, 1.0), member(12.0, 2.0)}).depth;
  Outcome o;
  o.pass = worst_mean <= 1e-12 && std::abs(fixture - 10.6667) <= 1e-4 && hull;
  o.detail = fmt("equal-sigma vs mean %.2e, fixture %.6f, hull ", worst_mean, fixture) +
             (hull ? "held" : "violated");
  return o;
}

Outcome loss() {
  const double fixture = uncertainty_loss(1.2, 0.1, 1.0);
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> ratio(0.8, 1.25);
  const double step = 1e-4;
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const double r = ratio(rng), r_star = ratio(rng);
    double best = 1e300, arg = 0.0;
    for (double s = step; s <= 1.0; s += step) {
      const double v = uncertainty_loss(r, s, r_star);
      if (v < best) {
        best = v;
        arg = s;
      }
    }
    if (std::abs(r - r_star) >= step) worst = std::max(worst, std::abs(arg - std::abs(r - r_star)));
  }
  Outcome o;
  o.pass = std::abs(fixture - (-0.302585)) <= 1e-6 && worst <= step;
  o.detail = fmt("L(1.2,0.1;1.0) = %.9f, argmin off by at most %.1e (grid %.0e)", fixture, worst, step);
  return o;
}

Outcome arde_oracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(707);
  double worst = 0.0;
  bool monotone = true;
  for (int i = 0; i < 200; ++i) {
    const test::DetectionSet s = test::random_detection_set(rng, 12);
    const ArdeResult r = arde_detailed(s.dets, s.gts, 0.5);
    for (int k = 1; k < kRecallPoints; ++k) monotone = monotone && r.envelope[k] <= r.envelope[k - 1];
    worst = std::max(worst, std::abs(r.value - test::brute_force_arde(s.dets, s.gts, 0.5)));
  }
  const double t = seconds_since(start);
  Outcome o;
  o.pass = worst <= 1e-12 && monotone && t < 5.0;
  o.detail = fmt("200 sets, max |arde - oracle| %.2e, %.3f s, envelope ", worst, t) +
             (monotone ? "monotone" : "NOT monotone");
  return o;
}

Outcome ratio_bound() {
  const Dimensions cars[] = {{4.5, 1.9, 1.5}, {3.9, 1.6, 1.5}, {4.2, 1.75, 1.5}};
  double worst_regular = 0.0, worst_exception = 0.0;
  double at_depth = 0, at_gamma = 0, at_yaw = 0;
  std::size_t poses = 0, exceptions = 0, over = 0;
  for (const Dimensions& dims : cars) {
    for (int z = 5; z <= 60; ++z) {
      for (int g = -40; g <= 40; ++g) {
        for (int yaw = -180; yaw < 180; ++yaw) {
          const BoxPose3D p{{z * std::tan(deg(g)), 0.8, static_cast<double>(z)}, dims, deg(yaw)};
          KeyedgeObservation obs;
          try {
            obs = project_keyedges(p, test::kitti_camera());
          } catch (const Error&) {
            continue;
          }
          ++poses;
          Keyedge first;
          try {
            first = nearest_by_distance(obs);
          } catch (const Error&) {
            continue;
          }
          const CameraCentricRatios cc = camera_centric_view(obs);
          const double m = std::max({cc.r21, cc.r41, cc.r32, cc.r34});
          bool nearest_in_depth = true;
          for (Keyedge k : kAllKeyedges) nearest_in_depth &= obs[k].depth >= obs[first].depth;
          if (nearest_in_depth) {
            worst_regular = std::max(worst_regular, m);
          } else {
            ++exceptions;
            if (m >= 1.1) ++over;
            if (m > worst_exception) {
              worst_exception = m;
              at_depth = z;
              at_gamma = g;
              at_yaw = yaw;
            }
          }
        }
      }
    }
  }
  Outcome o;
  o.pass = worst_regular <= 1.0 + 1e-12 && worst_exception < 1.1;
  o.detail = fmt("regular max %.15f; exception set %.1f%% of poses, max %.4f", worst_regular,
                 100.0 * exceptions / poses, worst_exception) +
             fmt(" at z=%.0f gamma=%.0f yaw=%.0f deg", at_depth, at_gamma, at_yaw) +
             fmt("; %.0f of %.0f exception poses reach >= 1.1", over, exceptions);
  return o;
}

Outcome kitti() {
  const std::string data = KEYEDGE_TEST_DATA;
  double worst_angle = 0.0, worst_depth = 0.0;
  std::size_t objects = 0;
  for (const char* frame : {"000000", "000001"}) {
    const auto labels = parse_label_file(slurp(data + "/kitti/label_2/" + frame + ".txt"));
    const auto calib = parse_calib(slurp(data + "/kitti/calib/" + frame + ".txt"));
    for (const GroundTruthObject& gt : labels_to_ground_truth(labels, calib)) {
      ++objects;
      worst_angle = std::max(
          worst_angle, test::angle_err(gt.label.alpha + gt.angles.viewing, gt.label.rotation_y));
      const FusionResult f = solve_and_fuse(
          tuples_with_sigma(gt.ratios, {0.0, 0.0, 0.0, 0.0}), gt.label.length, gt.label.width);
      worst_depth = std::max(worst_depth, test::rel_err(f.fused.depth, gt.label.location.z));
    }
  }
  Outcome o;
  o.pass = objects == 9 && worst_angle <= 1e-2 && worst_depth <= 1e-2;
  o.detail = fmt("%.0f objects, max |alpha+gamma-theta| %.4f rad, max rel depth err %.2e",
                 static_cast<double>(objects), worst_angle, worst_depth);
  return o;
}

Outcome sensitivity() {
  SensitivityConfig cfg = default_sensitivity_config();
  cfg.noise_kind = NoiseKind::GaussianHeight;
  cfg.noise_levels = {0.5};
  cfg.depth_edges = {5.0, 20.0, 40.0, 60.0};
  const std::size_t cells = (cfg.depth_edges.size() - 1) * (cfg.gamma_edges.size() - 1);
  cfg.trials_per_cell = (100000 + cells - 1) / cells;
  cfg.seed = 1010;

  const auto start = Clock::now();
  cfg.threads = 0;
  const auto rows = run_sensitivity(cfg);
  const double t = seconds_since(start);
  std::ostringstream first, second;
  write_sensitivity_csv(first, cfg.noise_kind, rows);
  cfg.threads = 1;
  write_sensitivity_csv(second, cfg.noise_kind, run_sensitivity(cfg));

  // rows are ordered depth band x gamma bin
  const std::size_t n_gamma = cfg.gamma_edges.size() - 1;
  bool monotone = true;
  std::string medians;
  for (std::size_t g = 0; g < n_gamma; ++g) {
    for (std::size_t b = 1; b < 3; ++b) {
      monotone = monotone && rows[b * n_gamma + g].median_rel_depth_error >
                                 rows[(b - 1) * n_gamma + g].median_rel_depth_error;
    }
  }
  for (std::size_t b = 0; b < 3; ++b) {
    medians += fmt(b ? ", %.4f" : "%.4f", rows[b * n_gamma + n_gamma / 2].median_rel_depth_error);
  }
  Outcome o;
  o.pass = first.str() == second.str() && monotone && t < 60.0;
  o.detail = fmt("%.0f trials in %.1f s, byte-identical across thread counts: ",
                 static_cast<double>(cfg.trials_per_cell * cells), t) +
             (first.str() == second.str() ? "yes" : "no") +
             ", median rel depth error by band (central gamma bin): " + medians +
             (monotone ? " (monotone in every gamma bin)" : " (NOT monotone)");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"round-trip exactness", round_trip},
      {"worked example", worked_example},
      {"intrinsics independence", intrinsics_independence},
      {"gradient check", gradient_check},
      {"fusion correctness", fusion},
      {"loss properties", loss},
      {"ARDE oracle equivalence", arde_oracle},
      {"camera-centric ratio bound", ratio_bound},
      {"KITTI ingestion", kitti},
      {"sensitivity determinism and trend", sensitivity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failed += !o.pass;
    std::printf("%s criterion %zu (%s): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
