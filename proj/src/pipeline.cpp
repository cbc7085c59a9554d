#include "keyedge/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "keyedge/error.hpp"

namespace keyedge {
namespace {

namespace fs = std::filesystem;

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::array<double, 4> ratio_sigmas(const KeyedgeObservation& obs, double sigma_px) {
  std::array<double, 4> s{};
  for (Keyedge k : kAllKeyedges) {
    s[index_of(k)] = ratio_sigma(obs[k].visual_height, obs[next(k)].visual_height, sigma_px);
  }
  return s;
}

void check_edges(const std::vector<double>& edges, const char* name) {
  if (edges.size() < 2) {
    throw Error(ErrorCode::ConfigError, std::string(name) + " needs at least two edges");
  }
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) {
      throw Error(ErrorCode::ConfigError, std::string(name) + " must be strictly increasing");
    }
  }
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  return 0.5 * (*std::max_element(v.begin(), v.begin() + mid) + upper);
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

constexpr double kDegree = kPi / 180.0;

// Rounded to 1e-9 deg so that edges given in whole degrees print as such.
double to_degrees(double radians) { return std::round(radians / kDegree * 1e9) / 1e9; }

}  // namespace

const char* to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::None: return "none";
    case NoiseKind::GaussianHeight: return "gaussian_height";
    case NoiseKind::PixelQuantization: return "pixel_quantization";
  }
  return "none";
}

NoiseKind noise_kind_from_string(const std::string& name) {
  if (name == "none") return NoiseKind::None;
  if (name == "gaussian_height" || name == "gaussian") return NoiseKind::GaussianHeight;
  if (name == "pixel_quantization" || name == "quantization") return NoiseKind::PixelQuantization;
  throw Error(ErrorCode::ConfigError, "unknown noise kind '" + name + "'");
}

std::vector<RatioRecord> synthesize(const SynthOptions& options) {
  options.intrinsics.validate();
  options.noise.validate();
  const std::vector<BoxPose3D> poses = generate_scene(options.scene);
  std::vector<RatioRecord> records;
  records.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) {
    const KeyedgeObservation truth = project_keyedges(poses[i], options.intrinsics);
    const KeyedgeObservation seen =
        perturb_heights(truth, options.noise, mix_seed(options.noise_seed, i));
    RatioRecord r = make_ratio_record(std::to_string(i), poses[i], seen);
    r.ratio_sigma = ratio_sigmas(seen, options.noise.equivalent_sigma());
    records.push_back(std::move(r));
  }
  return records;
}

LabelgenResult labelgen(const fs::path& labels, const fs::path& calib,
                        const LabelgenOptions& options) {
  if (!fs::exists(labels)) throw Error(ErrorCode::IoError, "no such path " + labels.string());
  if (!fs::exists(calib)) throw Error(ErrorCode::IoError, "no such path " + calib.string());

  std::vector<fs::path> label_files;
  if (fs::is_directory(labels)) {
    for (const auto& entry : fs::directory_iterator(labels)) {
      if (entry.is_regular_file() && entry.path().extension() == ".txt") {
        label_files.push_back(entry.path());
      }
    }
    std::sort(label_files.begin(), label_files.end());
  } else {
    label_files.push_back(labels);
  }

  LabelgenResult result;
  for (const fs::path& file : label_files) {
    const std::string frame = file.stem().string();
    const fs::path calib_file = fs::is_directory(calib) ? calib / file.filename() : calib;
    const CameraIntrinsics intrinsics = parse_calib(read_file(calib_file));
    const std::vector<KittiLabel> parsed = parse_label_file(read_file(file));
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      const KittiLabel& label = parsed[i];
      const std::string id = frame + ":" + std::to_string(i);
      if (label.dont_care()) continue;
      if (options.skip_flagged && label.flagged()) {
        result.skipped.push_back(id + " flagged (truncated/occluded)");
        continue;
      }
      try {
        GroundTruthObject gt = label_to_ground_truth(label, intrinsics);
        gt.label_index = i;
        result.records.push_back(make_ratio_record(id, frame, gt));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::BehindCamera && e.code() != ErrorCode::DegenerateObservation) {
          throw;
        }
        result.skipped.push_back(id + " " + e.what());
      }
    }
  }
  return result;
}

std::vector<SolveRecord> solve_records(std::span<const RatioRecord> records) {
  std::vector<SolveRecord> out;
  out.reserve(records.size());
  for (const RatioRecord& r : records) {
    out.push_back(SolveRecord{r.id, r.dims.length, r.dims.width,
                              solve_and_fuse(record_tuples(r), r.dims.length, r.dims.width)});
  }
  return out;
}

ArdeReport evaluate_arde(std::span<const DetectionRecord> detections,
                         std::span<const GroundTruthRecord> ground_truth, double iou_min,
                         std::span<const double> bin_edges) {
  ArdeReport report;
  report.iou_min = iou_min;
  report.detections = detections.size();
  report.ground_truth = ground_truth.size();
  report.global = arde_detailed(detections, ground_truth, iou_min);
  if (!bin_edges.empty()) {
    report.bins = arde_by_viewing_angle(detections, ground_truth, iou_min, bin_edges);
  }
  return report;
}

void write_arde_report_json(std::ostream& out, const ArdeReport& report) {
  nlohmann::ordered_json j;
  j["iou_min"] = report.iou_min;
  j["detections"] = report.detections;
  j["ground_truth"] = report.ground_truth;
  j["arde"] = report.global.value;
  j["max_recall"] = report.global.max_recall;
  j["true_positives"] = report.global.true_positives;
  j["envelope"] = report.global.envelope;
  auto bins = nlohmann::ordered_json::array();
  for (const AngleBin& b : report.bins) {
    nlohmann::ordered_json e;
    e["gamma_min"] = b.lower;
    e["gamma_max"] = b.upper;
    e["ground_truth"] = b.ground_truth_count;
    e["detections"] = b.detection_count;
    e["arde"] = b.arde ? nlohmann::ordered_json(*b.arde) : nlohmann::ordered_json(nullptr);
    bins.push_back(std::move(e));
  }
  j["bins"] = std::move(bins);
  out << j.dump(2) << '\n';
}

void SensitivityConfig::validate() const {
  intrinsics.validate();
  if (noise_levels.empty()) throw Error(ErrorCode::ConfigError, "no noise levels");
  for (double level : noise_levels) NoiseModel{noise_kind, level}.validate();
  check_edges(depth_edges, "depth edges");
  check_edges(gamma_edges, "gamma edges");
  if (trials_per_cell == 0) throw Error(ErrorCode::ConfigError, "trials per cell must be > 0");
  SceneConfig probe;
  probe.depth = Range{depth_edges.front(), depth_edges.back()};
  probe.gamma = Range{gamma_edges.front(), gamma_edges.back()};
  probe.length = length;
  probe.width = width;
  probe.height = height;
  probe.validate();
}

SensitivityConfig default_sensitivity_config() {
  SensitivityConfig config;
  for (int deg = -30; deg <= 20; deg += 10) config.gamma_edges.push_back(deg * kDegree);
  return config;
}

std::vector<SensitivityRow> run_sensitivity(const SensitivityConfig& config) {
  config.validate();
  const std::size_t n_depth = config.depth_edges.size() - 1;
  const std::size_t n_gamma = config.gamma_edges.size() - 1;
  const std::size_t n_cells = config.noise_levels.size() * n_depth * n_gamma;

  std::vector<SensitivityRow> rows(n_cells);
  auto run_cell = [&](std::size_t cell) {
    const std::size_t noise_index = cell / (n_depth * n_gamma);
    const std::size_t depth_index = (cell / n_gamma) % n_depth;
    const std::size_t gamma_index = cell % n_gamma;

    SceneConfig scene;
    scene.depth = Range{config.depth_edges[depth_index], config.depth_edges[depth_index + 1]};
    scene.gamma = Range{config.gamma_edges[gamma_index], config.gamma_edges[gamma_index + 1]};
    scene.length = config.length;
    scene.width = config.width;
    scene.height = config.height;
    scene.seed = mix_seed(config.seed, cell);
    const NoiseModel noise{config.noise_kind, config.noise_levels[noise_index]};
    const std::uint64_t noise_seed = mix_seed(scene.seed, 0xA11CE);

    SensitivityRow& row = rows[cell];
    row.noise_level = noise.magnitude;
    row.depth = scene.depth;
    row.gamma = scene.gamma;
    row.trials = config.trials_per_cell;

    std::vector<double> depth_errors;
    std::vector<double> yaw_errors;
    depth_errors.reserve(config.trials_per_cell);
    yaw_errors.reserve(config.trials_per_cell);
    for (std::size_t t = 0; t < config.trials_per_cell; ++t) {
      const BoxPose3D pose = sample_pose(scene, t);
      const KeyedgeObservation seen = perturb_heights(project_keyedges(pose, config.intrinsics),
                                                      noise, mix_seed(noise_seed, t));
      try {
        const auto tuples =
            tuples_with_sigma(keyedge_ratios(seen), ratio_sigmas(seen, noise.equivalent_sigma()));
        const FusionResult fused = solve_and_fuse(tuples, pose.dims.length, pose.dims.width);
        depth_errors.push_back(std::abs(fused.fused.depth - pose.center.z) / pose.center.z);
        yaw_errors.push_back(std::abs(angle_difference(fused.fused.theta, pose.yaw)));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::AllDegenerate) throw;
        ++row.failures;
      }
    }
    row.mean_rel_depth_error = mean_of(depth_errors);
    row.median_rel_depth_error = median_of(std::move(depth_errors));
    row.mean_abs_yaw_error = mean_of(yaw_errors);
    row.median_abs_yaw_error = median_of(std::move(yaw_errors));
  };

  unsigned workers = config.threads ? config.threads : std::thread::hardware_concurrency();
  workers = std::clamp<unsigned>(workers, 1u, static_cast<unsigned>(std::max<std::size_t>(n_cells, 1)));
  std::atomic<std::size_t> next_cell{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t cell = next_cell++; cell < n_cells; cell = next_cell++) run_cell(cell);
      } catch (...) {
        errors[w] = std::current_exception();
        next_cell = n_cells;
      }
    });
  }
  for (std::thread& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sensitivity_csv(std::ostream& out, NoiseKind kind,
                           std::span<const SensitivityRow> rows) {
  out << "noise_kind,noise_px,depth_min,depth_max,gamma_min_deg,gamma_max_deg,trials,failures,"
         "mean_rel_depth_err,median_rel_depth_err,mean_abs_yaw_err,median_abs_yaw_err\n";
  auto cell = [](double v) { return std::isnan(v) ? std::string() : format_double(v); };
  for (const SensitivityRow& r : rows) {
    out << to_string(kind) << ',' << format_double(r.noise_level) << ','
        << format_double(r.depth.min) << ',' << format_double(r.depth.max) << ','
        << format_double(to_degrees(r.gamma.min)) << ',' << format_double(to_degrees(r.gamma.max))
        << ',' << r.trials << ',' << r.failures << ',' << cell(r.mean_rel_depth_error) << ','
        << cell(r.median_rel_depth_error) << ',' << cell(r.mean_abs_yaw_error) << ','
        << cell(r.median_abs_yaw_error) << '\n';
  }
}

}  // namespace keyedge
