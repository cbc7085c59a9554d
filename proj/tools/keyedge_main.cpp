// keyedge: synthesize scenes, turn KITTI labels into keyedge-ratio records,
// recover depth and yaw from ratios, and evaluate ARDE.
//
// Exit codes: 0 success, 2 usage, 3 parse, 4 io, 5 numeric degeneracy.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "keyedge/error.hpp"
#include "keyedge/pipeline.hpp"

namespace fs = std::filesystem;
using namespace keyedge;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitIo = 4;
constexpr int kExitNumeric = 5;

constexpr double kDegree = kPi / 180.0;

enum class Format { Jsonl, Csv };

Format parse_format(const std::string& s) {
  if (s == "jsonl") return Format::Jsonl;
  if (s == "csv") return Format::Csv;
  throw Error(ErrorCode::ConfigError, "format must be jsonl or csv");
}

void require_input(const std::string& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "no such path " + path);
}

void require_output(const std::string& path) {
  if (path == "-") return;
  const fs::path parent = fs::absolute(path).parent_path();
  if (!fs::is_directory(parent)) {
    throw Error(ErrorCode::IoError, "output directory does not exist: " + parent.string());
  }
}

// Writes through a callback to a file or stdout ("-").
template <typename Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path == "-") {
    fn(std::cout);
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path);
  fn(out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  return in;
}

std::vector<double> degrees_to_radians(const std::vector<double>& degrees) {
  std::vector<double> out;
  out.reserve(degrees.size());
  for (double d : degrees) out.push_back(d * kDegree);
  return out;
}

Range range_of(const std::vector<double>& v) { return Range{v.at(0), v.at(1)}; }

int exit_code(const Error& e) {
  switch (classify(e.code())) {
    case ErrorClass::Usage: return kExitUsage;
    case ErrorClass::Parse: return kExitParse;
    case ErrorClass::Io: return kExitIo;
    case ErrorClass::Numeric: return kExitNumeric;
  }
  return kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Keyedge-ratio geometry: synthesis, label generation, recovery and ARDE"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene as ratio records");
  std::uint64_t synth_seed = 0;
  std::size_t synth_count = 100;
  std::vector<double> synth_depth{5.0, 60.0};
  std::vector<double> synth_gamma_deg{-40.0, 40.0};
  std::vector<double> synth_length{3.5, 4.8}, synth_width{1.5, 1.95}, synth_height{1.4, 1.8};
  double synth_focal = kKittiFocal;
  std::string synth_noise_kind = "none";
  double synth_noise_px = 0.0;
  std::optional<std::uint64_t> synth_noise_seed;
  bool synth_keep_degenerate = false;
  std::string synth_out, synth_format = "jsonl";
  synth->add_option("--seed", synth_seed, "Scene seed")->required();
  synth->add_option("--count", synth_count, "Number of objects");
  synth->add_option("--depth", synth_depth, "Center depth range [m]")->expected(2);
  synth->add_option("--gamma-deg", synth_gamma_deg, "Viewing angle range [deg]")->expected(2);
  synth->add_option("--length", synth_length, "Length range [m]")->expected(2);
  synth->add_option("--width", synth_width, "Width range [m]")->expected(2);
  synth->add_option("--height", synth_height, "Height range [m]")->expected(2);
  synth->add_option("--focal", synth_focal, "Focal length [px]");
  synth->add_option("--noise-kind", synth_noise_kind, "none | gaussian_height | pixel_quantization");
  synth->add_option("--noise-px", synth_noise_px, "Noise sigma or quantum [px]");
  synth->add_option("--noise-seed", synth_noise_seed, "Noise seed (default: --seed)");
  synth->add_flag("--keep-degenerate", synth_keep_degenerate, "Do not resample degenerate poses");
  synth->add_option("-o,--out", synth_out, "Output path or -")->required();
  synth->add_option("--format", synth_format, "jsonl | csv");

  // labelgen
  auto* lg = app.add_subcommand("labelgen", "Convert KITTI labels and calibration to ratio records");
  std::string lg_labels, lg_calib, lg_out, lg_format = "jsonl";
  bool lg_skip_flagged = false;
  lg->add_option("--labels", lg_labels, "Label file or directory")->required();
  lg->add_option("--calib", lg_calib, "Calibration file or directory")->required();
  lg->add_option("-o,--out", lg_out, "Output path or -")->required();
  lg->add_option("--format", lg_format, "jsonl | csv");
  lg->add_flag("--skip-flagged", lg_skip_flagged, "Drop truncated > 0.5 or occluded = 2 objects");

  // solve
  auto* solve = app.add_subcommand("solve", "Recover depth and yaw from ratio records");
  std::string solve_in, solve_out, solve_format = "jsonl";
  solve->add_option("-i,--in", solve_in, "Ratio records (JSON-lines)")->required();
  solve->add_option("-o,--out", solve_out, "Output path or -")->required();
  solve->add_option("--format", solve_format, "jsonl | csv");

  // eval-arde
  auto* ev = app.add_subcommand("eval-arde", "Average relative depth error, global and per viewing angle");
  std::string ev_dets, ev_gts, ev_out = "-";
  double ev_iou = kDefaultIouMin;
  std::vector<double> ev_edges_deg;
  ev->add_option("--dets", ev_dets, "Detections (JSON-lines)")->required();
  ev->add_option("--gts", ev_gts, "Ground truth (JSON-lines)")->required();
  ev->add_option("--iou-min", ev_iou, "2D IoU threshold for a true positive");
  ev->add_option("--bin-edges-deg", ev_edges_deg, "Viewing-angle bin edges [deg]")->delimiter(',');
  ev->add_option("-o,--out", ev_out, "Output path or -");

  // sensitivity
  auto* sens = app.add_subcommand("sensitivity", "Monte Carlo depth/yaw error vs noise, depth and viewing angle");
  SensitivityConfig sens_cfg = default_sensitivity_config();
  std::string sens_noise_kind = "gaussian_height", sens_out;
  std::vector<double> sens_gamma_deg{-30, -20, -10, 0, 10, 20};
  double sens_focal = kKittiFocal;
  std::vector<double> sens_length{3.5, 4.8}, sens_width{1.5, 1.95}, sens_height{1.4, 1.8};
  sens->add_option("--seed", sens_cfg.seed, "Seed")->required();
  sens->add_option("--noise-kind", sens_noise_kind, "none | gaussian_height | pixel_quantization");
  sens->add_option("--noise-px", sens_cfg.noise_levels, "Noise levels [px]")->delimiter(',');
  sens->add_option("--depth-edges", sens_cfg.depth_edges, "Depth band edges [m]")->delimiter(',');
  sens->add_option("--gamma-edges-deg", sens_gamma_deg, "Viewing-angle bin edges [deg]")->delimiter(',');
  sens->add_option("--trials", sens_cfg.trials_per_cell, "Trials per cell");
  sens->add_option("--threads", sens_cfg.threads, "Worker threads (0: all cores)");
  sens->add_option("--focal", sens_focal, "Focal length [px]");
  sens->add_option("--length", sens_length, "Length range [m]")->expected(2);
  sens->add_option("--width", sens_width, "Width range [m]")->expected(2);
  sens->add_option("--height", sens_height, "Height range [m]")->expected(2);
  sens->add_option("-o,--out", sens_out, "Output CSV path or -")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (synth->parsed()) {
      const Format format = parse_format(synth_format);
      require_output(synth_out);
      SynthOptions options;
      options.scene.count = synth_count;
      options.scene.depth = range_of(synth_depth);
      options.scene.gamma = Range{synth_gamma_deg.at(0) * kDegree, synth_gamma_deg.at(1) * kDegree};
      options.scene.length = range_of(synth_length);
      options.scene.width = range_of(synth_width);
      options.scene.height = range_of(synth_height);
      options.scene.seed = synth_seed;
      options.scene.reject_degenerate = !synth_keep_degenerate;
      options.intrinsics.focal = synth_focal;
      options.noise = NoiseModel{noise_kind_from_string(synth_noise_kind), synth_noise_px};
      options.noise_seed = synth_noise_seed.value_or(synth_seed);
      const auto records = synthesize(options);
      emit(synth_out, [&](std::ostream& out) {
        format == Format::Csv ? write_ratio_records_csv(out, records)
                              : write_ratio_records_jsonl(out, records);
      });
    } else if (lg->parsed()) {
      const Format format = parse_format(lg_format);
      require_input(lg_labels);
      require_input(lg_calib);
      require_output(lg_out);
      const LabelgenResult result = labelgen(lg_labels, lg_calib, LabelgenOptions{lg_skip_flagged});
      for (const std::string& msg : result.skipped) std::cerr << "skipped " << msg << '\n';
      emit(lg_out, [&](std::ostream& out) {
        format == Format::Csv ? write_ratio_records_csv(out, result.records)
                              : write_ratio_records_jsonl(out, result.records);
      });
    } else if (solve->parsed()) {
      const Format format = parse_format(solve_format);
      require_input(solve_in);
      require_output(solve_out);
      auto in = open_input(solve_in);
      const auto records = solve_records(read_ratio_records(in));
      emit(solve_out, [&](std::ostream& out) {
        format == Format::Csv ? write_solve_records_csv(out, records)
                              : write_solve_records_jsonl(out, records);
      });
    } else if (ev->parsed()) {
      require_input(ev_dets);
      require_input(ev_gts);
      require_output(ev_out);
      auto dets_in = open_input(ev_dets);
      auto gts_in = open_input(ev_gts);
      const auto dets = read_detections(dets_in);
      const auto gts = read_ground_truth(gts_in);
      const auto edges = degrees_to_radians(ev_edges_deg);
      const ArdeReport report = evaluate_arde(dets, gts, ev_iou, edges);
      emit(ev_out, [&](std::ostream& out) { write_arde_report_json(out, report); });
    } else if (sens->parsed()) {
      require_output(sens_out);
      sens_cfg.noise_kind = noise_kind_from_string(sens_noise_kind);
      sens_cfg.gamma_edges = degrees_to_radians(sens_gamma_deg);
      sens_cfg.intrinsics.focal = sens_focal;
      sens_cfg.length = range_of(sens_length);
      sens_cfg.width = range_of(sens_width);
      sens_cfg.height = range_of(sens_height);
      const auto rows = run_sensitivity(sens_cfg);
      emit(sens_out, [&](std::ostream& out) { write_sensitivity_csv(out, sens_cfg.noise_kind, rows); });
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code(e);
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return 0;
}
