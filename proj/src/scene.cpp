#include "keyedge/scene.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "keyedge/error.hpp"
#include "keyedge/indexing.hpp"
#include "keyedge/recovery.hpp"

namespace keyedge {
namespace {

void check_range(const Range& r, const char* name) {
  if (!std::isfinite(r.min) || !std::isfinite(r.max) || !(r.min < r.max)) {
    throw Error(ErrorCode::ConfigError, std::string(name) + " range needs min < max");
  }
}

double draw(std::mt19937_64& rng, const Range& r) {
  return std::uniform_real_distribution<double>(r.min, r.max)(rng);
}

}  // namespace

void SceneConfig::validate() const {
  check_range(depth, "depth");
  check_range(gamma, "gamma");
  check_range(length, "length");
  check_range(width, "width");
  check_range(height, "height");
  if (!(depth.min > 0.0)) throw Error(ErrorCode::ConfigError, "depth range must be positive");
  if (!(gamma.min > -0.5 * kPi) || !(gamma.max < 0.5 * kPi)) {
    throw Error(ErrorCode::ConfigError, "gamma range must lie inside (-pi/2, pi/2)");
  }
  if (!(length.min > 0.0) || !(width.min > 0.0) || !(height.min > 0.0)) {
    throw Error(ErrorCode::ConfigError, "dimension ranges must be positive");
  }
  if (!std::isfinite(camera_height)) throw Error(ErrorCode::ConfigError, "camera height");
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over a golden-ratio stride.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

bool is_degenerate(const BoxPose3D& pose) {
  const KeyedgeGeometry geometry = keyedge_positions(pose);
  for (const Vec3& p : geometry.bottom) {
    if (!(p.z > 0.0)) return true;
  }
  // h_i / h_j = d_j / d_i; the focal length cancels.
  auto d = [&](Keyedge k) { return geometry[k].z; };
  const ObjectRatios ratios{d(Keyedge::B) / d(Keyedge::A), d(Keyedge::C) / d(Keyedge::B),
                            d(Keyedge::D) / d(Keyedge::C), d(Keyedge::A) / d(Keyedge::D)};
  for (const RatioTuple& t : object_centric_tuples(ratios)) {
    if (!is_observable(t)) return true;
  }
  return false;
}

BoxPose3D sample_pose(const SceneConfig& config, std::uint64_t index) {
  std::mt19937_64 rng(mix_seed(config.seed, index));
  for (int attempt = 0; attempt <= kMaxResamples; ++attempt) {
    BoxPose3D pose;
    const double z = draw(rng, config.depth);
    const double gamma = draw(rng, config.gamma);
    pose.yaw = draw(rng, Range{-kPi, kPi});
    pose.dims = Dimensions{draw(rng, config.length), draw(rng, config.width),
                           draw(rng, config.height)};
    pose.center = Vec3{z * std::tan(gamma), config.camera_height - 0.5 * pose.dims.height, z};
    if (!config.reject_degenerate || !is_degenerate(pose)) return pose;
  }
  throw Error(ErrorCode::ConfigError, "object " + std::to_string(index) + " stayed degenerate after " +
                                          std::to_string(kMaxResamples) + " resamples");
}

std::vector<BoxPose3D> generate_scene(const SceneConfig& config) {
  config.validate();
  std::vector<BoxPose3D> poses;
  poses.reserve(config.count);
  for (std::size_t i = 0; i < config.count; ++i) poses.push_back(sample_pose(config, i));
  return poses;
}

void NoiseModel::validate() const {
  if (!(magnitude >= 0.0) || !std::isfinite(magnitude)) {
    throw Error(ErrorCode::ConfigError, "noise magnitude must be finite and non-negative");
  }
}

double NoiseModel::equivalent_sigma() const {
  switch (kind) {
    case NoiseKind::None: return 0.0;
    case NoiseKind::GaussianHeight: return magnitude;
    case NoiseKind::PixelQuantization: return magnitude / std::sqrt(12.0);
  }
  return 0.0;
}

KeyedgeObservation perturb_heights(const KeyedgeObservation& observation,
                                   const NoiseModel& noise, std::uint64_t seed) {
  noise.validate();
  if (noise.kind == NoiseKind::None) return observation;
  KeyedgeObservation out = observation;
  std::mt19937_64 rng(mix_seed(seed, 0));
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (KeyedgeMeasurement& m : out.edges) {
    double h = m.visual_height;
    if (noise.kind == NoiseKind::GaussianHeight) {
      h += noise.magnitude * gauss(rng);
    } else if (noise.magnitude > 0.0) {
      h = noise.magnitude * std::round(h / noise.magnitude);
    }
    m.visual_height = std::max(h, kMinVisualHeight);
  }
  return out;
}

}  // namespace keyedge
