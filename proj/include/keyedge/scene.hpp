#pragma once

// Synthetic scenes and pixel-space noise on keyedge heights.
//
// Every object draws from its own generator seeded with mix_seed(seed, index),
// so output does not depend on how objects are scheduled across threads.

#include <cstdint>
#include <vector>

#include "keyedge/geometry.hpp"

namespace keyedge {

struct Range {
  double min = 0.0;
  double max = 0.0;
};

struct SceneConfig {
  std::size_t count = 0;
  Range depth{5.0, 60.0};          // center z, meters
  Range gamma{-0.7, 0.7};          // viewing angle, radians
  Range length{3.5, 4.8};          // realistic passenger-car footprint
  Range width{1.5, 1.95};
  Range height{1.4, 1.8};
  double camera_height = 1.65;     // ground plane at y = camera_height
  std::uint64_t seed = 0;
  bool reject_degenerate = true;

  // Throws ConfigError.
  void validate() const;
};

inline constexpr int kMaxResamples = 100;

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

// Yaw is uniform on [-pi, pi). A pose is degenerate when a keyedge lies
// behind the camera or some ratio tuple is unobservable.
bool is_degenerate(const BoxPose3D& pose);

BoxPose3D sample_pose(const SceneConfig& config, std::uint64_t index);

std::vector<BoxPose3D> generate_scene(const SceneConfig& config);

enum class NoiseKind { None, GaussianHeight, PixelQuantization };

struct NoiseModel {
  NoiseKind kind = NoiseKind::None;
  double magnitude = 0.0;  // sigma_px or quantum_px

  void validate() const;
  // Standard deviation of the per-height error the model introduces.
  double equivalent_sigma() const;
};

inline constexpr double kMinVisualHeight = 0.1;

KeyedgeObservation perturb_heights(const KeyedgeObservation& observation,
                                   const NoiseModel& noise, std::uint64_t seed);

}  // namespace keyedge
