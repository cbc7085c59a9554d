#pragma once

// Camera-frame conventions shared by the whole library.
//
// Camera frame: x right, y down, z forward (KITTI rectified camera). The
// bird's-eye view is the (x, z) plane. An object with egocentric yaw theta has
// its front axis along (cos theta, 0, -sin theta) and its left axis along
// (sin theta, 0, cos theta); this is exactly KITTI's rotation_y. Keyedges are
// the four vertical box edges, a = front-left, b = front-right, c = rear-right,
// d = rear-left, so that
//
//   d_a = d_b + w cos(theta),   d_c = d_b + l sin(theta).

#include <array>
#include <cstddef>
#include <optional>

namespace keyedge {

inline constexpr double kPi = 3.14159265358979323846;

enum class Keyedge : int { A = 0, B = 1, C = 2, D = 3 };

inline constexpr std::array<Keyedge, 4> kAllKeyedges = {Keyedge::A, Keyedge::B, Keyedge::C,
                                                        Keyedge::D};

constexpr int index_of(Keyedge k) { return static_cast<int>(k); }
constexpr Keyedge keyedge_at(int i) { return static_cast<Keyedge>(((i % 4) + 4) % 4); }
// Clockwise neighbours in bird's-eye view.
constexpr Keyedge next(Keyedge k) { return keyedge_at(index_of(k) + 1); }
constexpr Keyedge prev(Keyedge k) { return keyedge_at(index_of(k) + 3); }

char to_char(Keyedge k);
// Accepts 'a'..'d' (either case). Throws Error(InvalidArgument) otherwise.
Keyedge keyedge_from_char(char c);

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

double norm(const Vec3& v);

struct ImageSize {
  int width = 0;
  int height = 0;
};

struct CameraIntrinsics {
  double focal = 0.0;  // pixels
  double cx = 0.0;
  double cy = 0.0;
  std::optional<ImageSize> image_size;

  // Throws NonPositiveFocal / InvalidArgument.
  void validate() const;
};

struct Dimensions {
  double length = 0.0;
  double width = 0.0;
  double height = 0.0;
};

struct BoxPose3D {
  Vec3 center;      // geometric box center, camera frame
  Dimensions dims;
  double yaw = 0.0; // egocentric, radians

  // Throws InvalidDims / NonPositiveDepth.
  void validate() const;
};

struct KeyedgeGeometry {
  std::array<Vec3, 4> bottom;  // bottom corner of each keyedge, indexed by Keyedge
  double height = 0.0;

  const Vec3& operator[](Keyedge k) const { return bottom[index_of(k)]; }
};

struct KeyedgeMeasurement {
  double depth = 0.0;
  double distance = 0.0;       // euclidean distance of the bottom corner to the camera center
  double visual_height = 0.0;  // pixels
  double pixel_column = 0.0;   // pixels
};

struct KeyedgeObservation {
  std::array<KeyedgeMeasurement, 4> edges;

  const KeyedgeMeasurement& operator[](Keyedge k) const { return edges[index_of(k)]; }
  KeyedgeMeasurement& operator[](Keyedge k) { return edges[index_of(k)]; }
};

// Object-centric ratios of adjacent keyedges, r_ij = h_i / h_j.
struct ObjectRatios {
  double ab = 1.0;
  double bc = 1.0;
  double cd = 1.0;
  double da = 1.0;

  // Ratio between two adjacent keyedges in either direction. Throws
  // InvalidArgument for non-adjacent pairs.
  double ratio(Keyedge i, Keyedge j) const;
};

struct AngleTriple {
  double egocentric = 0.0;   // theta
  double allocentric = 0.0;  // alpha
  double viewing = 0.0;      // gamma
};

// Wraps to [-pi, pi).
double normalize_angle(double angle);

// Smallest signed difference a - b, in [-pi, pi).
double angle_difference(double a, double b);

KeyedgeGeometry keyedge_positions(const BoxPose3D& pose);

KeyedgeObservation project_keyedges(const BoxPose3D& pose, const CameraIntrinsics& intrinsics);

ObjectRatios keyedge_ratios(const KeyedgeObservation& observation);

// gamma = atan2(x, z); with theta = rotation_y this reproduces KITTI's
// alpha = rotation_y - atan2(x, z).
double viewing_angle(const Vec3& center);

AngleTriple from_egocentric(double theta, double gamma);
AngleTriple from_allocentric(double alpha, double gamma);

}  // namespace keyedge
