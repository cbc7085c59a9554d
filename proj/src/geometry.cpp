#include "keyedge/geometry.hpp"

#include <cmath>
#include <string>

#include "keyedge/error.hpp"

namespace keyedge {

char to_char(Keyedge k) { return static_cast<char>('a' + index_of(k)); }

Keyedge keyedge_from_char(char c) {
  if (c >= 'A' && c <= 'D') c = static_cast<char>(c - 'A' + 'a');
  if (c < 'a' || c > 'd') {
    throw Error(ErrorCode::InvalidArgument, std::string("unknown keyedge '") + c + "'");
  }
  return keyedge_at(c - 'a');
}

double norm(const Vec3& v) { return std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z); }

void CameraIntrinsics::validate() const {
  if (!(focal > 0.0) || !std::isfinite(focal)) {
    throw Error(ErrorCode::NonPositiveFocal, "focal length must be positive, got " +
                                                 std::to_string(focal));
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw Error(ErrorCode::InvalidArgument, "principal point must be finite");
  }
  if (image_size && (image_size->width <= 0 || image_size->height <= 0)) {
    throw Error(ErrorCode::InvalidArgument, "image size must be positive");
  }
}

void BoxPose3D::validate() const {
  if (!(dims.length > 0.0) || !(dims.width > 0.0) || !(dims.height > 0.0)) {
    throw Error(ErrorCode::InvalidDims, "box dimensions must be positive");
  }
  if (!(center.z > 0.0)) {
    throw Error(ErrorCode::NonPositiveDepth, "box center must lie in front of the camera");
  }
  if (!std::isfinite(center.x) || !std::isfinite(center.y) || !std::isfinite(yaw)) {
    throw Error(ErrorCode::InvalidArgument, "pose must be finite");
  }
}

double ObjectRatios::ratio(Keyedge i, Keyedge j) const {
  auto forward = [this](Keyedge k) {
    switch (k) {
      case Keyedge::A: return ab;
      case Keyedge::B: return bc;
      case Keyedge::C: return cd;
      case Keyedge::D: return da;
    }
    return 1.0;
  };
  if (next(i) == j) return forward(i);
  if (next(j) == i) return 1.0 / forward(j);
  throw Error(ErrorCode::InvalidArgument, std::string("keyedges ") + to_char(i) + " and " +
                                              to_char(j) + " are not adjacent");
}

double normalize_angle(double angle) {
  double wrapped = angle - 2.0 * kPi * std::floor((angle + kPi) / (2.0 * kPi));
  // floor() can leave the result a rounding step outside the half-open range.
  if (wrapped >= kPi) wrapped -= 2.0 * kPi;
  if (wrapped < -kPi) wrapped += 2.0 * kPi;
  return wrapped;
}

double angle_difference(double a, double b) { return normalize_angle(a - b); }

KeyedgeGeometry keyedge_positions(const BoxPose3D& pose) {
  pose.validate();
  const double c = std::cos(pose.yaw);
  const double s = std::sin(pose.yaw);
  const double hl = 0.5 * pose.dims.length;
  const double hw = 0.5 * pose.dims.width;
  // front = (c, -s), left = (s, c) in (x, z)
  const double bottom_y = pose.center.y + 0.5 * pose.dims.height;
  auto corner = [&](double along_front, double along_left) {
    return Vec3{pose.center.x + along_front * c + along_left * s, bottom_y,
                pose.center.z - along_front * s + along_left * c};
  };
  KeyedgeGeometry geometry;
  geometry.height = pose.dims.height;
  geometry.bottom[index_of(Keyedge::A)] = corner(hl, hw);
  geometry.bottom[index_of(Keyedge::B)] = corner(hl, -hw);
  geometry.bottom[index_of(Keyedge::C)] = corner(-hl, -hw);
  geometry.bottom[index_of(Keyedge::D)] = corner(-hl, hw);
  return geometry;
}

KeyedgeObservation project_keyedges(const BoxPose3D& pose, const CameraIntrinsics& intrinsics) {
  intrinsics.validate();
  const KeyedgeGeometry geometry = keyedge_positions(pose);
  KeyedgeObservation observation;
  for (Keyedge k : kAllKeyedges) {
    const Vec3& p = geometry[k];
    if (!(p.z > 0.0)) {
      throw Error(ErrorCode::NonPositiveDepth, std::string("keyedge ") + to_char(k) +
                                                   " is not in front of the camera");
    }
    KeyedgeMeasurement& m = observation[k];
    m.depth = p.z;
    m.distance = norm(p);
    m.visual_height = intrinsics.focal * geometry.height / p.z;
    m.pixel_column = intrinsics.focal * p.x / p.z + intrinsics.cx;
  }
  return observation;
}

ObjectRatios keyedge_ratios(const KeyedgeObservation& observation) {
  for (Keyedge k : kAllKeyedges) {
    if (!(observation[k].visual_height > 0.0)) {
      throw Error(ErrorCode::ZeroHeight, std::string("keyedge ") + to_char(k) +
                                             " has non-positive visual height");
    }
  }
  auto h = [&](Keyedge k) { return observation[k].visual_height; };
  return ObjectRatios{h(Keyedge::A) / h(Keyedge::B), h(Keyedge::B) / h(Keyedge::C),
                      h(Keyedge::C) / h(Keyedge::D), h(Keyedge::D) / h(Keyedge::A)};
}

double viewing_angle(const Vec3& center) {
  if (!(center.z > 0.0)) {
    throw Error(ErrorCode::NonPositiveDepth, "viewing angle needs a point in front of the camera");
  }
  return normalize_angle(std::atan2(center.x, center.z));
}

AngleTriple from_egocentric(double theta, double gamma) {
  return AngleTriple{normalize_angle(theta), normalize_angle(theta - gamma),
                     normalize_angle(gamma)};
}

AngleTriple from_allocentric(double alpha, double gamma) {
  return AngleTriple{normalize_angle(alpha + gamma), normalize_angle(alpha),
                     normalize_angle(gamma)};
}

}  // namespace keyedge
