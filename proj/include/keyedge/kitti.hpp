#pragma once

// KITTI object labels and calibration.
//
// Labels are in the rectified reference camera frame with `location` at the
// bottom center of the box, so the box center sits h/2 above it (y is down).
// `rotation_y` is used unchanged as the egocentric yaw: the box front axis is
// (cos ry, 0, -sin ry), which is the convention of geometry.hpp. The devkit's
// alpha = ry - atan2(x, z) is then exactly alpha = theta - gamma.
//
// The calibration reader keeps only focal length and principal point of P2
// and ignores its translation column; keyedge ratios do not depend on either.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "keyedge/geometry.hpp"
#include "keyedge/indexing.hpp"
#include "keyedge/metrics.hpp"

namespace keyedge {

struct KittiLabel {
  std::string class_name;
  double truncated = 0.0;
  int occluded = 0;
  double alpha = 0.0;
  Box2D bbox;
  double height = 0.0;  // dims_hwl
  double width = 0.0;
  double length = 0.0;
  Vec3 location;  // bottom center
  double rotation_y = 0.0;

  bool dont_care() const { return class_name == "DontCare"; }
  // Heavily truncated (> 0.5) or largely occluded (2).
  bool flagged() const { return truncated > 0.5 || occluded == 2; }
};

inline constexpr std::size_t kKittiLabelFields = 15;

// Throws ParseError(line, field) with 1-based positions. Blank lines are
// skipped.
std::vector<KittiLabel> parse_label_file(std::string_view text);

// Reads the "P2:" row (12 scalars, row-major 3x4).
CameraIntrinsics parse_calib(std::string_view text);

BoxPose3D pose_from_label(const KittiLabel& label);

struct GroundTruthObject {
  std::size_t label_index = 0;
  KittiLabel label;
  BoxPose3D pose;
  AngleTriple angles;  // derived from pose; label.alpha is the file's value
  KeyedgeObservation observation;
  ObjectRatios ratios;
  CameraCentricRatios camera_centric;
  TupleSet tuples;
  AllocentricGroup group;  // quarter of the derived allocentric angle
};

// Throws BehindCamera for z <= 0 and InvalidArgument for DontCare rows.
GroundTruthObject label_to_ground_truth(const KittiLabel& label,
                                        const CameraIntrinsics& intrinsics);

// DontCare rows are skipped; any other failure propagates.
std::vector<GroundTruthObject> labels_to_ground_truth(const std::vector<KittiLabel>& labels,
                                                      const CameraIntrinsics& intrinsics);

}  // namespace keyedge
