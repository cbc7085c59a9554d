#include "keyedge/kitti.hpp"

#include <charconv>
#include <cmath>

#include "keyedge/error.hpp"

namespace keyedge {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    if (i == line.size()) break;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    fields.push_back(line.substr(i, j - i));
    i = j;
  }
  return fields;
}

double to_double(std::string_view token, std::size_t line, std::size_t field) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (!token.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw ParseError(line, field, "expected a number, got '" + std::string(token) + "'");
  }
  return value;
}

int to_int(std::string_view token, std::size_t line, std::size_t field) {
  int value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError(line, field, "expected an integer, got '" + std::string(token) + "'");
  }
  return value;
}

}  // namespace

std::vector<KittiLabel> parse_label_file(std::string_view text) {
  std::vector<KittiLabel> labels;
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const std::size_t line = n + 1;
    const auto f = split_fields(lines[n]);
    if (f.empty()) continue;
    if (f.size() < kKittiLabelFields) {
      throw ParseError(line, f.size() + 1, "expected 15 fields, got " + std::to_string(f.size()));
    }
    if (f.size() > kKittiLabelFields) {
      throw ParseError(line, kKittiLabelFields + 1,
                       "expected 15 fields, got " + std::to_string(f.size()));
    }
    KittiLabel label;
    label.class_name = std::string(f[0]);
    label.truncated = to_double(f[1], line, 2);
    label.occluded = to_int(f[2], line, 3);
    label.alpha = to_double(f[3], line, 4);
    label.bbox = Box2D{to_double(f[4], line, 5), to_double(f[5], line, 6),
                       to_double(f[6], line, 7), to_double(f[7], line, 8)};
    label.height = to_double(f[8], line, 9);
    label.width = to_double(f[9], line, 10);
    label.length = to_double(f[10], line, 11);
    label.location = Vec3{to_double(f[11], line, 12), to_double(f[12], line, 13),
                          to_double(f[13], line, 14)};
    label.rotation_y = to_double(f[14], line, 15);
    if (!label.dont_care()) {
      const double dims[] = {label.height, label.width, label.length};
      for (std::size_t i = 0; i < 3; ++i) {
        if (!(dims[i] > 0.0)) throw ParseError(line, 9 + i, "dimension must be positive");
      }
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

CameraIntrinsics parse_calib(std::string_view text) {
  const auto lines = split_lines(text);
  for (std::size_t n = 0; n < lines.size(); ++n) {
    const auto f = split_fields(lines[n]);
    if (f.empty() || f[0] != "P2:") continue;
    if (f.size() != 13) {
      // Field 1 is the "P2:" key itself.
      throw ParseError(n + 1, f.size() < 13 ? f.size() + 1 : 14,
                       "P2 needs 12 values, got " + std::to_string(f.size() - 1));
    }
    double p[12];
    for (std::size_t i = 0; i < 12; ++i) p[i] = to_double(f[i + 1], n + 1, i + 2);
    CameraIntrinsics intrinsics{p[0], p[2], p[6], std::nullopt};
    if (!(intrinsics.focal > 0.0)) {
      throw Error(ErrorCode::NonPositiveFocal,
                  "P2[0,0] must be positive, got " + std::to_string(intrinsics.focal));
    }
    return intrinsics;
  }
  throw ParseError(0, 0, "calibration has no P2 row");
}

BoxPose3D pose_from_label(const KittiLabel& label) {
  return BoxPose3D{
      Vec3{label.location.x, label.location.y - 0.5 * label.height, label.location.z},
      Dimensions{label.length, label.width, label.height}, label.rotation_y};
}

GroundTruthObject label_to_ground_truth(const KittiLabel& label,
                                        const CameraIntrinsics& intrinsics) {
  if (label.dont_care()) {
    throw Error(ErrorCode::InvalidArgument, "DontCare rows carry no geometry");
  }
  if (!(label.location.z > 0.0)) {
    throw Error(ErrorCode::BehindCamera, "object '" + label.class_name + "' at z = " +
                                             std::to_string(label.location.z));
  }
  GroundTruthObject gt;
  gt.label = label;
  gt.pose = pose_from_label(label);
  gt.angles = from_egocentric(gt.pose.yaw, viewing_angle(gt.pose.center));
  try {
    gt.observation = project_keyedges(gt.pose, intrinsics);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NonPositiveDepth) throw;
    throw Error(ErrorCode::BehindCamera, e.what());
  }
  gt.ratios = keyedge_ratios(gt.observation);
  gt.camera_centric = camera_centric_view(gt.observation);
  gt.tuples = object_centric_tuples(gt.ratios);
  gt.group = allocentric_group(gt.angles.allocentric);
  return gt;
}

std::vector<GroundTruthObject> labels_to_ground_truth(const std::vector<KittiLabel>& labels,
                                                      const CameraIntrinsics& intrinsics) {
  intrinsics.validate();
  std::vector<GroundTruthObject> objects;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].dont_care()) continue;
    GroundTruthObject gt = label_to_ground_truth(labels[i], intrinsics);
    gt.label_index = i;
    objects.push_back(std::move(gt));
  }
  return objects;
}

}  // namespace keyedge
