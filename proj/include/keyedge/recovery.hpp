#pragma once

// Closed-form yaw and depth from one keyedge-ratio tuple and the object's
// footprint (l, w). Nothing in here depends on the camera intrinsics.

#include <string>
#include <vector>

#include "keyedge/error.hpp"
#include "keyedge/indexing.hpp"

namespace keyedge {

// A tuple is unobservable when max(|r1 - 1|, |r2 - 1|) falls below this.
inline constexpr double kDistortionTolerance = 1e-10;

// Signed linear forms in (r1 - 1, r2 - 1). Per reference keyedge:
//   a: ( u, -v,  v,  u)    b: ( v,  u,  u,  v)
//   c: (-u,  v,  v,  u)    d: (-v, -u,  u,  v)
// with u = r1 - 1, v = r2 - 1 and columns (theta_w, theta_l, depth_w, depth_l).
struct PlaceholderRow {
  double theta_w = 0.0;
  double theta_l = 0.0;
  double depth_w = 0.0;
  double depth_l = 0.0;
};

PlaceholderRow placeholders(const RatioTuple& tuple);

// d(placeholder)/d(r1) and d(placeholder)/d(r2); each entry is -1, 0 or 1.
struct PlaceholderJacobian {
  PlaceholderRow d_r1;
  PlaceholderRow d_r2;
};

PlaceholderJacobian placeholder_jacobian(Keyedge reference);

struct YawDepth {
  double theta = 0.0;  // [-pi, pi)
  double d_ref = 0.0;  // depth of the reference keyedge
};

bool is_observable(const RatioTuple& tuple);

YawDepth solve_tuple(const RatioTuple& tuple, double length, double width);

// Signed offset delta with d_obj = d_ref + delta / 2.
double center_offset(double theta, Keyedge reference, double length, double width);

double center_depth(double theta, double d_ref, Keyedge reference, double length, double width);

struct PoseEstimate {
  Keyedge reference = Keyedge::B;
  double theta = 0.0;
  double d_ref = 0.0;
  double d_obj = 0.0;
};

struct RejectedTuple {
  Keyedge reference = Keyedge::B;
  ErrorCode reason = ErrorCode::UnobservableDistortion;
  std::string message;
};

struct SolveResult {
  std::vector<PoseEstimate> estimates;  // in a, b, c, d order
  std::vector<RejectedTuple> rejected;
};

PoseEstimate solve_reference(const RatioTuple& tuple, double length, double width);

// Throws AllDegenerate when no tuple yields an estimate.
SolveResult solve_all(const TupleSet& tuples, double length, double width);

}  // namespace keyedge
