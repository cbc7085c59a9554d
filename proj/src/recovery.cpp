#include "keyedge/recovery.hpp"

#include <algorithm>
#include <cmath>

namespace keyedge {
namespace {

void check_dims(double length, double width) {
  if (!(length > 0.0) || !(width > 0.0) || !std::isfinite(length) || !std::isfinite(width)) {
    throw Error(ErrorCode::InvalidDims, "length and width must be positive and finite");
  }
}

}  // namespace

PlaceholderRow placeholders(const RatioTuple& tuple) {
  const double u = tuple.r1 - 1.0;
  const double v = tuple.r2 - 1.0;
  switch (tuple.reference) {
    case Keyedge::A: return {u, -v, v, u};
    case Keyedge::B: return {v, u, u, v};
    case Keyedge::C: return {-u, v, v, u};
    case Keyedge::D: return {-v, -u, u, v};
  }
  return {};
}

PlaceholderJacobian placeholder_jacobian(Keyedge reference) {
  // The rows are linear, so the jacobian is the row evaluated at unit offsets.
  const PlaceholderRow p1 = placeholders(RatioTuple{reference, 2.0, 1.0});
  const PlaceholderRow p2 = placeholders(RatioTuple{reference, 1.0, 2.0});
  return {p1, p2};
}

bool is_observable(const RatioTuple& tuple) {
  return std::max(std::abs(tuple.r1 - 1.0), std::abs(tuple.r2 - 1.0)) >= kDistortionTolerance;
}

YawDepth solve_tuple(const RatioTuple& tuple, double length, double width) {
  check_dims(length, width);
  if (!std::isfinite(tuple.r1) || !std::isfinite(tuple.r2) || !(tuple.r1 > 0.0) ||
      !(tuple.r2 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "keyedge ratios must be positive and finite");
  }
  if (!is_observable(tuple)) {
    throw Error(ErrorCode::UnobservableDistortion,
                std::string("tuple ") + to_char(tuple.reference) + " carries no distortion");
  }
  const PlaceholderRow p = placeholders(tuple);
  const double theta = normalize_angle(std::atan2(width * p.theta_w, length * p.theta_l));
  const double dw = p.depth_w / width;
  const double dl = p.depth_l / length;
  const double d_ref = 1.0 / std::hypot(dw, dl);
  return {theta, d_ref};
}

double center_offset(double theta, Keyedge reference, double length, double width) {
  const double ls = length * std::sin(theta);
  const double wc = width * std::cos(theta);
  switch (reference) {
    case Keyedge::A: return ls - wc;
    case Keyedge::B: return ls + wc;
    case Keyedge::C: return -ls + wc;
    case Keyedge::D: return -ls - wc;
  }
  return 0.0;
}

double center_depth(double theta, double d_ref, Keyedge reference, double length,
                    double width) {
  check_dims(length, width);
  if (!(d_ref > 0.0)) {
    throw Error(ErrorCode::NonPositiveResult, "reference keyedge depth must be positive");
  }
  const double d_obj = d_ref + 0.5 * center_offset(theta, reference, length, width);
  if (!(d_obj > 0.0)) {
    throw Error(ErrorCode::NonPositiveResult,
                std::string("center depth from tuple ") + to_char(reference) + " is not positive");
  }
  return d_obj;
}

PoseEstimate solve_reference(const RatioTuple& tuple, double length, double width) {
  const YawDepth yd = solve_tuple(tuple, length, width);
  return PoseEstimate{tuple.reference, yd.theta, yd.d_ref,
                      center_depth(yd.theta, yd.d_ref, tuple.reference, length, width)};
}

SolveResult solve_all(const TupleSet& tuples, double length, double width) {
  check_dims(length, width);
  SolveResult result;
  for (const RatioTuple& tuple : tuples) {
    try {
      result.estimates.push_back(solve_reference(tuple, length, width));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidDims) throw;
      result.rejected.push_back(RejectedTuple{tuple.reference, e.code(), e.what()});
    }
  }
  if (result.estimates.empty()) {
    throw Error(ErrorCode::AllDegenerate, "no keyedge-ratio tuple yields an estimate");
  }
  return result;
}

}  // namespace keyedge
