#pragma once

#include <array>
#include <span>
#include <vector>

#include "keyedge/recovery.hpp"

namespace keyedge {

struct RatioWithSigma {
  RatioTuple tuple;
  double sigma1 = 0.0;
  double sigma2 = 0.0;
};

struct DepthPartials {
  double d_r1 = 0.0;  // d(d_obj)/d(r1)
  double d_r2 = 0.0;  // d(d_obj)/d(r2)
};

// Analytic partials of the center depth, through both d_ref and theta.
DepthPartials depth_partials(const RatioTuple& tuple, double length, double width);

// First-order spread |dd/dr1| s1 + |dd/dr2| s2. Throws NonPositiveSigma on
// negative or non-finite sigmas.
double propagate_sigma(const DepthPartials& partials, double sigma1, double sigma2);

// First-order spread of h_i / h_j when both heights carry independent pixel
// noise of the given standard deviation.
double ratio_sigma(double h_i, double h_j, double sigma_px);

// Attaches sigmas of the forward ratios (r_ab, r_bc, r_cd, r_da) to the four
// tuples; a reversed ratio r_ji = 1/r_ij gets sigma_ij * r_ji^2.
std::array<RatioWithSigma, 4> tuples_with_sigma(const ObjectRatios& ratios,
                                                const std::array<double, 4>& forward_sigma);

struct SigmaEstimate {
  PoseEstimate estimate;
  double sigma_d = 0.0;
};

struct WeightedEstimate {
  PoseEstimate estimate;
  double sigma_d = 0.0;
  double weight = 0.0;  // normalized
};

enum class YawFusion { WeightedCircularMean };

struct FusedEstimate {
  double depth = 0.0;
  double theta = 0.0;
  std::vector<WeightedEstimate> members;
  YawFusion yaw_fusion = YawFusion::WeightedCircularMean;
};

// Inverse-sigma weighted average of depth, weighted circular mean of yaw.
// Members with sigma_d == 0 take all of the weight (the sigma -> 0 limit).
FusedEstimate fuse(std::span<const SigmaEstimate> estimates);

struct FusionResult {
  FusedEstimate fused;
  std::vector<RejectedTuple> rejected;
};

// solve_all, propagate each tuple's ratio sigmas, then fuse.
FusionResult solve_and_fuse(const std::array<RatioWithSigma, 4>& tuples, double length,
                            double width);

// |r - r*| / sigma + log(sigma)
double uncertainty_loss(double r, double sigma, double r_star);

}  // namespace keyedge
