#include "keyedge/uncertainty.hpp"

#include <cmath>

namespace keyedge {

DepthPartials depth_partials(const RatioTuple& tuple, double length, double width) {
  const YawDepth yd = solve_tuple(tuple, length, width);
  const PlaceholderRow p = placeholders(tuple);
  const PlaceholderJacobian jac = placeholder_jacobian(tuple.reference);

  const double d3 = yd.d_ref * yd.d_ref * yd.d_ref;
  const double w2 = width * width;
  const double l2 = length * length;

  // theta = atan2(Y, X) with Y = w * theta_w, X = l * theta_l.
  const double y = width * p.theta_w;
  const double x = length * p.theta_l;
  const double r2 = x * x + y * y;

  // d(delta)/d(theta) for the reference row of the offset table.
  const double dc = std::cos(yd.theta);
  const double ds = std::sin(yd.theta);
  double d_offset = 0.0;
  switch (tuple.reference) {
    case Keyedge::A: d_offset = length * dc + width * ds; break;
    case Keyedge::B: d_offset = length * dc - width * ds; break;
    case Keyedge::C: d_offset = -length * dc - width * ds; break;
    case Keyedge::D: d_offset = -length * dc + width * ds; break;
  }

  auto partial = [&](const PlaceholderRow& dp) {
    const double dd_ref = -d3 * (p.depth_w * dp.depth_w / w2 + p.depth_l * dp.depth_l / l2);
    const double dtheta = (x * width * dp.theta_w - y * length * dp.theta_l) / r2;
    return dd_ref + 0.5 * d_offset * dtheta;
  };
  return {partial(jac.d_r1), partial(jac.d_r2)};
}

double propagate_sigma(const DepthPartials& partials, double sigma1, double sigma2) {
  if (!(sigma1 >= 0.0) || !(sigma2 >= 0.0) || !std::isfinite(sigma1) || !std::isfinite(sigma2)) {
    throw Error(ErrorCode::NonPositiveSigma, "ratio sigmas must be finite and non-negative");
  }
  return std::abs(partials.d_r1) * sigma1 + std::abs(partials.d_r2) * sigma2;
}

double ratio_sigma(double h_i, double h_j, double sigma_px) {
  if (!(h_i > 0.0) || !(h_j > 0.0)) {
    throw Error(ErrorCode::ZeroHeight, "visual heights must be positive");
  }
  return (h_i / h_j) * sigma_px * std::sqrt(1.0 / (h_i * h_i) + 1.0 / (h_j * h_j));
}

std::array<RatioWithSigma, 4> tuples_with_sigma(const ObjectRatios& ratios,
                                                const std::array<double, 4>& forward_sigma) {
  auto sigma = [&](Keyedge i, Keyedge j) {
    if (next(i) == j) return forward_sigma[index_of(i)];
    const double r = ratios.ratio(i, j);
    return forward_sigma[index_of(j)] * r * r;
  };
  const TupleSet tuples = object_centric_tuples(ratios);
  std::array<RatioWithSigma, 4> out;
  for (Keyedge k : kAllKeyedges) {
    out[index_of(k)] = RatioWithSigma{tuples[index_of(k)], sigma(k, prev(k)), sigma(k, next(k))};
  }
  return out;
}

FusedEstimate fuse(std::span<const SigmaEstimate> estimates) {
  if (estimates.empty()) {
    throw Error(ErrorCode::EmptyInput, "nothing to fuse");
  }
  bool any_exact = false;
  for (const SigmaEstimate& e : estimates) {
    if (!(e.sigma_d >= 0.0) || !std::isfinite(e.sigma_d)) {
      throw Error(ErrorCode::NonPositiveSigma, "depth sigma must be finite and non-negative");
    }
    any_exact = any_exact || e.sigma_d == 0.0;
  }

  FusedEstimate fused;
  fused.members.reserve(estimates.size());
  double total = 0.0;
  for (const SigmaEstimate& e : estimates) {
    double raw = 0.0;
    if (any_exact) {
      raw = e.sigma_d == 0.0 ? 1.0 : 0.0;
    } else {
      raw = 1.0 / e.sigma_d;
    }
    total += raw;
    fused.members.push_back(WeightedEstimate{e.estimate, e.sigma_d, raw});
  }

  double depth = 0.0;
  double sum_cos = 0.0;
  double sum_sin = 0.0;
  for (WeightedEstimate& m : fused.members) {
    m.weight /= total;
    depth += m.weight * m.estimate.d_obj;
    sum_cos += m.weight * std::cos(m.estimate.theta);
    sum_sin += m.weight * std::sin(m.estimate.theta);
  }
  fused.depth = depth;
  fused.theta = normalize_angle(std::atan2(sum_sin, sum_cos));
  return fused;
}

FusionResult solve_and_fuse(const std::array<RatioWithSigma, 4>& tuples, double length,
                            double width) {
  TupleSet plain;
  for (std::size_t i = 0; i < tuples.size(); ++i) plain[i] = tuples[i].tuple;
  SolveResult solved = solve_all(plain, length, width);

  std::vector<SigmaEstimate> members;
  members.reserve(solved.estimates.size());
  for (const PoseEstimate& estimate : solved.estimates) {
    const RatioWithSigma& source = tuples[index_of(estimate.reference)];
    const DepthPartials partials = depth_partials(source.tuple, length, width);
    members.push_back(
        SigmaEstimate{estimate, propagate_sigma(partials, source.sigma1, source.sigma2)});
  }
  return FusionResult{fuse(members), std::move(solved.rejected)};
}

double uncertainty_loss(double r, double sigma, double r_star) {
  if (!(sigma > 0.0)) {
    throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  }
  return std::abs(r - r_star) / sigma + std::log(sigma);
}

}  // namespace keyedge
