#include "keyedge/indexing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "keyedge/error.hpp"

namespace keyedge {

AllocentricGroup allocentric_group(double alpha) {
  if (!std::isfinite(alpha)) {
    throw Error(ErrorCode::InvalidArgument, "allocentric angle must be finite");
  }
  const double a = normalize_angle(alpha);
  int id = static_cast<int>(std::floor((a + kPi) / (0.5 * kPi)));
  return AllocentricGroup{std::clamp(id, 0, 3)};
}

Keyedge nearest_keyedge(AllocentricGroup group) { return keyedge_at(3 - group.id); }

AllocentricGroup group_from_nearest(Keyedge nearest) {
  return AllocentricGroup{3 - index_of(nearest)};
}

Keyedge nearest_by_distance(const KeyedgeObservation& observation) {
  double best = observation[Keyedge::A].distance;
  for (Keyedge k : kAllKeyedges) {
    const double d = observation[k].distance;
    if (!(d > 0.0) || !(observation[k].visual_height > 0.0)) {
      throw Error(ErrorCode::DegenerateObservation, std::string("keyedge ") + to_char(k) +
                                                        " has non-positive distance or height");
    }
    best = std::min(best, d);
  }
  int tied = 0;
  Keyedge nearest = Keyedge::A;
  for (Keyedge k : kAllKeyedges) {
    if (observation[k].distance - best <= kDistanceTieTolerance * best) {
      if (tied == 0) nearest = k;
      ++tied;
    }
  }
  if (tied >= 3) {
    throw Error(ErrorCode::DegenerateObservation,
                std::to_string(tied) + " keyedges tie for the nearest distance");
  }
  return nearest;
}

CameraCentricRatios camera_centric_view(const KeyedgeObservation& observation) {
  const Keyedge first = nearest_by_distance(observation);
  auto h = [&](int camera_index) {
    return observation[keyedge_at(index_of(first) + camera_index - 1)].visual_height;
  };
  return CameraCentricRatios{h(2) / h(1), h(4) / h(1), h(3) / h(2), h(3) / h(4),
                             group_from_nearest(first)};
}

ObjectRatios to_object_ratios(const CameraCentricRatios& cc) {
  if (cc.group.id < 0 || cc.group.id > 3) {
    throw Error(ErrorCode::InvalidArgument, "allocentric group must be in 0..3");
  }
  const int k = index_of(nearest_keyedge(cc.group));
  // forward[i] holds r_{i, next(i)} in object-centric order.
  std::array<double, 4> forward{};
  auto set = [&](int from, int to, double value) {
    // value is h_from / h_to for two adjacent keyedges given as camera indices.
    const int i = (k + from - 1) % 4;
    const int j = (k + to - 1) % 4;
    if ((i + 1) % 4 == j) {
      forward[i] = value;
    } else {
      forward[j] = 1.0 / value;
    }
  };
  set(2, 1, cc.r21);
  set(4, 1, cc.r41);
  set(3, 2, cc.r32);
  set(3, 4, cc.r34);
  return ObjectRatios{forward[0], forward[1], forward[2], forward[3]};
}

CameraCentricRatios to_camera_centric(const ObjectRatios& ratios, AllocentricGroup group) {
  const int k = index_of(nearest_keyedge(group));
  auto r = [&](int p, int q) { return ratios.ratio(keyedge_at(k + p - 1), keyedge_at(k + q - 1)); };
  return CameraCentricRatios{r(2, 1), r(4, 1), r(3, 2), r(3, 4), group};
}

TupleSet object_centric_tuples(const ObjectRatios& ratios) {
  TupleSet tuples;
  for (Keyedge k : kAllKeyedges) {
    tuples[index_of(k)] = RatioTuple{k, ratios.ratio(k, prev(k)), ratios.ratio(k, next(k))};
  }
  return tuples;
}

TupleSet to_object_centric_tuples(const CameraCentricRatios& cc) {
  return object_centric_tuples(to_object_ratios(cc));
}

}  // namespace keyedge
