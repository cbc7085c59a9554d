#pragma once

#include <array>

#include "keyedge/geometry.hpp"

namespace keyedge {

// Quarter of [-pi, pi) containing the allocentric angle:
//   0: [-pi, -pi/2)   1: [-pi/2, 0)   2: [0, pi/2)   3: [pi/2, pi)
struct AllocentricGroup {
  int id = 0;

  friend bool operator==(AllocentricGroup, AllocentricGroup) = default;
};

AllocentricGroup allocentric_group(double alpha);

// The keyedge nearest to the camera for objects in a given group. The camera
// sits at (sin alpha, -cos alpha) in the object's (front, left) frame, so the
// nearest corner is d, c, b, a for groups 0..3.
Keyedge nearest_keyedge(AllocentricGroup group);
AllocentricGroup group_from_nearest(Keyedge nearest);

// Camera-centric ratios. Index 1 is the keyedge nearest to the camera center,
// indices 2, 3, 4 follow clockwise: r21 = h2/h1, r41 = h4/h1, r32 = h3/h2,
// r34 = h3/h4.
struct CameraCentricRatios {
  double r21 = 1.0;
  double r41 = 1.0;
  double r32 = 1.0;
  double r34 = 1.0;
  AllocentricGroup group;
};

// Relative tolerance under which two keyedge distances count as tied.
inline constexpr double kDistanceTieTolerance = 1e-9;

// Ties between two keyedges resolve to the lower object-centric index; three
// or more tied keyedges raise DegenerateObservation.
Keyedge nearest_by_distance(const KeyedgeObservation& observation);

CameraCentricRatios camera_centric_view(const KeyedgeObservation& observation);

// Reference keyedge plus (r1, r2) = (r_{i,prev(i)}, r_{i,next(i)}).
struct RatioTuple {
  Keyedge reference = Keyedge::B;
  double r1 = 1.0;
  double r2 = 1.0;
};

using TupleSet = std::array<RatioTuple, 4>;

// Recovers the object-centric adjacent ratios from a camera-centric view.
ObjectRatios to_object_ratios(const CameraCentricRatios& cc);

// Inverse of to_object_ratios for a known group.
CameraCentricRatios to_camera_centric(const ObjectRatios& ratios, AllocentricGroup group);

// Tuples in a, b, c, d order: (r_ad, r_ab), (r_ba, r_bc), (r_cb, r_cd), (r_dc, r_da).
TupleSet object_centric_tuples(const ObjectRatios& ratios);

TupleSet to_object_centric_tuples(const CameraCentricRatios& cc);

}  // namespace keyedge
