#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "morphevo/geometry.hpp"
#include "morphevo/morphology.hpp"

namespace morphevo {

// The six phenotypic descriptors tracked for every robot. All are stored as
// doubles so downstream statistics treat them uniformly; size is the module
// count and is always integral.
struct TraitVector {
  double proportion = 0;  // 2-D planform aspect ratio, (0, 1]
  double size = 0;        // modules on the grid, >= 1
  double limbs = 0;       // leaves relative to the most achievable, [0, 1]
  double coverage = 0;    // occupied cells over 3-D bounding box volume, (0, 1]
  double speed = 0;       // planar displacement rate, cm/s
  double balance = 0;     // uprightness over the run, [0, 1]

  std::array<double, 6> values() const {
    return {proportion, size, limbs, coverage, speed, balance};
  }
  static TraitVector from_values(const std::array<double, 6>& v) {
    return {v[0], v[1], v[2], v[3], v[4], v[5]};
  }
  bool all_finite() const;
};

inline constexpr std::array<const char*, 6> kTraitNames = {
    "proportion", "size", "limbs", "coverage", "speed", "balance"};

constexpr std::size_t kTraitCount = 6;

// Pose samples produced by the locomotion model. Positions are in cm,
// orientation angles in degrees.
struct TrajectorySample {
  Vec3d position_cm;
  double roll_deg = 0;
  double pitch_deg = 0;
  double yaw_deg = 0;
};

struct Trajectory {
  double sample_period_s = 0.1;
  std::vector<TrajectorySample> samples;

  double duration_s() const {
    return samples.size() < 2 ? 0.0
                              : sample_period_s * static_cast<double>(samples.size() - 1);
  }
};

// Width/depth ratio of the occupied cells projected on the ground plane,
// smaller extent over larger.
double proportion_of(const GridEmbedding& e);

// Occupied cells over the volume of their 3-D bounding box.
double coverage_of(const GridEmbedding& e);

// Leaves the most leaf-heavy m-module arrangement can have, given a 4-slot
// root, 3-slot bricks and single-slot joints.
int max_leaves(int module_count);

// Modules with no attached children on the grid (the root never counts),
// normalised by max_leaves of the embedded module count.
double limbs_ratio(const GridEmbedding& e);

int embedded_leaf_count(const GridEmbedding& e);

// Straight-line ground-plane displacement between first and last sample over
// elapsed time, cm/s.
double speed_cm_per_s(const Trajectory& t);

// 1 - mean of (|roll| + |pitch|) / 360 across samples, angles folded into
// [0, 180]. 1 means perfectly level throughout.
double balance_of(const Trajectory& t);

TraitVector trait_vector(const GridEmbedding& e, const Trajectory& t);

}  // namespace morphevo
