#pragma once

#include "morphevo/controller.hpp"
#include "morphevo/morphology.hpp"
#include "morphevo/traits.hpp"

namespace morphevo {

// Kinematic locomotion surrogate on flat ground. Deterministic: same body,
// controller and config always produce the same trajectory bytes.
struct SimConfig {
  double duration_s = 30.0;
  double control_dt_s = 0.005;
  double sample_period_s = 0.1;
  double cell_size_cm = 4.0;

  // Modules within this height of the lowest one count as ground contacts.
  double contact_tolerance_cells = 0.1;
  // Procrustes weight for contacts sliding outward; inward-pulling contacts
  // anchor with weight 1.
  double slip_weight = 0.2;
  // Full-scale joint deflection for a controller output of +-1.
  double joint_range_rad = 1.5707963267948966;

  // Applied to recorded positions only; the dynamics are translation
  // invariant by construction.
  double start_x_cells = 0.0;
  double start_y_cells = 0.0;

  // Throws when the sample period or duration is not a whole number of
  // control steps.
  void check() const;

  int control_steps() const;
  int steps_per_sample() const;
};

Trajectory simulate(const BodyGraph& body, AnyController controller, const SimConfig& cfg);

inline Trajectory simulate_phenotype(const Phenotype& ph, const SimConfig& cfg) {
  return simulate(ph.body, ph.controller, cfg);
}

}  // namespace morphevo
