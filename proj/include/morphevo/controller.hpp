#pragma once

#include <span>
#include <variant>
#include <vector>

#include "morphevo/geometry.hpp"
#include "morphevo/morphology.hpp"

namespace morphevo {

// Parameter window for sine oscillators attached to joints.
struct OscillatorRanges {
  double frequency_min = 0.1, frequency_max = 2.0;
  double offset_min = -1.0, offset_max = 1.0;
  double amplitude_min = 0.0, amplitude_max = 1.0;
};

struct Oscillator {
  double frequency = 1.0;
  double offset = 0.0;
  double amplitude = 0.5;
};

// One open-loop sine per joint channel:
//   out = clamp(offset + amplitude * sin(2*pi*frequency*t), -1, 1)
struct SineOscillatorBrain {
  std::vector<Oscillator> oscillators;

  void outputs_at(double t, std::span<double> out) const;
};

// Coupled-oscillator network with one node per embedded joint. Each node
// carries an (x, y) neuron pair evolving as
//   dx/dt =  w * y + sum over neighbours of c * x_neighbour
//   dy/dt = -w * x
// where w is the node's internal cross weight and c the connection weight
// (symmetric). The x neuron, clamped to [-1, 1], drives the joint.
struct CpgNode {
  int tree_joint_index = -1;
  Vec3i cell;
  double cross_weight = 0.0;
  double x = 0.0, y = 1.0;
};

struct CpgConnection {
  int a = 0, b = 0;  // node indices, a < b
  double weight = 0.0;
};

struct CpgNetwork {
  std::vector<CpgNode> nodes;
  std::vector<CpgConnection> connections;

  int parameter_count() const {
    return static_cast<int>(nodes.size() + connections.size());
  }

  // The inverse coupling (y neuron back onto x) is the negated weight; it is
  // derived rather than stored so the pair can never fall out of step.
  double cross_weight_yx(int node) const { return -nodes[node].cross_weight; }

  void reset_state();
  void step_rk4(double dt);

  // Writes each node's clamped x into out[tree_joint_index]; untouched
  // channels (joints dropped from the grid) are zeroed first.
  void outputs(std::span<double> out) const;

  // Integrator workspace, sized on first use.
  std::vector<double> rk_scratch;
};

// One node per embedded joint, connected when the joints' grid cells are
// within the given Manhattan distance. Weights start at zero.
CpgNetwork build_cpg_topology(const GridEmbedding& e, int max_manhattan = 3);

// Uniform stepping wrapper over the two brain kinds. Channels follow whole
// tree depth-first joint order.
class AnyController {
public:
  AnyController() : channels_(0) {}
  AnyController(SineOscillatorBrain brain, int channels);
  AnyController(CpgNetwork network, int channels);

  void reset();
  void advance(double dt);
  void write_outputs(std::span<double> out) const;
  int channels() const { return channels_; }

private:
  std::variant<SineOscillatorBrain, CpgNetwork> impl_;
  int channels_ = 0;
  double time_ = 0.0;
};

// A decoded robot: its body and a ready-to-run controller.
struct Phenotype {
  BodyGraph body;
  AnyController controller;
};

}  // namespace morphevo
