#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "morphevo/controller.hpp"
#include "morphevo/rng.hpp"

namespace morphevo {

enum class Activation : std::uint8_t { Identity, Sigmoid, Gaussian, Sine };
enum class NodeRole : std::uint8_t { Input, Bias, Output, Hidden };

const char* activation_name(Activation a);
const char* role_name(NodeRole r);

// Inputs are the two queried substrate points, four coordinates each:
// x1 y1 z1 w1 x2 y2 z2 w2. A bias node follows, then the single output.
inline constexpr int kCppnInputs = 8;
inline constexpr int kCppnBiasId = 8;
inline constexpr int kCppnOutputId = 9;
inline constexpr double kCppnOutputClamp = 3.0;

struct CppnNode {
  int id = 0;
  NodeRole role = NodeRole::Hidden;
  Activation activation = Activation::Identity;
};

struct CppnConnection {
  int innovation = 0;
  int source = 0;
  int target = 0;
  double weight = 0.0;
  bool enabled = true;
};

struct CppnGenome {
  std::vector<CppnNode> nodes;            // sorted by id
  std::vector<CppnConnection> connections;  // sorted by innovation

  const CppnNode* find_node(int id) const;
  bool has_connection(int source, int target) const;  // enabled or not
  int hidden_count() const;
  int enabled_count() const;

  // True when following source -> target over every connection, enabled or
  // not, never closes a loop.
  bool is_feedforward() const;

  std::vector<std::string> structural_problems() const;
};

// Run-wide bookkeeping that makes identical structural mutations reuse the
// same innovation numbers and node ids, so crossover can align genes.
class InnovationRegistry {
public:
  InnovationRegistry();

  int connection_innovation(int source, int target);

  struct Split {
    int node_id = 0;
    int in_innovation = 0;
    int out_innovation = 0;
  };
  // Splitting the same connection (by innovation) always yields the same new
  // node id and connection innovations within one registry's lifetime.
  Split split(int connection_innovation, int source, int target);

private:
  std::map<std::pair<int, int>, int> connections_;
  std::map<int, Split> splits_;
  int next_innovation_ = 0;
  int next_node_id_ = 0;
};

// Minimal starting genome: every input and the bias wired straight to the
// output with the given weights-free skeleton; weights are zero.
CppnGenome cppn_skeleton();

// Skeleton with uniform [-1, 1] weights.
CppnGenome random_cppn(Rng& rng);

double eval_cppn(const CppnGenome& genome, std::span<const double> inputs);

struct CppnMutationRates {
  double weight_perturb = 0.8;
  double weight_sigma = 0.5;
  double add_connection = 0.10;
  double add_node = 0.05;
  double toggle_enable = 0.02;
  double change_activation = 0.05;
};

CppnGenome mutate_cppn(const CppnGenome& genome, Rng& rng, const CppnMutationRates& rates,
                       InnovationRegistry& registry);

// Child keeps the fitter parent's structure; genes matched by innovation take
// weight and enabled state from either parent with equal probability. Pass
// a_fitter = true on ties.
CppnGenome crossover_cppn(const CppnGenome& a, const CppnGenome& b, bool a_fitter, Rng& rng);

std::string serialize_cppn(const CppnGenome& genome);
CppnGenome parse_cppn(std::string_view text);

// Joint grid cells normalised per axis to [-1, 1] over the joints' extent;
// an axis with no spread maps to 0.
std::vector<Vec3d> substrate_positions(const CpgNetwork& net);

// Fills every node's cross weight (same point, w = -1 vs +1) and every
// connection weight (the two x neurons, w = -1 both) from the genome.
void apply_cppn_weights(const CppnGenome& genome, CpgNetwork& net);

}  // namespace morphevo
