#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "morphevo/controller.hpp"
#include "morphevo/morphology.hpp"
#include "morphevo/rng.hpp"

namespace morphevo {

// Direct encoding: the genotype is itself a module tree, with an oscillator
// parameter triple on every joint.
struct GenotypeNode {
  ModuleKind kind = ModuleKind::Brick;
  Rotation rotation = Rotation::R0;
  std::uint8_t slot = 0;
  Oscillator params;  // meaningful on joints only
  std::vector<GenotypeNode> children;
};

struct TreeGenotype {
  GenotypeNode root{ModuleKind::Core, Rotation::R0, 0, {}, {}};
};

int genotype_node_count(const TreeGenotype& g);
int genotype_joint_count(const TreeGenotype& g);

struct TreeLimits {
  int module_cap = 30;
  int max_init_depth = 4;
  double init_fill = 0.5;
  bool forbid_joint_on_joint = true;
  OscillatorRanges ranges;
};

struct TreeMutationRates {
  // Probability that at least one of the four body operators fires; each
  // operator gates independently at the per_operator() rate derived from it.
  double body_aggregate = 0.59;
  double param_rate = 0.2;            // per joint
  double param_sigma_fraction = 0.1;  // of each parameter's range width

  double per_operator() const { return 1.0 - std::pow(1.0 - body_aggregate, 0.25); }
};

struct TreeMutationStats {
  int gates_fired = 0;    // body operator probability gates that fired
  int ops_changed = 0;    // gated operators that actually altered the tree
  int joints_perturbed = 0;
};

TreeGenotype random_tree(Rng& rng, const TreeLimits& limits);

// Add / delete / duplicate / swap subtree, each gated independently, then
// per-joint Gaussian parameter perturbation. Never violates the module cap
// or the joint-on-joint rule.
TreeGenotype mutate_tree(const TreeGenotype& g, Rng& rng, const TreeLimits& limits,
                         const TreeMutationRates& rates, TreeMutationStats* stats = nullptr);

// Replaces a random subtree of a copy of `a` with a copy of a random subtree
// of `b`, then trims breadth-first back to the module cap. A graft that would
// put a joint under a joint is resampled up to ten times; if none fits the
// copy of `a` is returned unchanged.
TreeGenotype crossover_tree(const TreeGenotype& a, const TreeGenotype& b, Rng& rng,
                            const TreeLimits& limits);

struct DecodedTree {
  BodyGraph body;
  SineOscillatorBrain brain;  // one oscillator per joint, tree depth-first order
};

DecodedTree decode_tree(const TreeGenotype& g);

// Same nested format as the body text, with joint parameters after ';':
//   Core(0)[0:Joint(90;1.5,0,0.75)[0:Brick(0)]]
std::string serialize_tree_genotype(const TreeGenotype& g);
TreeGenotype parse_tree_genotype(std::string_view text);

// Adapter used by the evolution engine.
struct TreeEncoding {
  TreeLimits limits;
  TreeMutationRates rates;

  using Genotype = TreeGenotype;

  std::string name() const { return "tree"; }
  TreeGenotype random(Rng& rng) const { return random_tree(rng, limits); }
  TreeGenotype mutate(const TreeGenotype& g, Rng& rng) const {
    return mutate_tree(g, rng, limits, rates);
  }
  TreeGenotype crossover(const TreeGenotype& a, const TreeGenotype& b, double, double,
                         Rng& rng) const {
    return crossover_tree(a, b, rng, limits);
  }
  Phenotype decode(const TreeGenotype& g) const;
};

}  // namespace morphevo
