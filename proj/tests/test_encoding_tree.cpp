#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "doctest.h"
#include "morphevo/encoding_tree.hpp"
#include "morphevo/util.hpp"

using namespace morphevo;

namespace {

void collect_signatures(const GenotypeNode& node, std::map<std::string, int>& out) {
  std::string sig = kind_name(node.kind);
  sig += '/';
  sig += std::to_string(rotation_degrees(node.rotation));
  if (node.kind == ModuleKind::Joint) {
    sig += '/';
    sig += fmt_double(node.params.frequency);
    sig += ',';
    sig += fmt_double(node.params.offset);
    sig += ',';
    sig += fmt_double(node.params.amplitude);
  }
  ++out[sig];
  for (const auto& c : node.children) collect_signatures(c, out);
}

bool body_is_valid(const TreeGenotype& g, const TreeLimits& limits) {
  ValidationLimits vl;
  vl.module_cap = limits.module_cap;
  vl.forbid_joint_on_joint = limits.forbid_joint_on_joint;
  return validate(decode_tree(g).body, vl).ok();
}

bool params_in_ranges(const GenotypeNode& node, const OscillatorRanges& r) {
  if (node.kind == ModuleKind::Joint) {
    if (node.params.frequency < r.frequency_min || node.params.frequency > r.frequency_max)
      return false;
    if (node.params.offset < r.offset_min || node.params.offset > r.offset_max) return false;
    if (node.params.amplitude < r.amplitude_min || node.params.amplitude > r.amplitude_max)
      return false;
  }
  for (const auto& c : node.children)
    if (!params_in_ranges(c, r)) return false;
  return true;
}

}  // namespace

TEST_CASE("random trees are valid, capped and deterministic") {
  const TreeLimits limits;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    const TreeGenotype g = random_tree(rng, limits);
    CAPTURE(seed);
    REQUIRE(body_is_valid(g, limits));
    CHECK(genotype_node_count(g) >= 1);
    CHECK(genotype_node_count(g) <= limits.module_cap);
    CHECK(params_in_ranges(g.root, limits.ranges));
  }
  Rng r1(42), r2(42);
  CHECK(serialize_tree_genotype(random_tree(r1, limits)) ==
        serialize_tree_genotype(random_tree(r2, limits)));
}

TEST_CASE("decoding pairs one oscillator with each joint in tree order") {
  const TreeGenotype g = parse_tree_genotype(
      "Core(0)[0:Joint(90;0.5,0.1,0.9)[0:Brick(0)],2:Joint(0;1.5,-0.2,0.3)]");
  const DecodedTree d = decode_tree(g);
  CHECK(serialize_body(d.body) == "Core(0)[0:Joint(90)[0:Brick(0)],2:Joint(0)]");
  REQUIRE(d.brain.oscillators.size() == 2);
  CHECK(d.brain.oscillators[0].frequency == 0.5);
  CHECK(d.brain.oscillators[0].offset == 0.1);
  CHECK(d.brain.oscillators[0].amplitude == 0.9);
  CHECK(d.brain.oscillators[1].frequency == 1.5);
}

TEST_CASE("genotype text round trips") {
  const std::string text =
      "Core(0)[0:Joint(90;0.5,0.1,0.9)[0:Brick(0)[1:Joint(0;1,0,0.5)]],3:Brick(90)]";
  CHECK(serialize_tree_genotype(parse_tree_genotype(text)) == text);

  // Joints without a parameter list get the defaults.
  const TreeGenotype g = parse_tree_genotype("Core(0)[0:Joint(90)]");
  CHECK(serialize_tree_genotype(g) == "Core(0)[0:Joint(90;1,0,0.5)]");
}

TEST_CASE("genotype text rejects misplaced parameters") {
  CHECK_THROWS(parse_tree_genotype("Core(0)[0:Brick(0;1,0,0.5)]"));
  CHECK_THROWS(parse_tree_genotype("Core(0)[0:Joint(0;1,0)]"));
  CHECK_THROWS(parse_tree_genotype("Core(0)[0:Joint(0;1,0,0.5,0.2)]"));
}

TEST_CASE("random trees survive serialisation") {
  const TreeLimits limits;
  for (std::uint64_t seed = 300; seed < 350; ++seed) {
    Rng rng(seed);
    const TreeGenotype g = random_tree(rng, limits);
    const std::string text = serialize_tree_genotype(g);
    CHECK(serialize_tree_genotype(parse_tree_genotype(text)) == text);
  }
}

TEST_CASE("the aggregate body mutation rate lands on its target") {
  const TreeLimits limits;
  const TreeMutationRates rates;
  Rng rng(2024);
  const TreeGenotype base = random_tree(rng, limits);

  const int trials = 10000;
  int mutated = 0;
  long gates = 0;
  for (int i = 0; i < trials; ++i) {
    TreeMutationStats stats;
    (void)mutate_tree(base, rng, limits, rates, &stats);
    if (stats.gates_fired > 0) ++mutated;
    gates += stats.gates_fired;
  }
  const double aggregate = static_cast<double>(mutated) / trials;
  CHECK(aggregate == doctest::Approx(0.59).epsilon(0.035));
  const double per_gate = static_cast<double>(gates) / (4.0 * trials);
  CHECK(per_gate == doctest::Approx(rates.per_operator()).epsilon(0.06));
}

TEST_CASE("the per-operator rate composes back to the aggregate") {
  const TreeMutationRates rates;
  const double p = rates.per_operator();
  CHECK(1.0 - std::pow(1.0 - p, 4) == doctest::Approx(0.59).epsilon(1e-12));
}

TEST_CASE("mutation storms never break the body rules") {
  const TreeLimits limits;
  const TreeMutationRates rates;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng rng(seed * 7 + 1);
    TreeGenotype g = random_tree(rng, limits);
    for (int i = 0; i < 100; ++i) {
      g = mutate_tree(g, rng, limits, rates);
      CAPTURE(seed);
      CAPTURE(i);
      REQUIRE(body_is_valid(g, limits));
      REQUIRE(genotype_node_count(g) <= limits.module_cap);
      REQUIRE(params_in_ranges(g.root, limits.ranges));
    }
  }
}

TEST_CASE("zeroed rates leave the genotype untouched") {
  const TreeLimits limits;
  TreeMutationRates rates;
  rates.body_aggregate = 0.0;
  rates.param_rate = 0.0;
  Rng rng(5);
  const TreeGenotype g = random_tree(rng, limits);
  CHECK(serialize_tree_genotype(mutate_tree(g, rng, limits, rates)) ==
        serialize_tree_genotype(g));
}

TEST_CASE("parameter mutation touches every joint and respects the ranges") {
  const TreeLimits limits;
  TreeMutationRates rates;
  rates.body_aggregate = 0.0;
  rates.param_rate = 1.0;

  Rng rng(8);
  TreeGenotype g = parse_tree_genotype(
      "Core(0)[0:Joint(0;1,0,0.5)[0:Brick(0)[0:Joint(90;0.5,0.5,0.5)]],2:Joint(0;2,-1,1)]");
  TreeMutationStats stats;
  const TreeGenotype m = mutate_tree(g, rng, limits, rates, &stats);
  CHECK(stats.gates_fired == 0);
  CHECK(stats.joints_perturbed == 3);
  CHECK(serialize_body(decode_tree(m).body) == serialize_body(decode_tree(g).body));
  CHECK(params_in_ranges(m.root, limits.ranges));
  CHECK(serialize_tree_genotype(m) != serialize_tree_genotype(g));
}

TEST_CASE("crossover grafts only material from the two parents") {
  const TreeLimits limits;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    Rng rng(seed + 1000);
    const TreeGenotype a = random_tree(rng, limits);
    const TreeGenotype b = random_tree(rng, limits);
    const TreeGenotype child = crossover_tree(a, b, rng, limits);

    CAPTURE(seed);
    REQUIRE(body_is_valid(child, limits));
    CHECK(genotype_node_count(child) <= limits.module_cap);

    std::map<std::string, int> pool, got;
    collect_signatures(a.root, pool);
    collect_signatures(b.root, pool);
    collect_signatures(child.root, got);
    for (const auto& [sig, count] : got) {
      CAPTURE(sig);
      CHECK(count <= pool[sig]);
    }
  }
}

TEST_CASE("crossover is deterministic under the seed") {
  const TreeLimits limits;
  Rng ra(64), rb(64);
  const TreeGenotype a = random_tree(ra, limits);
  const TreeGenotype b = random_tree(ra, limits);
  const TreeGenotype a2 = random_tree(rb, limits);
  const TreeGenotype b2 = random_tree(rb, limits);
  CHECK(serialize_tree_genotype(crossover_tree(a, b, ra, limits)) ==
        serialize_tree_genotype(crossover_tree(a2, b2, rb, limits)));
}

TEST_CASE("the encoding adapter decodes to a runnable phenotype") {
  TreeEncoding enc;
  Rng rng(3);
  const TreeGenotype g = enc.random(rng);
  const Phenotype ph = enc.decode(g);
  CHECK(ph.controller.channels() == tree_joint_channels(ph.body));
  CHECK(enc.name() == "tree");
}
