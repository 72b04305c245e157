#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "morphevo/controller.hpp"
#include "morphevo/cppn.hpp"
#include "morphevo/morphology.hpp"
#include "morphevo/rng.hpp"

namespace morphevo {

// Rewriting alphabet: four module symbols, three mounting commands, four
// cursor moves.
enum class Symbol : std::uint8_t {
  CoreSym,
  BrickSym,
  VerticalJointSym,
  HorizontalJointSym,
  AddLeft,
  AddFront,
  AddRight,
  MoveBack,
  MoveRight,
  MoveFront,
  MoveLeft,
};

inline constexpr int kSymbolCount = 11;
inline constexpr int kModuleSymbolCount = 4;

const char* symbol_name(Symbol s);
Symbol symbol_from_name(std::string_view name);

constexpr bool is_module_symbol(Symbol s) {
  return static_cast<int>(s) < kModuleSymbolCount;
}
constexpr bool is_mounting(Symbol s) {
  return s == Symbol::AddLeft || s == Symbol::AddFront || s == Symbol::AddRight;
}
constexpr bool is_move(Symbol s) {
  return s == Symbol::MoveBack || s == Symbol::MoveRight || s == Symbol::MoveFront ||
         s == Symbol::MoveLeft;
}

using Sentence = std::vector<Symbol>;

// One production per module symbol, indexed by the symbol value. Command
// symbols always rewrite to themselves. The CoreSym production keeps a
// protected leading CoreSym so every expansion starts with the core.
struct Grammar {
  std::array<Sentence, kModuleSymbolCount> rules;

  static Sentence axiom() { return {Symbol::CoreSym}; }
};

struct LsystemLimits {
  int iterations = 3;
  int sentence_cap = 300;
  int max_rule_length = 10;
  int module_cap = 30;
  bool forbid_joint_on_joint = true;
  int coupling_range = 3;  // Manhattan distance for oscillator connections
};

// Simultaneous replacement of every symbol, repeated `iterations` times;
// each pass truncates to the sentence cap.
Sentence expand(const Grammar& grammar, int iterations, int sentence_cap);

// Walks the sentence with a construction cursor starting on the core.
// A mounting command consumes the module symbol after it (if there is one)
// and attaches it at the commanded slot when that is legal; failed attaches
// still consume the module symbol. Moves shift the cursor along existing
// modules and stay put when there is nothing to move to.
BodyGraph decode_sentence(const Sentence& sentence, const LsystemLimits& limits);

Grammar random_grammar(Rng& rng, const LsystemLimits& limits);

struct GrammarMutationStats {
  bool attempted = false;
  bool changed = false;
};

// With the given probability, applies one of insert / delete / replace at a
// random position of a random production.
Grammar mutate_grammar(const Grammar& g, Rng& rng, double probability,
                       const LsystemLimits& limits, GrammarMutationStats* stats = nullptr);

// Each production comes from either parent with equal probability.
Grammar crossover_grammar(const Grammar& a, const Grammar& b, Rng& rng);

// One production per line:  CoreSym -> CoreSym add_front BrickSym
std::string serialize_grammar(const Grammar& g);
Grammar parse_grammar(std::string_view text);

// Indirect genotype: body grammar plus a pattern network that fills in the
// oscillator weights over the joint layout.
struct LsystemGenotype {
  Grammar grammar;
  CppnGenome cppn;
};

struct DecodedLsystem {
  BodyGraph body;
  CpgNetwork network;
};

DecodedLsystem decode_lsystem(const LsystemGenotype& g, const LsystemLimits& limits);

// Adapter used by the evolution engine. Grammar mutation is gated by the
// aggregate probability; the pattern network mutates every time with its own
// per-operator rates.
struct LsystemEncoding {
  LsystemLimits limits;
  double grammar_mutation = 0.59;
  CppnMutationRates cppn_rates;
  InnovationRegistry registry;

  using Genotype = LsystemGenotype;

  std::string name() const { return "lsystem"; }
  LsystemGenotype random(Rng& rng) {
    return {random_grammar(rng, limits), random_cppn(rng)};
  }
  LsystemGenotype mutate(const LsystemGenotype& g, Rng& rng) {
    return {mutate_grammar(g.grammar, rng, grammar_mutation, limits),
            mutate_cppn(g.cppn, rng, cppn_rates, registry)};
  }
  LsystemGenotype crossover(const LsystemGenotype& a, const LsystemGenotype& b, double fa,
                            double fb, Rng& rng) {
    return {crossover_grammar(a.grammar, b.grammar, rng),
            crossover_cppn(a.cppn, b.cppn, fa >= fb, rng)};
  }
  Phenotype decode(const LsystemGenotype& g) const;
};

}  // namespace morphevo
