#include "morphevo/encoding_lsystem.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "morphevo/util.hpp"

namespace morphevo {

namespace {

constexpr const char* kSymbolNames[kSymbolCount] = {
    "CoreSym",   "BrickSym",   "VerticalJointSym", "HorizontalJointSym",
    "add_left",  "add_front",  "add_right",
    "move_back", "move_right", "move_front",       "move_left",
};

}  // namespace

const char* symbol_name(Symbol s) { return kSymbolNames[static_cast<int>(s)]; }

Symbol symbol_from_name(std::string_view name) {
  for (int i = 0; i < kSymbolCount; ++i)
    if (name == kSymbolNames[i]) return static_cast<Symbol>(i);
  throw std::runtime_error("unknown symbol '" + std::string(name) + "'");
}

Sentence expand(const Grammar& grammar, int iterations, int sentence_cap) {
  Sentence current = Grammar::axiom();
  for (int it = 0; it < iterations; ++it) {
    Sentence next;
    next.reserve(current.size() * 2);
    for (const Symbol s : current) {
      if (is_module_symbol(s)) {
        const Sentence& rule = grammar.rules[static_cast<std::size_t>(s)];
        next.insert(next.end(), rule.begin(), rule.end());
      } else {
        next.push_back(s);
      }
      if (static_cast<int>(next.size()) >= sentence_cap) break;
    }
    if (static_cast<int>(next.size()) > sentence_cap) next.resize(sentence_cap);
    current = std::move(next);
  }
  return current;
}

namespace {

struct BuildNode {
  ModuleKind kind = ModuleKind::Core;
  Rotation rotation = Rotation::R0;
  int parent = -1;
  std::uint8_t slot = 0;
  std::array<int, 4> child_at{-1, -1, -1, -1};
};

// Slot the mounting command lands on for the cursor's module kind; -1 when
// the kind has no slot in that direction.
int mount_slot(ModuleKind kind, Symbol command) {
  switch (kind) {
    case ModuleKind::Core:
      if (command == Symbol::AddFront) return 0;
      if (command == Symbol::AddRight) return 1;
      return 3;  // AddLeft
    case ModuleKind::Brick:
      if (command == Symbol::AddFront) return 0;
      if (command == Symbol::AddRight) return 1;
      return 2;  // AddLeft
    case ModuleKind::Joint:
      return command == Symbol::AddFront ? 0 : -1;
  }
  return -1;
}

int move_slot(ModuleKind kind, Symbol command) {
  switch (kind) {
    case ModuleKind::Core:
      if (command == Symbol::MoveFront) return 0;
      if (command == Symbol::MoveRight) return 1;
      return 3;  // MoveLeft
    case ModuleKind::Brick:
      if (command == Symbol::MoveFront) return 0;
      if (command == Symbol::MoveRight) return 1;
      return 2;
    case ModuleKind::Joint:
      return command == Symbol::MoveFront ? 0 : -1;
  }
  return -1;
}

ModuleKind module_kind_of(Symbol s) {
  switch (s) {
    case Symbol::BrickSym: return ModuleKind::Brick;
    case Symbol::VerticalJointSym:
    case Symbol::HorizontalJointSym: return ModuleKind::Joint;
    default: return ModuleKind::Core;
  }
}

Rotation rotation_of(Symbol s) {
  return s == Symbol::VerticalJointSym ? Rotation::R90 : Rotation::R0;
}

BodyNode to_body_node(const std::vector<BuildNode>& arena, int index) {
  const BuildNode& b = arena[static_cast<std::size_t>(index)];
  BodyNode node;
  node.kind = b.kind;
  node.rotation = b.rotation;
  node.slot = b.slot;
  for (int slot = 0; slot < 4; ++slot)
    if (b.child_at[static_cast<std::size_t>(slot)] >= 0)
      node.children.push_back(to_body_node(arena, b.child_at[static_cast<std::size_t>(slot)]));
  return node;
}

}  // namespace

BodyGraph decode_sentence(const Sentence& sentence, const LsystemLimits& limits) {
  if (sentence.empty() || sentence.front() != Symbol::CoreSym)
    throw std::runtime_error("sentence must start with CoreSym");

  std::vector<BuildNode> arena(1);
  int cursor = 0;
  int count = 1;

  std::size_t i = 1;
  while (i < sentence.size()) {
    const Symbol s = sentence[i];
    if (is_mounting(s)) {
      if (i + 1 >= sentence.size() || !is_module_symbol(sentence[i + 1])) {
        ++i;  // nothing to mount; the follower is handled on its own
        continue;
      }
      const Symbol module = sentence[i + 1];
      i += 2;  // the module symbol is consumed even when the attach fails
      BuildNode& at = arena[static_cast<std::size_t>(cursor)];
      const int slot = mount_slot(at.kind, s);
      if (slot < 0) continue;
      if (at.child_at[static_cast<std::size_t>(slot)] >= 0) continue;
      if (count >= limits.module_cap) continue;
      if (module == Symbol::CoreSym) continue;
      const ModuleKind kind = module_kind_of(module);
      if (limits.forbid_joint_on_joint && at.kind == ModuleKind::Joint &&
          kind == ModuleKind::Joint)
        continue;
      BuildNode child;
      child.kind = kind;
      child.rotation = rotation_of(module);
      child.parent = cursor;
      child.slot = static_cast<std::uint8_t>(slot);
      arena.push_back(child);
      arena[static_cast<std::size_t>(cursor)].child_at[static_cast<std::size_t>(slot)] =
          static_cast<int>(arena.size()) - 1;
      ++count;
      continue;
    }
    if (is_move(s)) {
      const BuildNode& at = arena[static_cast<std::size_t>(cursor)];
      if (s == Symbol::MoveBack) {
        if (at.parent >= 0) cursor = at.parent;
      } else {
        const int slot = move_slot(at.kind, s);
        if (slot >= 0 && at.child_at[static_cast<std::size_t>(slot)] >= 0)
          cursor = at.child_at[static_cast<std::size_t>(slot)];
      }
    }
    // bare module symbols build nothing
    ++i;
  }

  BodyGraph body;
  body.root = to_body_node(arena, 0);
  return body;
}

Grammar random_grammar(Rng& rng, const LsystemLimits& limits) {
  Grammar g;
  for (int rule = 0; rule < kModuleSymbolCount; ++rule) {
    const std::size_t length = 1 + rng.index(static_cast<std::size_t>(limits.max_rule_length));
    Sentence& body = g.rules[static_cast<std::size_t>(rule)];
    body.reserve(length);
    for (std::size_t i = 0; i < length; ++i)
      body.push_back(static_cast<Symbol>(rng.index(kSymbolCount)));
    if (rule == static_cast<int>(Symbol::CoreSym)) body[0] = Symbol::CoreSym;
  }
  return g;
}

Grammar mutate_grammar(const Grammar& g, Rng& rng, double probability,
                       const LsystemLimits& limits, GrammarMutationStats* stats) {
  Grammar out = g;
  if (!rng.chance(probability)) return out;
  if (stats) stats->attempted = true;

  const std::size_t op = rng.index(3);
  const std::size_t rule_index = rng.index(kModuleSymbolCount);
  Sentence& rule = out.rules[rule_index];
  // Position 0 of the CoreSym production is protected.
  const std::size_t prefix = rule_index == static_cast<std::size_t>(Symbol::CoreSym) ? 1 : 0;

  bool changed = false;
  if (op == 0) {  // insert
    if (static_cast<int>(rule.size()) < limits.max_rule_length) {
      const std::size_t pos = prefix + rng.index(rule.size() - prefix + 1);
      rule.insert(rule.begin() + static_cast<std::ptrdiff_t>(pos),
                  static_cast<Symbol>(rng.index(kSymbolCount)));
      changed = true;
    }
  } else if (op == 1) {  // delete
    if (rule.size() > prefix) {
      const std::size_t pos = prefix + rng.index(rule.size() - prefix);
      rule.erase(rule.begin() + static_cast<std::ptrdiff_t>(pos));
      changed = true;
    }
  } else {  // replace
    if (rule.size() > prefix) {
      const std::size_t pos = prefix + rng.index(rule.size() - prefix);
      const Symbol fresh = static_cast<Symbol>(rng.index(kSymbolCount));
      changed = rule[pos] != fresh;
      rule[pos] = fresh;
    }
  }
  if (stats) stats->changed = changed;
  return out;
}

Grammar crossover_grammar(const Grammar& a, const Grammar& b, Rng& rng) {
  Grammar child;
  for (std::size_t i = 0; i < child.rules.size(); ++i)
    child.rules[i] = rng.chance(0.5) ? a.rules[i] : b.rules[i];
  return child;
}

std::string serialize_grammar(const Grammar& g) {
  std::string out;
  for (int rule = 0; rule < kModuleSymbolCount; ++rule) {
    out += kSymbolNames[rule];
    out += " ->";
    for (const Symbol s : g.rules[static_cast<std::size_t>(rule)]) {
      out += ' ';
      out += symbol_name(s);
    }
    out += '\n';
  }
  return out;
}

Grammar parse_grammar(std::string_view text) {
  Grammar g;
  std::array<bool, kModuleSymbolCount> seen{};
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields{std::string(t)};
    std::string head, arrow;
    fields >> head >> arrow;
    try {
      if (arrow != "->") throw std::runtime_error("expected '->'");
      const Symbol lhs = symbol_from_name(head);
      if (!is_module_symbol(lhs))
        throw std::runtime_error("left side must be a module symbol");
      if (seen[static_cast<std::size_t>(lhs)])
        throw std::runtime_error("duplicate production for " + head);
      seen[static_cast<std::size_t>(lhs)] = true;
      Sentence& rule = g.rules[static_cast<std::size_t>(lhs)];
      std::string token;
      while (fields >> token) rule.push_back(symbol_from_name(token));
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  for (int i = 0; i < kModuleSymbolCount; ++i)
    if (!seen[static_cast<std::size_t>(i)])
      throw std::runtime_error(std::string("missing production for ") + kSymbolNames[i]);
  const Sentence& core = g.rules[static_cast<std::size_t>(Symbol::CoreSym)];
  if (core.empty() || core.front() != Symbol::CoreSym)
    throw std::runtime_error("CoreSym production must begin with CoreSym");
  return g;
}

DecodedLsystem decode_lsystem(const LsystemGenotype& g, const LsystemLimits& limits) {
  DecodedLsystem d;
  const Sentence sentence = expand(g.grammar, limits.iterations, limits.sentence_cap);
  d.body = decode_sentence(sentence, limits);
  const GridEmbedding e = embed(d.body);
  d.network = build_cpg_topology(e, limits.coupling_range);
  apply_cppn_weights(g.cppn, d.network);
  return d;
}

Phenotype LsystemEncoding::decode(const LsystemGenotype& g) const {
  DecodedLsystem d = decode_lsystem(g, limits);
  const int channels = tree_joint_channels(d.body);
  return {std::move(d.body), AnyController(std::move(d.network), channels)};
}

}  // namespace morphevo
