#include "morphevo/encoding_tree.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <stdexcept>

#include "morphevo/util.hpp"

namespace morphevo {

namespace {

int node_count(const GenotypeNode& n) {
  int acc = 1;
  for (const auto& c : n.children) acc += node_count(c);
  return acc;
}

int joint_count_from(const GenotypeNode& n) {
  int acc = n.kind == ModuleKind::Joint ? 1 : 0;
  for (const auto& c : n.children) acc += joint_count_from(c);
  return acc;
}

}  // namespace

int genotype_node_count(const TreeGenotype& g) { return node_count(g.root); }
int genotype_joint_count(const TreeGenotype& g) { return joint_count_from(g.root); }

namespace {

Oscillator random_params(Rng& rng, const OscillatorRanges& r) {
  Oscillator o;
  o.frequency = rng.range(r.frequency_min, r.frequency_max);
  o.offset = rng.range(r.offset_min, r.offset_max);
  o.amplitude = rng.range(r.amplitude_min, r.amplitude_max);
  return o;
}

void grow(GenotypeNode& node, int depth, int& count, Rng& rng, const TreeLimits& limits) {
  if (depth >= limits.max_init_depth) return;
  for (int slot = 0; slot < slot_count(node.kind); ++slot) {
    if (count >= limits.module_cap) return;
    if (!rng.chance(limits.init_fill)) continue;
    GenotypeNode child;
    child.kind = node.kind == ModuleKind::Joint
                     ? ModuleKind::Brick
                     : (rng.chance(0.5) ? ModuleKind::Brick : ModuleKind::Joint);
    child.rotation = rng.chance(0.5) ? Rotation::R0 : Rotation::R90;
    child.slot = static_cast<std::uint8_t>(slot);
    child.params = random_params(rng, limits.ranges);
    ++count;
    node.children.push_back(std::move(child));
    grow(node.children.back(), depth + 1, count, rng, limits);
  }
}

// Reference to a non-root node: where it hangs plus its depth-first interval,
// which makes ancestor tests cheap.
struct NodeRef {
  GenotypeNode* parent = nullptr;
  std::size_t child_index = 0;
  int enter = 0, exit = 0;

  GenotypeNode& node() const { return parent->children[child_index]; }
};

void collect_refs(GenotypeNode& parent, std::vector<NodeRef>& out, int& clock) {
  for (std::size_t i = 0; i < parent.children.size(); ++i) {
    const std::size_t self = out.size();
    out.push_back({&parent, i, clock++, -1});
    collect_refs(parent.children[i], out, clock);
    out[self].exit = clock++;
  }
}

std::vector<NodeRef> collect_refs(GenotypeNode& root) {
  std::vector<NodeRef> out;
  int clock = 0;
  collect_refs(root, out, clock);
  return out;
}

bool intervals_disjoint(const NodeRef& a, const NodeRef& b) {
  return a.exit < b.enter || b.exit < a.enter;
}

struct OpenSlot {
  GenotypeNode* owner = nullptr;
  int slot = 0;
};

void collect_open_slots(GenotypeNode& node, std::vector<OpenSlot>& out) {
  for (int slot = 0; slot < slot_count(node.kind); ++slot) {
    const bool occupied = std::any_of(node.children.begin(), node.children.end(),
                                      [slot](const GenotypeNode& c) { return c.slot == slot; });
    if (!occupied) out.push_back({&node, slot});
  }
  for (auto& child : node.children) collect_open_slots(child, out);
}

void attach_sorted(GenotypeNode& owner, GenotypeNode child) {
  const auto pos = std::find_if(owner.children.begin(), owner.children.end(),
                                [&](const GenotypeNode& c) { return c.slot > child.slot; });
  owner.children.insert(pos, std::move(child));
}

bool op_add(TreeGenotype& g, Rng& rng, const TreeLimits& limits) {
  if (node_count(g.root) >= limits.module_cap) return false;
  std::vector<OpenSlot> open;
  collect_open_slots(g.root, open);
  if (open.empty()) return false;
  const OpenSlot site = open[rng.index(open.size())];
  GenotypeNode child;
  child.kind = site.owner->kind == ModuleKind::Joint
                   ? ModuleKind::Brick
                   : (rng.chance(0.5) ? ModuleKind::Brick : ModuleKind::Joint);
  child.rotation = rng.chance(0.5) ? Rotation::R0 : Rotation::R90;
  child.slot = static_cast<std::uint8_t>(site.slot);
  child.params = random_params(rng, limits.ranges);
  attach_sorted(*site.owner, std::move(child));
  return true;
}

bool op_delete(TreeGenotype& g, Rng& rng) {
  std::vector<NodeRef> refs = collect_refs(g.root);
  if (refs.empty()) return false;
  const NodeRef victim = refs[rng.index(refs.size())];
  victim.parent->children.erase(victim.parent->children.begin() +
                                static_cast<std::ptrdiff_t>(victim.child_index));
  return true;
}

GenotypeNode bfs_trimmed(const GenotypeNode& node,
                         const std::map<const GenotypeNode*, int>& order, int cap);

void truncate_bfs(TreeGenotype& g, int cap) {
  if (node_count(g.root) <= cap) return;
  std::map<const GenotypeNode*, int> order;
  std::deque<const GenotypeNode*> queue{&g.root};
  int next = 0;
  while (!queue.empty()) {
    const GenotypeNode* n = queue.front();
    queue.pop_front();
    order[n] = next++;
    for (const auto& c : n->children) queue.push_back(&c);
  }
  g.root = bfs_trimmed(g.root, order, cap);
}

GenotypeNode bfs_trimmed(const GenotypeNode& node,
                         const std::map<const GenotypeNode*, int>& order, int cap) {
  GenotypeNode out = node;
  out.children.clear();
  for (const auto& c : node.children)
    if (order.at(&c) < cap) out.children.push_back(bfs_trimmed(c, order, cap));
  return out;
}

bool op_duplicate(TreeGenotype& g, Rng& rng, const TreeLimits& limits) {
  std::vector<NodeRef> refs = collect_refs(g.root);
  if (refs.empty()) return false;
  const GenotypeNode copy = refs[rng.index(refs.size())].node();

  std::vector<OpenSlot> open;
  collect_open_slots(g.root, open);
  if (limits.forbid_joint_on_joint && copy.kind == ModuleKind::Joint)
    std::erase_if(open, [](const OpenSlot& s) { return s.owner->kind == ModuleKind::Joint; });
  if (open.empty()) return false;

  const OpenSlot site = open[rng.index(open.size())];
  GenotypeNode grafted = copy;
  grafted.slot = static_cast<std::uint8_t>(site.slot);
  attach_sorted(*site.owner, std::move(grafted));
  truncate_bfs(g, limits.module_cap);
  return true;
}

bool op_swap(TreeGenotype& g, Rng& rng, const TreeLimits& limits) {
  std::vector<NodeRef> refs = collect_refs(g.root);
  if (refs.size() < 2) return false;
  for (int attempt = 0; attempt < 10; ++attempt) {
    const NodeRef& a = refs[rng.index(refs.size())];
    const NodeRef& b = refs[rng.index(refs.size())];
    if (!intervals_disjoint(a, b)) continue;
    if (limits.forbid_joint_on_joint &&
        ((a.parent->kind == ModuleKind::Joint && b.node().kind == ModuleKind::Joint) ||
         (b.parent->kind == ModuleKind::Joint && a.node().kind == ModuleKind::Joint)))
      continue;
    GenotypeNode& na = a.node();
    GenotypeNode& nb = b.node();
    const std::uint8_t slot_a = na.slot, slot_b = nb.slot;
    std::swap(na, nb);
    na.slot = slot_a;
    nb.slot = slot_b;
    return true;
  }
  return false;
}

void perturb_params(GenotypeNode& node, Rng& rng, const TreeLimits& limits,
                    const TreeMutationRates& rates, TreeMutationStats* stats) {
  if (node.kind == ModuleKind::Joint && rng.chance(rates.param_rate)) {
    const OscillatorRanges& r = limits.ranges;
    auto nudge = [&](double v, double lo, double hi) {
      return std::clamp(v + rng.gaussian(0.0, rates.param_sigma_fraction * (hi - lo)), lo, hi);
    };
    node.params.frequency = nudge(node.params.frequency, r.frequency_min, r.frequency_max);
    node.params.offset = nudge(node.params.offset, r.offset_min, r.offset_max);
    node.params.amplitude = nudge(node.params.amplitude, r.amplitude_min, r.amplitude_max);
    if (stats) ++stats->joints_perturbed;
  }
  for (auto& child : node.children) perturb_params(child, rng, limits, rates, stats);
}

}  // namespace

TreeGenotype random_tree(Rng& rng, const TreeLimits& limits) {
  TreeGenotype g;
  int count = 1;
  grow(g.root, 0, count, rng, limits);
  return g;
}

TreeGenotype mutate_tree(const TreeGenotype& g, Rng& rng, const TreeLimits& limits,
                         const TreeMutationRates& rates, TreeMutationStats* stats) {
  TreeGenotype out = g;
  const double p = rates.per_operator();

  const auto gated = [&](auto&& op) {
    if (!rng.chance(p)) return;
    if (stats) ++stats->gates_fired;
    const bool changed = op();
    if (stats && changed) ++stats->ops_changed;
  };

  gated([&] { return op_add(out, rng, limits); });
  gated([&] { return op_delete(out, rng); });
  gated([&] { return op_duplicate(out, rng, limits); });
  gated([&] { return op_swap(out, rng, limits); });

  perturb_params(out.root, rng, limits, rates, stats);
  return out;
}

TreeGenotype crossover_tree(const TreeGenotype& a, const TreeGenotype& b, Rng& rng,
                            const TreeLimits& limits) {
  TreeGenotype child = a;
  std::vector<NodeRef> sites = collect_refs(child.root);
  if (sites.empty()) return child;

  TreeGenotype donor = b;
  std::vector<NodeRef> grafts = collect_refs(donor.root);
  if (grafts.empty()) return child;

  const NodeRef site = sites[rng.index(sites.size())];
  for (int attempt = 0; attempt < 10; ++attempt) {
    const NodeRef graft = grafts[rng.index(grafts.size())];
    if (limits.forbid_joint_on_joint && site.parent->kind == ModuleKind::Joint &&
        graft.node().kind == ModuleKind::Joint)
      continue;
    GenotypeNode replacement = graft.node();
    replacement.slot = site.node().slot;
    site.node() = std::move(replacement);
    truncate_bfs(child, limits.module_cap);
    return child;
  }
  return child;  // no compatible graft; keep the original subtree
}

namespace {

void decode_node(const GenotypeNode& g, BodyNode& out, std::vector<Oscillator>& oscillators) {
  out.kind = g.kind;
  out.rotation = g.rotation;
  out.slot = g.slot;
  if (g.kind == ModuleKind::Joint) oscillators.push_back(g.params);
  out.children.resize(g.children.size());
  for (std::size_t i = 0; i < g.children.size(); ++i)
    decode_node(g.children[i], out.children[i], oscillators);
}

void serialize_node(const GenotypeNode& node, std::string& out) {
  out += kind_name(node.kind);
  out += '(';
  out += std::to_string(rotation_degrees(node.rotation));
  if (node.kind == ModuleKind::Joint) {
    out += ';';
    out += fmt_double(node.params.frequency);
    out += ',';
    out += fmt_double(node.params.offset);
    out += ',';
    out += fmt_double(node.params.amplitude);
  }
  out += ')';
  if (!node.children.empty()) {
    out += '[';
    bool first = true;
    for (const auto& child : node.children) {
      if (!first) out += ',';
      first = false;
      out += std::to_string(child.slot);
      out += ':';
      serialize_node(child, out);
    }
    out += ']';
  }
}

GenotypeNode from_text(const TextNode& t) {
  GenotypeNode node;
  node.kind = t.kind;
  node.rotation = t.rotation;
  node.slot = t.slot;
  if (t.kind == ModuleKind::Joint) {
    if (t.params.size() == 3) {
      node.params.frequency = t.params[0];
      node.params.offset = t.params[1];
      node.params.amplitude = t.params[2];
    } else if (!t.params.empty()) {
      throw std::runtime_error("joint takes exactly 3 parameters");
    }
  } else if (!t.params.empty()) {
    throw std::runtime_error("parameters are only valid on joints");
  }
  node.children.reserve(t.children.size());
  for (const auto& c : t.children) node.children.push_back(from_text(c));
  return node;
}

}  // namespace

DecodedTree decode_tree(const TreeGenotype& g) {
  DecodedTree d;
  decode_node(g.root, d.body.root, d.brain.oscillators);
  return d;
}

std::string serialize_tree_genotype(const TreeGenotype& g) {
  std::string out;
  serialize_node(g.root, out);
  return out;
}

TreeGenotype parse_tree_genotype(std::string_view text) {
  const TextNode parsed = parse_module_text(text);
  if (parsed.kind != ModuleKind::Core)
    throw std::runtime_error("genotype text must start with a Core module");
  TreeGenotype g;
  g.root = from_text(parsed);
  return g;
}

Phenotype TreeEncoding::decode(const TreeGenotype& g) const {
  DecodedTree d = decode_tree(g);
  const int channels = static_cast<int>(d.brain.oscillators.size());
  return {std::move(d.body), AnyController(std::move(d.brain), channels)};
}

}  // namespace morphevo
