#include "morphevo/cppn.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "morphevo/util.hpp"

namespace morphevo {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Gaussian: return "gaussian";
    case Activation::Sine: return "sine";
  }
  return "?";
}

const char* role_name(NodeRole r) {
  switch (r) {
    case NodeRole::Input: return "input";
    case NodeRole::Bias: return "bias";
    case NodeRole::Output: return "output";
    case NodeRole::Hidden: return "hidden";
  }
  return "?";
}

namespace {

Activation activation_from(std::string_view name) {
  if (name == "identity") return Activation::Identity;
  if (name == "sigmoid") return Activation::Sigmoid;
  if (name == "gaussian") return Activation::Gaussian;
  if (name == "sine") return Activation::Sine;
  throw std::runtime_error("unknown activation '" + std::string(name) + "'");
}

NodeRole role_from(std::string_view name) {
  if (name == "input") return NodeRole::Input;
  if (name == "bias") return NodeRole::Bias;
  if (name == "output") return NodeRole::Output;
  if (name == "hidden") return NodeRole::Hidden;
  throw std::runtime_error("unknown node role '" + std::string(name) + "'");
}

double apply_activation(Activation a, double v) {
  switch (a) {
    case Activation::Identity: return v;
    case Activation::Sigmoid: return 1.0 / (1.0 + std::exp(-v));
    case Activation::Gaussian: return std::exp(-v * v);
    case Activation::Sine: return std::sin(v);
  }
  return v;
}

constexpr Activation kActivations[4] = {Activation::Identity, Activation::Sigmoid,
                                        Activation::Gaussian, Activation::Sine};

}  // namespace

const CppnNode* CppnGenome::find_node(int id) const {
  for (const auto& n : nodes)
    if (n.id == id) return &n;
  return nullptr;
}

bool CppnGenome::has_connection(int source, int target) const {
  for (const auto& c : connections)
    if (c.source == source && c.target == target) return true;
  return false;
}

int CppnGenome::hidden_count() const {
  int n = 0;
  for (const auto& node : nodes)
    if (node.role == NodeRole::Hidden) ++n;
  return n;
}

int CppnGenome::enabled_count() const {
  int n = 0;
  for (const auto& c : connections)
    if (c.enabled) ++n;
  return n;
}

bool CppnGenome::is_feedforward() const {
  // Kahn's algorithm over all connections; leftover nodes mean a cycle.
  std::map<int, int> indegree;
  for (const auto& n : nodes) indegree[n.id] = 0;
  for (const auto& c : connections) ++indegree[c.target];
  std::vector<int> ready;
  for (const auto& [id, deg] : indegree)
    if (deg == 0) ready.push_back(id);
  std::size_t processed = 0;
  while (!ready.empty()) {
    const int id = ready.back();
    ready.pop_back();
    ++processed;
    for (const auto& c : connections)
      if (c.source == id && --indegree[c.target] == 0) ready.push_back(c.target);
  }
  return processed == nodes.size();
}

std::vector<std::string> CppnGenome::structural_problems() const {
  std::vector<std::string> problems;
  std::set<int> ids;
  for (const auto& n : nodes)
    if (!ids.insert(n.id).second)
      problems.push_back("duplicate node id " + std::to_string(n.id));
  std::set<int> innovations;
  for (const auto& c : connections) {
    if (!innovations.insert(c.innovation).second)
      problems.push_back("duplicate innovation " + std::to_string(c.innovation));
    if (!ids.count(c.source))
      problems.push_back("connection from missing node " + std::to_string(c.source));
    if (!ids.count(c.target))
      problems.push_back("connection to missing node " + std::to_string(c.target));
    const CppnNode* dst = find_node(c.target);
    if (dst && (dst->role == NodeRole::Input || dst->role == NodeRole::Bias))
      problems.push_back("connection into non-consuming node " + std::to_string(c.target));
  }
  if (!is_feedforward()) problems.push_back("connection graph has a cycle");
  return problems;
}

InnovationRegistry::InnovationRegistry() {
  // The fixed skeleton claims innovations 0..8 (inputs and bias straight to
  // the output) and node ids 0..9.
  for (int src = 0; src <= kCppnBiasId; ++src)
    connections_[{src, kCppnOutputId}] = src;
  next_innovation_ = kCppnBiasId + 1;
  next_node_id_ = kCppnOutputId + 1;
}

int InnovationRegistry::connection_innovation(int source, int target) {
  const auto key = std::make_pair(source, target);
  auto it = connections_.find(key);
  if (it != connections_.end()) return it->second;
  const int innovation = next_innovation_++;
  connections_[key] = innovation;
  return innovation;
}

InnovationRegistry::Split InnovationRegistry::split(int connection_innovation, int source,
                                                    int target) {
  auto it = splits_.find(connection_innovation);
  if (it != splits_.end()) return it->second;
  Split s;
  s.node_id = next_node_id_++;
  s.in_innovation = this->connection_innovation(source, s.node_id);
  s.out_innovation = this->connection_innovation(s.node_id, target);
  splits_[connection_innovation] = s;
  return s;
}

CppnGenome cppn_skeleton() {
  CppnGenome g;
  for (int i = 0; i < kCppnInputs; ++i)
    g.nodes.push_back({i, NodeRole::Input, Activation::Identity});
  g.nodes.push_back({kCppnBiasId, NodeRole::Bias, Activation::Identity});
  g.nodes.push_back({kCppnOutputId, NodeRole::Output, Activation::Identity});
  for (int src = 0; src <= kCppnBiasId; ++src)
    g.connections.push_back({src, src, kCppnOutputId, 0.0, true});
  return g;
}

CppnGenome random_cppn(Rng& rng) {
  CppnGenome g = cppn_skeleton();
  for (auto& c : g.connections) c.weight = rng.range(-1.0, 1.0);
  return g;
}

double eval_cppn(const CppnGenome& genome, std::span<const double> inputs) {
  if (inputs.size() != kCppnInputs)
    throw std::runtime_error("cppn expects 8 inputs");

  std::map<int, double> value;
  std::map<int, int> indegree;
  for (const auto& n : genome.nodes) indegree[n.id] = 0;
  for (const auto& c : genome.connections)
    if (c.enabled) ++indegree[c.target];

  std::map<int, double> sums;
  std::vector<int> ready;
  for (const auto& n : genome.nodes)
    if (indegree[n.id] == 0) ready.push_back(n.id);

  while (!ready.empty()) {
    const int id = ready.back();
    ready.pop_back();
    const CppnNode* node = genome.find_node(id);
    double v = 0.0;
    switch (node->role) {
      case NodeRole::Input: v = inputs[static_cast<std::size_t>(id)]; break;
      case NodeRole::Bias: v = 1.0; break;
      case NodeRole::Output:
      case NodeRole::Hidden: v = apply_activation(node->activation, sums[id]); break;
    }
    value[id] = v;
    for (const auto& c : genome.connections) {
      if (!c.enabled || c.source != id) continue;
      sums[c.target] += c.weight * v;
      if (--indegree[c.target] == 0) ready.push_back(c.target);
    }
  }

  const double out = value.count(kCppnOutputId) ? value[kCppnOutputId] : 0.0;
  return std::clamp(out, -kCppnOutputClamp, kCppnOutputClamp);
}

namespace {

// Would adding source -> target close a loop, counting disabled connections?
bool creates_cycle(const CppnGenome& genome, int source, int target) {
  if (source == target) return true;
  // Walk forward from target; reaching source closes the loop.
  std::vector<int> stack{target};
  std::set<int> seen{target};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    for (const auto& c : genome.connections) {
      if (c.source != id) continue;
      if (c.target == source) return true;
      if (seen.insert(c.target).second) stack.push_back(c.target);
    }
  }
  return false;
}

}  // namespace

CppnGenome mutate_cppn(const CppnGenome& genome, Rng& rng, const CppnMutationRates& rates,
                       InnovationRegistry& registry) {
  CppnGenome g = genome;

  for (auto& c : g.connections)
    if (rng.chance(rates.weight_perturb))
      c.weight = std::clamp(c.weight + rng.gaussian(0.0, rates.weight_sigma), -8.0, 8.0);

  if (rng.chance(rates.add_connection)) {
    for (int attempt = 0; attempt < 20; ++attempt) {
      const CppnNode& src = g.nodes[rng.index(g.nodes.size())];
      const CppnNode& dst = g.nodes[rng.index(g.nodes.size())];
      if (src.role == NodeRole::Output) continue;
      if (dst.role == NodeRole::Input || dst.role == NodeRole::Bias) continue;
      if (src.id == dst.id || g.has_connection(src.id, dst.id)) continue;
      if (creates_cycle(g, src.id, dst.id)) continue;
      g.connections.push_back({registry.connection_innovation(src.id, dst.id), src.id, dst.id,
                               rng.range(-1.0, 1.0), true});
      break;
    }
  }

  if (rng.chance(rates.add_node)) {
    std::vector<std::size_t> enabled;
    for (std::size_t i = 0; i < g.connections.size(); ++i)
      if (g.connections[i].enabled) enabled.push_back(i);
    if (!enabled.empty()) {
      const std::size_t which = enabled[rng.index(enabled.size())];
      // Copy, not reference: the pushes below may reallocate g.connections.
      const CppnConnection victim = g.connections[which];
      const auto split = registry.split(victim.innovation, victim.source, victim.target);
      if (!g.find_node(split.node_id)) {
        g.connections[which].enabled = false;
        g.nodes.push_back(
            {split.node_id, NodeRole::Hidden, kActivations[rng.index(4)]});
        g.connections.push_back({split.in_innovation, victim.source, split.node_id, 1.0, true});
        g.connections.push_back(
            {split.out_innovation, split.node_id, victim.target, victim.weight, true});
      }
    }
  }

  if (rng.chance(rates.toggle_enable) && !g.connections.empty()) {
    CppnConnection& c = g.connections[rng.index(g.connections.size())];
    c.enabled = !c.enabled;
  }

  if (rng.chance(rates.change_activation)) {
    std::vector<std::size_t> hidden;
    for (std::size_t i = 0; i < g.nodes.size(); ++i)
      if (g.nodes[i].role == NodeRole::Hidden) hidden.push_back(i);
    if (!hidden.empty())
      g.nodes[hidden[rng.index(hidden.size())]].activation = kActivations[rng.index(4)];
  }

  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const CppnNode& a, const CppnNode& b) { return a.id < b.id; });
  std::sort(g.connections.begin(), g.connections.end(),
            [](const CppnConnection& a, const CppnConnection& b) {
              return a.innovation < b.innovation;
            });
  return g;
}

CppnGenome crossover_cppn(const CppnGenome& a, const CppnGenome& b, bool a_fitter, Rng& rng) {
  const CppnGenome& fitter = a_fitter ? a : b;
  const CppnGenome& other = a_fitter ? b : a;

  std::map<int, const CppnConnection*> other_by_innovation;
  for (const auto& c : other.connections) other_by_innovation[c.innovation] = &c;

  CppnGenome child;
  child.nodes = fitter.nodes;
  child.connections = fitter.connections;
  for (auto& c : child.connections) {
    auto it = other_by_innovation.find(c.innovation);
    if (it != other_by_innovation.end() && rng.chance(0.5)) {
      c.weight = it->second->weight;
      c.enabled = it->second->enabled;
    }
  }
  return child;
}

std::string serialize_cppn(const CppnGenome& genome) {
  CppnGenome g = genome;
  std::sort(g.nodes.begin(), g.nodes.end(),
            [](const CppnNode& a, const CppnNode& b) { return a.id < b.id; });
  std::sort(g.connections.begin(), g.connections.end(),
            [](const CppnConnection& a, const CppnConnection& b) {
              return a.innovation < b.innovation;
            });
  std::string out;
  for (const auto& n : g.nodes) {
    out += "node ";
    out += std::to_string(n.id);
    out += ' ';
    out += role_name(n.role);
    out += ' ';
    out += activation_name(n.activation);
    out += '\n';
  }
  for (const auto& c : g.connections) {
    out += "conn ";
    out += std::to_string(c.innovation);
    out += ' ';
    out += std::to_string(c.source);
    out += ' ';
    out += std::to_string(c.target);
    out += ' ';
    out += fmt_double(c.weight);
    out += ' ';
    out += c.enabled ? '1' : '0';
    out += '\n';
  }
  return out;
}

CppnGenome parse_cppn(std::string_view text) {
  CppnGenome g;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    std::istringstream fields{std::string(t)};
    std::string tag;
    fields >> tag;
    try {
      if (tag == "node") {
        std::string id, role, activation;
        fields >> id >> role >> activation;
        g.nodes.push_back({static_cast<int>(parse_long(id)), role_from(role),
                           activation_from(activation)});
      } else if (tag == "conn") {
        std::string innovation, source, target, weight, enabled;
        fields >> innovation >> source >> target >> weight >> enabled;
        g.connections.push_back({static_cast<int>(parse_long(innovation)),
                                 static_cast<int>(parse_long(source)),
                                 static_cast<int>(parse_long(target)), parse_double(weight),
                                 parse_long(enabled) != 0});
      } else {
        throw std::runtime_error("unknown record '" + tag + "'");
      }
    } catch (const std::exception& e) {
      throw std::runtime_error("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  const auto problems = g.structural_problems();
  if (!problems.empty()) throw std::runtime_error("bad network: " + problems.front());
  return g;
}

std::vector<Vec3d> substrate_positions(const CpgNetwork& net) {
  std::vector<Vec3d> out(net.nodes.size());
  if (net.nodes.empty()) return out;
  Vec3i lo = net.nodes.front().cell, hi = lo;
  for (const auto& n : net.nodes) {
    lo.x = std::min(lo.x, n.cell.x);
    lo.y = std::min(lo.y, n.cell.y);
    lo.z = std::min(lo.z, n.cell.z);
    hi.x = std::max(hi.x, n.cell.x);
    hi.y = std::max(hi.y, n.cell.y);
    hi.z = std::max(hi.z, n.cell.z);
  }
  auto norm = [](int v, int lo, int hi) {
    return hi == lo ? 0.0 : -1.0 + 2.0 * double(v - lo) / double(hi - lo);
  };
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const Vec3i c = net.nodes[i].cell;
    out[i] = {norm(c.x, lo.x, hi.x), norm(c.y, lo.y, hi.y), norm(c.z, lo.z, hi.z)};
  }
  return out;
}

void apply_cppn_weights(const CppnGenome& genome, CpgNetwork& net) {
  const std::vector<Vec3d> pos = substrate_positions(net);
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    const Vec3d p = pos[i];
    const double in[kCppnInputs] = {p.x, p.y, p.z, -1.0, p.x, p.y, p.z, 1.0};
    net.nodes[i].cross_weight = eval_cppn(genome, in);
  }
  for (auto& c : net.connections) {
    const Vec3d pa = pos[static_cast<std::size_t>(c.a)];
    const Vec3d pb = pos[static_cast<std::size_t>(c.b)];
    const double in[kCppnInputs] = {pa.x, pa.y, pa.z, -1.0, pb.x, pb.y, pb.z, -1.0};
    c.weight = eval_cppn(genome, in);
  }
}

}  // namespace morphevo
