#include "morphevo/morphology.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "morphevo/util.hpp"

namespace morphevo {

const char* kind_name(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::Core: return "Core";
    case ModuleKind::Brick: return "Brick";
    case ModuleKind::Joint: return "Joint";
  }
  return "?";
}

int rotation_degrees(Rotation rotation) { return rotation == Rotation::R0 ? 0 : 90; }

int slot_count(ModuleKind kind) {
  switch (kind) {
    case ModuleKind::Core: return 4;
    case ModuleKind::Brick: return 3;
    case ModuleKind::Joint: return 1;
  }
  return 0;
}

namespace {

constexpr Vec3i kFront{0, 1, 0};
constexpr Vec3i kRight{1, 0, 0};
constexpr Vec3i kBack{0, -1, 0};
constexpr Vec3i kLeft{-1, 0, 0};

// Quarter-turns about z that take local +y onto each slot direction.
constexpr int kFrontTurns = 0, kRightTurns = 3, kBackTurns = 2, kLeftTurns = 1;

int slot_turns(ModuleKind kind, int slot) {
  switch (kind) {
    case ModuleKind::Core: {
      constexpr int t[4] = {kFrontTurns, kRightTurns, kBackTurns, kLeftTurns};
      return t[slot];
    }
    case ModuleKind::Brick: {
      constexpr int t[3] = {kFrontTurns, kRightTurns, kLeftTurns};
      return t[slot];
    }
    case ModuleKind::Joint:
      return kFrontTurns;
  }
  return 0;
}

}  // namespace

Vec3i slot_direction(ModuleKind kind, int slot) {
  if (slot < 0 || slot >= slot_count(kind))
    throw std::out_of_range("slot " + std::to_string(slot) + " on " + kind_name(kind));
  switch (kind) {
    case ModuleKind::Core: {
      constexpr Vec3i d[4] = {kFront, kRight, kBack, kLeft};
      return d[slot];
    }
    case ModuleKind::Brick: {
      constexpr Vec3i d[3] = {kFront, kRight, kLeft};
      return d[slot];
    }
    case ModuleKind::Joint:
      return kFront;
  }
  return kFront;
}

Mat3i slot_frame(ModuleKind kind, int slot) {
  if (slot < 0 || slot >= slot_count(kind))
    throw std::out_of_range("slot " + std::to_string(slot) + " on " + kind_name(kind));
  return rot_z_quarter(slot_turns(kind, slot));
}

Mat3i attachment_twist(Rotation rotation) {
  return rotation == Rotation::R0 ? Mat3i::identity() : rot_y_quarter(1);
}

int count_nodes(const BodyNode& node) {
  int n = 1;
  for (const auto& child : node.children) n += count_nodes(child);
  return n;
}

int count_modules(const BodyGraph& body) { return count_nodes(body.root); }

namespace {

void count_leaves_from(const BodyNode& node, bool is_root, int& acc) {
  if (node.children.empty()) {
    if (!is_root) ++acc;
    return;
  }
  for (const auto& child : node.children) count_leaves_from(child, false, acc);
}

void count_joints_from(const BodyNode& node, int& acc) {
  if (node.kind == ModuleKind::Joint) ++acc;
  for (const auto& child : node.children) count_joints_from(child, acc);
}

}  // namespace

int leaf_count(const BodyGraph& body) {
  int acc = 0;
  count_leaves_from(body.root, true, acc);
  return acc;
}

int joint_count(const BodyGraph& body) {
  int acc = 0;
  count_joints_from(body.root, acc);
  return acc;
}

namespace {

void validate_node(const BodyNode& node, bool is_root, const ValidationLimits& limits,
                   const std::string& path, std::vector<std::string>& violations) {
  if (is_root && node.kind != ModuleKind::Core)
    violations.push_back("root module is " + std::string(kind_name(node.kind)) + ", expected Core");
  if (!is_root && node.kind == ModuleKind::Core)
    violations.push_back("nested core at " + path);

  std::vector<bool> used(static_cast<std::size_t>(slot_count(node.kind)), false);
  for (const auto& child : node.children) {
    const std::string child_path = path.empty() ? std::to_string(child.slot)
                                                : path + "." + std::to_string(child.slot);
    if (child.slot >= slot_count(node.kind)) {
      violations.push_back("slot " + std::to_string(child.slot) + " out of range on " +
                           kind_name(node.kind) + " at " + (path.empty() ? "root" : path));
    } else if (used[child.slot]) {
      violations.push_back("slot " + std::to_string(child.slot) + " used twice on " +
                           kind_name(node.kind) + " at " + (path.empty() ? "root" : path));
    } else {
      used[child.slot] = true;
    }
    if (limits.forbid_joint_on_joint && node.kind == ModuleKind::Joint &&
        child.kind == ModuleKind::Joint)
      violations.push_back("joint attached to joint at " + child_path);
    validate_node(child, false, limits, child_path, violations);
  }
}

}  // namespace

ValidationReport validate(const BodyGraph& body, const ValidationLimits& limits) {
  ValidationReport report;
  const int n = count_modules(body);
  if (n > limits.module_cap)
    report.violations.push_back("module count " + std::to_string(n) + " exceeds cap " +
                                std::to_string(limits.module_cap));
  validate_node(body.root, true, limits, "", report.violations);
  return report;
}

namespace {

int subtree_joints(const BodyNode& node) {
  int acc = 0;
  count_joints_from(node, acc);
  return acc;
}

struct EmbedState {
  GridEmbedding out;
  std::vector<Vec3i> occupied;
  int next_joint = 0;

  bool taken(Vec3i cell) const {
    return std::find(occupied.begin(), occupied.end(), cell) != occupied.end();
  }

  void place(const BodyNode& node, int parent, Vec3i cell, const Mat3i& frame) {
    if (taken(cell)) {
      out.omitted += count_nodes(node);
      next_joint += subtree_joints(node);
      return;
    }
    int jidx = -1;
    if (node.kind == ModuleKind::Joint) jidx = next_joint++;
    occupied.push_back(cell);
    const int index = static_cast<int>(out.modules.size());
    out.modules.push_back({cell, frame, node.kind, node.rotation, node.slot, parent, jidx});
    for (const auto& child : node.children) {
      const Vec3i dir = frame * slot_direction(node.kind, child.slot);
      const Mat3i child_frame =
          frame * slot_frame(node.kind, child.slot) * attachment_twist(child.rotation);
      place(child, index, cell + dir, child_frame);
    }
  }
};

}  // namespace

GridEmbedding embed(const BodyGraph& body) {
  EmbedState state;
  state.place(body.root, -1, Vec3i{0, 0, 0}, Mat3i::identity());
  return state.out;
}

int tree_joint_channels(const BodyGraph& body) { return joint_count(body); }

namespace {

// Recursive-descent parser for the nested module text.
struct TextCursor {
  std::string_view s;
  std::size_t pos = 0;

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("parse error at offset " + std::to_string(pos) + ": " + what);
  }

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
  }

  bool at_end() {
    skip_ws();
    return pos >= s.size();
  }

  char peek() {
    skip_ws();
    if (pos >= s.size()) fail("unexpected end of input");
    return s[pos];
  }

  bool eat(char c) {
    skip_ws();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!eat(c)) fail(std::string("expected '") + c + "'");
  }

  std::string ident() {
    skip_ws();
    const std::size_t start = pos;
    while (pos < s.size() && std::isalpha(static_cast<unsigned char>(s[pos]))) ++pos;
    if (pos == start) fail("expected a module kind");
    return std::string(s.substr(start, pos - start));
  }

  double number() {
    skip_ws();
    const std::size_t start = pos;
    if (pos < s.size() && (s[pos] == '-' || s[pos] == '+')) ++pos;
    while (pos < s.size() && (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
                              s[pos] == 'e' || s[pos] == 'E' ||
                              ((s[pos] == '-' || s[pos] == '+') &&
                               (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
      ++pos;
    if (pos == start) fail("expected a number");
    return parse_double(s.substr(start, pos - start));
  }

  int integer() {
    const double v = number();
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) fail("expected an integer");
    return i;
  }
};

TextNode parse_node(TextCursor& cur) {
  TextNode node;
  const std::string kind = cur.ident();
  if (kind == "Core")
    node.kind = ModuleKind::Core;
  else if (kind == "Brick")
    node.kind = ModuleKind::Brick;
  else if (kind == "Joint")
    node.kind = ModuleKind::Joint;
  else
    cur.fail("unknown module kind '" + kind + "'");

  cur.expect('(');
  const int degrees = cur.integer();
  if (degrees == 0)
    node.rotation = Rotation::R0;
  else if (degrees == 90)
    node.rotation = Rotation::R90;
  else
    cur.fail("rotation must be 0 or 90, got " + std::to_string(degrees));
  if (cur.eat(';')) {
    node.params.push_back(cur.number());
    while (cur.eat(',')) node.params.push_back(cur.number());
  }
  cur.expect(')');

  if (cur.eat('[')) {
    if (!cur.eat(']')) {
      do {
        const int slot = cur.integer();
        if (slot < 0 || slot >= slot_count(node.kind))
          cur.fail("slot " + std::to_string(slot) + " out of range on " + kind_name(node.kind));
        cur.expect(':');
        TextNode child = parse_node(cur);
        child.slot = static_cast<std::uint8_t>(slot);
        for (const auto& existing : node.children)
          if (existing.slot == child.slot)
            cur.fail("slot " + std::to_string(slot) + " used twice on " + kind_name(node.kind));
        node.children.push_back(std::move(child));
      } while (cur.eat(','));
      cur.expect(']');
    }
  }
  std::sort(node.children.begin(), node.children.end(),
            [](const TextNode& a, const TextNode& b) { return a.slot < b.slot; });
  return node;
}

BodyNode strip_params(const TextNode& t) {
  BodyNode node;
  node.kind = t.kind;
  node.rotation = t.rotation;
  node.slot = t.slot;
  node.children.reserve(t.children.size());
  for (const auto& child : t.children) node.children.push_back(strip_params(child));
  return node;
}

void serialize_node(const BodyNode& node, std::string& out) {
  out += kind_name(node.kind);
  out += '(';
  out += std::to_string(rotation_degrees(node.rotation));
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

}  // namespace

TextNode parse_module_text(std::string_view text) {
  TextCursor cur{text};
  TextNode node = parse_node(cur);
  if (!cur.at_end()) cur.fail("trailing input");
  return node;
}

BodyGraph parse_body(std::string_view text) {
  const TextNode parsed = parse_module_text(text);
  if (parsed.kind != ModuleKind::Core)
    throw std::runtime_error("body text must start with a Core module");
  BodyGraph body;
  body.root = strip_params(parsed);
  return body;
}

std::string serialize_body(const BodyGraph& body) {
  std::string out;
  serialize_node(body.root, out);
  return out;
}

}  // namespace morphevo
