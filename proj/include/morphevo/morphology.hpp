#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "morphevo/geometry.hpp"

namespace morphevo {

enum class ModuleKind : std::uint8_t { Core, Brick, Joint };

// Orientation of a module about its attachment axis, in degrees.
enum class Rotation : std::uint8_t { R0, R90 };

const char* kind_name(ModuleKind kind);
int rotation_degrees(Rotation rotation);

// Attachment slots, indexed per kind:
//   Core  0 front, 1 right, 2 back, 3 left
//   Brick 0 front, 1 right, 2 left
//   Joint 0 front
// Directions are in the owning module's local frame, where front is +y,
// right is +x and up is +z.
int slot_count(ModuleKind kind);
Vec3i slot_direction(ModuleKind kind, int slot);

// Frame carried into a child: parent frame x slot frame x attachment twist.
// The slot frame turns local +y onto the slot direction; the twist is the
// child's rotation about the attachment axis (90 degrees about local y).
Mat3i slot_frame(ModuleKind kind, int slot);
Mat3i attachment_twist(Rotation rotation);

struct BodyNode {
  ModuleKind kind = ModuleKind::Brick;
  Rotation rotation = Rotation::R0;
  std::uint8_t slot = 0;  // slot occupied on the parent; 0 for the root
  std::vector<BodyNode> children;
};

// Rooted tree of modules. The root is always the core.
struct BodyGraph {
  BodyNode root{ModuleKind::Core, Rotation::R0, 0, {}};
};

int count_nodes(const BodyNode& node);
int count_modules(const BodyGraph& body);

// Childless non-root modules.
int leaf_count(const BodyGraph& body);

int joint_count(const BodyGraph& body);

struct ValidationLimits {
  int module_cap = 30;
  bool forbid_joint_on_joint = true;
};

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

ValidationReport validate(const BodyGraph& body, const ValidationLimits& limits);

struct EmbeddedModule {
  Vec3i cell;
  Mat3i frame;
  ModuleKind kind = ModuleKind::Core;
  Rotation rotation = Rotation::R0;
  std::uint8_t slot = 0;  // slot occupied on the parent; 0 for the root
  int parent = -1;        // index of the parent module in the embedding; -1 for the root
  // Position of this joint in a depth-first walk of the whole tree, counting
  // joints inside omitted subtrees as well, so controller channel numbering
  // does not shift when a collision drops modules. -1 for non-joints.
  int tree_joint_index = -1;
};

struct GridEmbedding {
  std::vector<EmbeddedModule> modules;  // depth-first order, root first
  int omitted = 0;                      // modules dropped due to cell collisions
};

// Places the tree on the unit grid, root at the origin with identity frame.
// A child landing on an occupied cell is omitted together with its subtree.
GridEmbedding embed(const BodyGraph& body);

// Total number of joints in the tree walk used for tree_joint_index, i.e.
// the controller channel count.
int tree_joint_channels(const BodyGraph& body);

// Nested text format:
//   Core(0)[0:Brick(90),2:Joint(0;1.5,0,0.75)]
// Kind(rotation) with an optional parenthesised parameter list after ';' and
// an optional bracketed child list of slot:child entries. Parsed parameters
// are surfaced raw; the plain body structure ignores them.
struct TextNode {
  ModuleKind kind = ModuleKind::Brick;
  Rotation rotation = Rotation::R0;
  std::uint8_t slot = 0;
  std::vector<double> params;
  std::vector<TextNode> children;
};

TextNode parse_module_text(std::string_view text);

BodyGraph parse_body(std::string_view text);
std::string serialize_body(const BodyGraph& body);

}  // namespace morphevo
