#include "morphevo/traits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace morphevo {

bool TraitVector::all_finite() const {
  for (double v : values())
    if (!std::isfinite(v)) return false;
  return true;
}

namespace {

struct Box {
  Vec3i lo{0, 0, 0}, hi{0, 0, 0};
};

Box bounding_box(const GridEmbedding& e) {
  if (e.modules.empty()) throw std::runtime_error("empty embedding");
  Box b{e.modules.front().cell, e.modules.front().cell};
  for (const auto& m : e.modules) {
    b.lo.x = std::min(b.lo.x, m.cell.x);
    b.lo.y = std::min(b.lo.y, m.cell.y);
    b.lo.z = std::min(b.lo.z, m.cell.z);
    b.hi.x = std::max(b.hi.x, m.cell.x);
    b.hi.y = std::max(b.hi.y, m.cell.y);
    b.hi.z = std::max(b.hi.z, m.cell.z);
  }
  return b;
}

}  // namespace

double proportion_of(const GridEmbedding& e) {
  const Box b = bounding_box(e);
  const double w = b.hi.x - b.lo.x + 1;
  const double d = b.hi.y - b.lo.y + 1;
  return std::min(w, d) / std::max(w, d);
}

double coverage_of(const GridEmbedding& e) {
  const Box b = bounding_box(e);
  const double volume = double(b.hi.x - b.lo.x + 1) * double(b.hi.y - b.lo.y + 1) *
                        double(b.hi.z - b.lo.z + 1);
  return static_cast<double>(e.modules.size()) / volume;
}

int max_leaves(int module_count) {
  if (module_count <= 1) return 0;
  if (module_count <= 5) return module_count - 1;
  // Past five modules every third extra module has to become a branch to
  // supply attachment slots for the rest.
  return module_count - 1 - (module_count - 3) / 3;
}

int embedded_leaf_count(const GridEmbedding& e) {
  std::vector<char> has_child(e.modules.size(), 0);
  for (const auto& m : e.modules)
    if (m.parent >= 0) has_child[static_cast<std::size_t>(m.parent)] = 1;
  int leaves = 0;
  for (std::size_t i = 1; i < e.modules.size(); ++i)
    if (!has_child[i]) ++leaves;
  return leaves;
}

double limbs_ratio(const GridEmbedding& e) {
  const int m = static_cast<int>(e.modules.size());
  const int bound = max_leaves(m);
  if (bound == 0) return 0.0;
  return static_cast<double>(embedded_leaf_count(e)) / bound;
}

double speed_cm_per_s(const Trajectory& t) {
  if (t.samples.size() < 2) return 0.0;
  const Vec3d a = t.samples.front().position_cm;
  const Vec3d b = t.samples.back().position_cm;
  const double dx = b.x - a.x, dy = b.y - a.y;
  return std::sqrt(dx * dx + dy * dy) / t.duration_s();
}

namespace {

// Fold an angle into [0, 180] so that 350 degrees of roll counts as 10.
double folded_deg(double a) {
  a = std::fmod(std::fabs(a), 360.0);
  return a > 180.0 ? 360.0 - a : a;
}

}  // namespace

double balance_of(const Trajectory& t) {
  if (t.samples.empty()) return 1.0;
  double acc = 0.0;
  for (const auto& s : t.samples) acc += folded_deg(s.roll_deg) + folded_deg(s.pitch_deg);
  return 1.0 - acc / (360.0 * static_cast<double>(t.samples.size()));
}

TraitVector trait_vector(const GridEmbedding& e, const Trajectory& t) {
  TraitVector tv;
  tv.proportion = proportion_of(e);
  tv.size = static_cast<double>(e.modules.size());
  tv.limbs = limbs_ratio(e);
  tv.coverage = coverage_of(e);
  tv.speed = speed_cm_per_s(t);
  tv.balance = balance_of(t);
  return tv;
}

}  // namespace morphevo
