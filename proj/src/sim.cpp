#include "morphevo/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace morphevo {

namespace {

constexpr double kPi = 3.14159265358979323846;

int whole_ratio(double num, double den, const char* what) {
  const double ratio = num / den;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::fabs(ratio - rounded) > 1e-9)
    throw std::runtime_error(std::string(what) + " must be a whole positive ratio");
  return static_cast<int>(rounded);
}

}  // namespace

void SimConfig::check() const {
  if (control_dt_s <= 0 || duration_s <= 0 || sample_period_s <= 0)
    throw std::runtime_error("sim timing values must be positive");
  if (cell_size_cm <= 0) throw std::runtime_error("cell size must be positive");
  if (slip_weight <= 0 || slip_weight > 1)
    throw std::runtime_error("slip weight must be in (0, 1]");
  whole_ratio(sample_period_s, control_dt_s, "sample period / control step");
  whole_ratio(duration_s, sample_period_s, "duration / sample period");
}

int SimConfig::control_steps() const {
  return static_cast<int>(std::round(duration_s / control_dt_s));
}

int SimConfig::steps_per_sample() const {
  return static_cast<int>(std::round(sample_period_s / control_dt_s));
}

namespace {

// Constant per-module kinematic links, in embedding (depth-first) order so a
// parent is always computed before its children.
struct FkLink {
  int parent = -1;           // embedded index
  int parent_joint = -1;     // controller channel of the parent, when a joint
  Vec3d offset;              // slot direction in the parent's frame
  Mat3d attach;              // slot frame x attachment twist
};

struct Vec2 {
  double x = 0, y = 0;
};

double wrap_deg(double deg) {
  deg = std::fmod(deg, 360.0);
  if (deg > 180.0) deg -= 360.0;
  if (deg <= -180.0) deg += 360.0;
  return deg;
}

}  // namespace

Trajectory simulate(const BodyGraph& body, AnyController controller, const SimConfig& cfg) {
  cfg.check();
  const GridEmbedding e = embed(body);
  const std::size_t n = e.modules.size();
  const int channels = tree_joint_channels(body);

  std::vector<FkLink> links(n);
  for (std::size_t i = 1; i < n; ++i) {
    const EmbeddedModule& m = e.modules[i];
    const EmbeddedModule& par = e.modules[static_cast<std::size_t>(m.parent)];
    links[i].parent = m.parent;
    links[i].parent_joint =
        par.kind == ModuleKind::Joint ? par.tree_joint_index : -1;
    links[i].offset = to_vec3d(slot_direction(par.kind, m.slot));
    links[i].attach =
        to_mat3d(slot_frame(par.kind, m.slot) * attachment_twist(m.rotation));
  }

  const int steps = cfg.control_steps();
  const int per_sample = cfg.steps_per_sample();

  std::vector<double> outputs(static_cast<std::size_t>(channels), 0.0);
  std::vector<Vec3d> local(n), prev_local(n);
  std::vector<Mat3d> frames(n);
  std::vector<char> prev_contact(n, 0);
  std::vector<double> weights(n, 0.0);
  Vec2 prev_contact_centroid;

  double yaw = 0.0, tx = 0.0, ty = 0.0;

  controller.reset();

  Trajectory traj;
  traj.sample_period_s = cfg.sample_period_s;
  traj.samples.reserve(static_cast<std::size_t>(steps / per_sample) + 1);

  const auto run_fk = [&] {
    controller.write_outputs(outputs);
    for (std::size_t i = 0; i < n; ++i) {
      if (links[i].parent < 0) {
        local[i] = {0, 0, 0};
        frames[i] = Mat3d::identity();
        continue;
      }
      const FkLink& link = links[i];
      const std::size_t p = static_cast<std::size_t>(link.parent);
      Mat3d base = frames[p];
      if (link.parent_joint >= 0) {
        const double angle =
            outputs[static_cast<std::size_t>(link.parent_joint)] * cfg.joint_range_rad;
        base = base * rot_z_rad(angle);
      }
      local[i] = local[p] + base * link.offset;
      frames[i] = base * link.attach;
    }
  };

  const auto contact_flags = [&](std::vector<char>& flags, Vec2& centroid) {
    double z_min = local[0].z;
    for (std::size_t i = 1; i < n; ++i) z_min = std::min(z_min, local[i].z);
    double cx = 0, cy = 0;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      flags[i] = local[i].z - z_min <= cfg.contact_tolerance_cells ? 1 : 0;
      if (flags[i]) {
        cx += local[i].x;
        cy += local[i].y;
        ++count;
      }
    }
    centroid = {cx / count, cy / count};
  };

  const auto record_sample = [&] {
    double z_min = local[0].z;
    for (std::size_t i = 1; i < n; ++i) z_min = std::min(z_min, local[i].z);

    // Body tilt from the least-squares plane through the contact points, in
    // body coordinates; a tiny ridge keeps collinear contact sets stable.
    double sxx = 0, sxy = 0, syy = 0, sxz = 0, syz = 0;
    double mx = 0, my = 0, mz = 0;
    int count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (local[i].z - z_min > cfg.contact_tolerance_cells) continue;
      mx += local[i].x;
      my += local[i].y;
      mz += local[i].z;
      ++count;
    }
    mx /= count;
    my /= count;
    mz /= count;
    for (std::size_t i = 0; i < n; ++i) {
      if (local[i].z - z_min > cfg.contact_tolerance_cells) continue;
      const double dx = local[i].x - mx, dy = local[i].y - my, dz = local[i].z - mz;
      sxx += dx * dx;
      sxy += dx * dy;
      syy += dy * dy;
      sxz += dx * dz;
      syz += dy * dz;
    }
    const double ridge = 1e-9;
    const double det = (sxx + ridge) * (syy + ridge) - sxy * sxy;
    const double slope_x = ((syy + ridge) * sxz - sxy * syz) / det;
    const double slope_y = ((sxx + ridge) * syz - sxy * sxz) / det;

    TrajectorySample s;
    s.position_cm = {(tx + cfg.start_x_cells) * cfg.cell_size_cm,
                     (ty + cfg.start_y_cells) * cfg.cell_size_cm,
                     (local[0].z - z_min) * cfg.cell_size_cm};
    s.pitch_deg = std::atan(slope_x) * 180.0 / kPi;
    s.roll_deg = std::atan(slope_y) * 180.0 / kPi;
    s.yaw_deg = wrap_deg(yaw * 180.0 / kPi);
    traj.samples.push_back(s);
  };

  const auto update_pose = [&] {
    // Anchor-drag: fit the new shape onto where the previous step's contact
    // points stood in the world. Weights favour contacts whose shape-frame
    // motion pulls inward (gripping) over those sliding outward.
    double motion = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      motion = std::max(motion, std::fabs(local[i].x - prev_local[i].x));
      motion = std::max(motion, std::fabs(local[i].y - prev_local[i].y));
      motion = std::max(motion, std::fabs(local[i].z - prev_local[i].z));
    }
    if (motion == 0.0) return;  // nothing moved; the pose cannot change

    const double c = std::cos(yaw), s = std::sin(yaw);
    double sw = 0, ax = 0, ay = 0, gx = 0, gy = 0;
    // First pass: weighted centroids of current shape (a) and previous world
    // positions (g) over the previous contact set.
    std::fill(weights.begin(), weights.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      if (!prev_contact[i]) continue;
      const double dx = local[i].x - prev_local[i].x;
      const double dy = local[i].y - prev_local[i].y;
      const double rx = prev_local[i].x - prev_contact_centroid.x;
      const double ry = prev_local[i].y - prev_contact_centroid.y;
      const double w = dx * rx + dy * ry < -1e-12 ? 1.0 : cfg.slip_weight;
      weights[i] = w;
      sw += w;
      ax += w * local[i].x;
      ay += w * local[i].y;
      const double wx = c * prev_local[i].x - s * prev_local[i].y + tx;
      const double wy = s * prev_local[i].x + c * prev_local[i].y + ty;
      gx += w * wx;
      gy += w * wy;
    }
    ax /= sw;
    ay /= sw;
    gx /= sw;
    gy /= sw;

    double dot = 0, cross = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (weights[i] == 0.0) continue;
      const double pax = local[i].x - ax, pay = local[i].y - ay;
      const double wx = c * prev_local[i].x - s * prev_local[i].y + tx;
      const double wy = s * prev_local[i].x + c * prev_local[i].y + ty;
      const double pgx = wx - gx, pgy = wy - gy;
      dot += weights[i] * (pax * pgx + pay * pgy);
      cross += weights[i] * (pax * pgy - pay * pgx);
    }

    double theta = yaw;
    if (std::fabs(dot) > 1e-12 || std::fabs(cross) > 1e-12) theta = std::atan2(cross, dot);
    const double tc = std::cos(theta), ts = std::sin(theta);
    tx = gx - (tc * ax - ts * ay);
    ty = gy - (ts * ax + tc * ay);
    yaw = theta;
  };

  for (int k = 0; k <= steps; ++k) {
    if (k > 0) controller.advance(cfg.control_dt_s);
    run_fk();
    if (k > 0) update_pose();
    contact_flags(prev_contact, prev_contact_centroid);
    prev_local = local;
    if (k % per_sample == 0) record_sample();
  }

  return traj;
}

}  // namespace morphevo
