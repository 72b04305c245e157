#include "morphevo/controller.hpp"

#include <algorithm>
#include <cmath>

namespace morphevo {

namespace {

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

constexpr double kTwoPi = 2.0 * 3.14159265358979323846;

}  // namespace

void SineOscillatorBrain::outputs_at(double t, std::span<double> out) const {
  for (std::size_t i = 0; i < oscillators.size() && i < out.size(); ++i) {
    const Oscillator& o = oscillators[i];
    out[i] = clamp_unit(o.offset + o.amplitude * std::sin(kTwoPi * o.frequency * t));
  }
}

void CpgNetwork::reset_state() {
  for (auto& n : nodes) {
    n.x = 0.0;
    n.y = 1.0;
  }
}

namespace {

// Time derivative of the full (x, y) state vector.
void cpg_derivative(const CpgNetwork& net, const double* x, const double* y, double* dx,
                    double* dy) {
  const std::size_t n = net.nodes.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double w = net.nodes[i].cross_weight;
    dx[i] = w * y[i];
    dy[i] = -w * x[i];
  }
  for (const auto& c : net.connections) {
    dx[c.a] += c.weight * x[c.b];
    dx[c.b] += c.weight * x[c.a];
  }
}

}  // namespace

void CpgNetwork::step_rk4(double dt) {
  const std::size_t n = nodes.size();
  if (n == 0) return;
  rk_scratch.resize(12 * n);
  double* x0 = rk_scratch.data();
  double* y0 = x0 + n;
  double* k1x = y0 + n;
  double* k1y = k1x + n;
  double* k2x = k1y + n;
  double* k2y = k2x + n;
  double* k3x = k2y + n;
  double* k3y = k3x + n;
  double* k4x = k3y + n;
  double* k4y = k4x + n;
  double* tx = k4y + n;
  double* ty = tx + n;

  for (std::size_t i = 0; i < n; ++i) {
    x0[i] = nodes[i].x;
    y0[i] = nodes[i].y;
  }
  cpg_derivative(*this, x0, y0, k1x, k1y);
  for (std::size_t i = 0; i < n; ++i) {
    tx[i] = x0[i] + 0.5 * dt * k1x[i];
    ty[i] = y0[i] + 0.5 * dt * k1y[i];
  }
  cpg_derivative(*this, tx, ty, k2x, k2y);
  for (std::size_t i = 0; i < n; ++i) {
    tx[i] = x0[i] + 0.5 * dt * k2x[i];
    ty[i] = y0[i] + 0.5 * dt * k2y[i];
  }
  cpg_derivative(*this, tx, ty, k3x, k3y);
  for (std::size_t i = 0; i < n; ++i) {
    tx[i] = x0[i] + dt * k3x[i];
    ty[i] = y0[i] + dt * k3y[i];
  }
  cpg_derivative(*this, tx, ty, k4x, k4y);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].x = x0[i] + dt / 6.0 * (k1x[i] + 2.0 * k2x[i] + 2.0 * k3x[i] + k4x[i]);
    nodes[i].y = y0[i] + dt / 6.0 * (k1y[i] + 2.0 * k2y[i] + 2.0 * k3y[i] + k4y[i]);
  }
}

void CpgNetwork::outputs(std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  for (const auto& n : nodes) {
    if (n.tree_joint_index >= 0 && n.tree_joint_index < static_cast<int>(out.size()))
      out[n.tree_joint_index] = clamp_unit(n.x);
  }
}

CpgNetwork build_cpg_topology(const GridEmbedding& e, int max_manhattan) {
  CpgNetwork net;
  for (const auto& m : e.modules) {
    if (m.kind != ModuleKind::Joint) continue;
    CpgNode node;
    node.tree_joint_index = m.tree_joint_index;
    node.cell = m.cell;
    net.nodes.push_back(node);
  }
  for (std::size_t i = 0; i < net.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < net.nodes.size(); ++j)
      if (manhattan(net.nodes[i].cell, net.nodes[j].cell) <= max_manhattan)
        net.connections.push_back({static_cast<int>(i), static_cast<int>(j), 0.0});
  return net;
}

AnyController::AnyController(SineOscillatorBrain brain, int channels)
    : impl_(std::move(brain)), channels_(channels) {}

AnyController::AnyController(CpgNetwork network, int channels)
    : impl_(std::move(network)), channels_(channels) {}

void AnyController::reset() {
  time_ = 0.0;
  if (auto* net = std::get_if<CpgNetwork>(&impl_)) net->reset_state();
}

void AnyController::advance(double dt) {
  time_ += dt;
  if (auto* net = std::get_if<CpgNetwork>(&impl_)) net->step_rk4(dt);
}

void AnyController::write_outputs(std::span<double> out) const {
  std::fill(out.begin(), out.end(), 0.0);
  if (const auto* brain = std::get_if<SineOscillatorBrain>(&impl_)) {
    brain->outputs_at(time_, out);
  } else if (const auto* net = std::get_if<CpgNetwork>(&impl_)) {
    net->outputs(out);
  }
}

}  // namespace morphevo
