#include "tnq/trotter.hpp"

#include <cmath>
#include <stdexcept>

namespace tnq {

Eigen::Matrix4cd gate_exponential(const Eigen::Matrix4d& h, cxd tau) {
  const EighReal ed = eigh(Eigen::MatrixXd(h));
  Eigen::Vector4cd phases;
  for (int i = 0; i < 4; ++i) phases(i) = std::exp(-tau * ed.values(i));
  const Eigen::Matrix4cd v = ed.vectors.cast<cxd>();
  return v * phases.asDiagonal() * v.transpose();
}

std::vector<double> substep_fractions(int order) {
  if (order == 2) return {1.0};
  if (order == 4) {
    const double s = 1.0 / (4.0 - std::pow(4.0, 1.0 / 3.0));
    return {s, s, 1.0 - 4.0 * s, s, s};
  }
  throw std::invalid_argument("Trotter order must be 2 or 4");
}

GateSchedule build_schedule(const Params& p, double delta, int order,
                            TimeMode mode) {
  if (delta == 0.0) throw std::invalid_argument("Trotter step must be nonzero");
  const std::vector<double> frac = substep_fractions(order);

  GateSchedule sched;
  sched.params = p;
  sched.delta = delta;
  sched.order = order;
  sched.mode = mode;

  // Each sub-step c contributes even(c/2) odd(c) even(c/2); adjacent even
  // half layers of consecutive sub-steps merge into one layer.
  std::vector<std::pair<int, double>> layers;
  for (std::size_t i = 0; i < frac.size(); ++i) {
    const double c = frac[i] * delta;
    if (i == 0)
      layers.emplace_back(0, c / 2.0);
    else
      layers.back().second += c / 2.0;
    layers.emplace_back(1, c);
    layers.emplace_back(0, c / 2.0);
  }

  const Eigen::Matrix4d h2 = two_site_hamiltonian(p);
  for (const auto& [parity, tau] : layers) {
    GateItem item;
    item.parity = parity;
    item.tau = tau;
    const cxd arg =
        mode == TimeMode::real_time ? cxd(0.0, tau) : cxd(tau, 0.0);
    item.gate = gate_exponential(h2, arg);
    sched.items.push_back(std::move(item));
  }
  return sched;
}

}  // namespace tnq
