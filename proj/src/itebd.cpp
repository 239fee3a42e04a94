#include "tnq/itebd.hpp"

#include <cmath>
#include <stdexcept>

namespace tnq {

namespace {

// Multiply tensor entries along one axis by weights (or their pseudo-inverse;
// weights below 1e-12 of the largest invert to zero).
DenseTensor scale_axis(const DenseTensor& t, int axis, const Eigen::VectorXd& w,
                       bool invert) {
  if (t.dim(axis) != w.size())
    throw std::invalid_argument("axis/weight length mismatch");
  Eigen::VectorXd f = w;
  if (invert) {
    const double floor = 1e-12 * w.maxCoeff();
    for (Eigen::Index i = 0; i < f.size(); ++i)
      f(i) = w(i) > floor ? 1.0 / w(i) : 0.0;
  }
  DenseTensor out = t;
  const auto st = t.strides();
  const long n = t.size();
  for (long i = 0; i < n; ++i) {
    const long idx = (i / st[axis]) % t.dim(axis);
    out.data[i] *= f(idx);
  }
  return out;
}

}  // namespace

UniformMPS init_product(const Eigen::VectorXcd& site) {
  const long d = site.size();
  UniformMPS state;
  state.phys_dim = d;
  DenseTensor g({1, d, 1});
  for (long s = 0; s < d; ++s) g.data[s] = site(s);
  state.gamma[0] = g;
  state.gamma[1] = g;
  state.lambda[0] = Eigen::VectorXd::Ones(1);
  state.lambda[1] = Eigen::VectorXd::Ones(1);
  return state;
}

double apply_gate_layer(UniformMPS& state, const Eigen::MatrixXcd& gate,
                        int parity, long chi_max, double cutoff) {
  const long d = state.phys_dim;
  if (gate.rows() != d * d || gate.cols() != d * d)
    throw std::invalid_argument("gate dimension does not match physical pair");
  if (parity != 0 && parity != 1)
    throw std::invalid_argument("parity must be 0 or 1");
  const int a = parity, b = 1 - parity;

  DenseTensor left = scale_axis(state.gamma[a], 0, state.lambda[b], false);
  left = scale_axis(left, 2, state.lambda[a], false);
  DenseTensor right = scale_axis(state.gamma[b], 2, state.lambda[b], false);
  DenseTensor theta = contract(left, right, {{2, 0}});  // (l, s0, s1, r)

  DenseTensor g({d, d, d, d});  // (s0', s1', s0, s1)
  for (long i = 0; i < d * d; ++i)
    for (long j = 0; j < d * d; ++j) g.data[i * d * d + j] = gate(i, j);
  theta = contract(g, theta, {{2, 1}, {3, 2}});  // (s0', s1', l, r)
  theta = theta.permute({2, 0, 1, 3});           // (l, s0', s1', r)

  SvdResult split = truncated_svd(theta, chi_max, cutoff);
  state.gamma[a] = scale_axis(split.left, 0, state.lambda[b], true);
  state.gamma[b] = scale_axis(split.right, 2, state.lambda[b], true);
  state.lambda[a] = split.weights;
  return split.discarded_weight;
}

double step(UniformMPS& state, const GateSchedule& sched, long chi_max,
            double cutoff) {
  double discarded = 0.0;
  for (const GateItem& item : sched.items)
    discarded +=
        apply_gate_layer(state, item.gate, item.parity, chi_max, cutoff);
  return discarded;
}

double local_expectation_at(const UniformMPS& state,
                            const Eigen::MatrixXcd& op, int site) {
  const long d = state.phys_dim;
  if (op.rows() != d || op.cols() != d)
    throw std::invalid_argument("operator dimension mismatch");
  const Eigen::VectorXd& wl = state.lambda[1 - site % 2];
  const Eigen::VectorXd& wr = state.lambda[site % 2];
  DenseTensor t = scale_axis(state.gamma[site % 2], 0, wl, false);
  t = scale_axis(t, 2, wr, false);
  cxd acc = 0.0;
  const long nl = t.dim(0), nr = t.dim(2);
  for (long l = 0; l < nl; ++l)
    for (long r = 0; r < nr; ++r)
      for (long s = 0; s < d; ++s)
        for (long sp = 0; sp < d; ++sp)
          acc += std::conj(t.at({l, sp, r})) * op(sp, s) * t.at({l, s, r});
  return acc.real();
}

double local_expectation(const UniformMPS& state, const Eigen::MatrixXcd& op) {
  return 0.5 * (local_expectation_at(state, op, 0) +
                local_expectation_at(state, op, 1));
}

Eigen::MatrixXcd rdm_window_at(const UniformMPS& state, int n, int start) {
  if (n < 1) throw std::invalid_argument("window must hold at least one site");
  DenseTensor acc =
      scale_axis(state.gamma[start % 2], 0, state.lambda[1 - start % 2], false);
  acc = scale_axis(acc, 2, state.lambda[start % 2], false);
  for (int k = 1; k < n; ++k) {
    const int cell = (start + k) % 2;
    DenseTensor next = scale_axis(state.gamma[cell], 2, state.lambda[cell], false);
    acc = contract(acc, next, {{acc.rank() - 1, 0}});
  }
  // Bring the physical legs forward so rows enumerate the window basis.
  std::vector<long> order(n + 2);
  for (int k = 0; k < n; ++k) order[k] = k + 1;
  order[n] = 0;
  order[n + 1] = n + 1;
  const Eigen::MatrixXcd m = tensor_to_matrix(acc.permute(order), n);
  Eigen::MatrixXcd rho = m * m.adjoint();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (!(tr > 0) || !std::isfinite(tr))
    throw std::runtime_error("window density matrix lost its trace");
  return rho / tr;
}

Eigen::MatrixXcd rdm_window(const UniformMPS& state, int n) {
  return 0.5 * (rdm_window_at(state, n, 0) + rdm_window_at(state, n, 1));
}

double energy_density(const UniformMPS& state, const Params& p) {
  const Eigen::MatrixXcd h2 = two_site_hamiltonian(p).cast<cxd>();
  const double e0 = (rdm_window_at(state, 2, 0) * h2).trace().real();
  const double e1 = (rdm_window_at(state, 2, 1) * h2).trace().real();
  return 0.5 * (e0 + e1);
}

RunSeries run_quench_itebd(const ProductState& s0, const Params& p,
                           const QuenchSettings& settings) {
  if (settings.t_max < 0 || settings.sample_every <= 0 || settings.delta <= 0)
    throw std::invalid_argument("bad sampling window");
  const int per = int(std::round(settings.sample_every / settings.delta));
  if (per < 1 ||
      std::abs(per * settings.delta - settings.sample_every) > 1e-9)
    throw std::invalid_argument(
        "sample interval must be an integer multiple of the step");

  const GateSchedule sched =
      build_schedule(p, settings.delta, settings.order, TimeMode::real_time);
  UniformMPS state = init_product(bloch_vector(s0));

  RunSeries out;
  out.rdm_sites = settings.rdm_sites;
  const int nsamp = int(std::round(settings.t_max / settings.sample_every));
  const Eigen::MatrixXcd sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  double discarded = 0.0;
  double e0 = 0.0;
  try {
    for (int i = 0; i <= nsamp; ++i) {
      if (i > 0)
        for (int k = 0; k < per; ++k)
          discarded += step(state, sched, settings.chi_max, settings.cutoff);
      if (canonical_residual(state) > 1e-6)
        state = canonicalize(state);
      out.times.push_back(i * settings.sample_every);
      out.sx.push_back(local_expectation(state, sx));
      out.sy.push_back(local_expectation(state, sy));
      out.sz.push_back(local_expectation(state, sz));
      const double e = energy_density(state, p);
      out.energy.push_back(e);
      if (i == 0) e0 = e;
      out.entropy.push_back(entanglement_entropy(state.lambda[0]));
      out.renyi2.push_back(renyi2_entropy(state.lambda[0]));
      out.bond_dim.push_back(int(state.bond_dim()));
      out.truncation_error.push_back(discarded);
      out.rdms.push_back(rdm_window(state, settings.rdm_sites));
      const double drift =
          std::abs(e0) < 0.1 ? std::abs(e - e0) : std::abs((e - e0) / e0);
      if (drift > 0.2 && !out.unreliable) {
        out.unreliable = true;
        out.note = "energy drift exceeded 20% at t=" +
                   std::to_string(i * settings.sample_every);
      }
    }
  } catch (const std::exception& err) {
    out.unreliable = true;
    out.note = std::string("stopped early: ") + err.what();
  }
  return out;
}

}  // namespace tnq
