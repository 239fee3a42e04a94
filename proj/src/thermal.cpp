#include "tnq/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "tnq/itebd.hpp"
#include "tnq/trotter.hpp"

namespace tnq {

Eigen::MatrixXcd lift_gate(const Eigen::Matrix4cd& gate) {
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(16, 16);
  for (long s1 = 0; s1 < 2; ++s1)
    for (long s2 = 0; s2 < 2; ++s2)
      for (long t1 = 0; t1 < 2; ++t1)
        for (long t2 = 0; t2 < 2; ++t2)
          for (long a1 = 0; a1 < 2; ++a1)
            for (long a2 = 0; a2 < 2; ++a2)
              g((s1 * 2 + a1) * 4 + (s2 * 2 + a2),
                (t1 * 2 + a1) * 4 + (t2 * 2 + a2)) =
                  gate(s1 * 2 + s2, t1 * 2 + t2);
  return g;
}

namespace {

UniformMPS identity_pair_state() {
  Eigen::VectorXcd site = Eigen::VectorXcd::Zero(4);
  site(0) = 1.0 / std::sqrt(2.0);
  site(3) = 1.0 / std::sqrt(2.0);
  return init_product(site);
}

// Applies the cooling steps in place; tau is the physical-leg imaginary
// time advanced per step (half the beta increment).
void cool(UniformMPS& state, const Params& p, int n_steps, double tau,
          long chi_max, double cutoff,
          const std::function<void(const UniformMPS&)>& observer) {
  const Eigen::Matrix4d h2 = two_site_hamiltonian(p);
  const Eigen::MatrixXcd even_half =
      lift_gate(gate_exponential(h2, cxd(0.5 * tau, 0.0)));
  const Eigen::MatrixXcd odd_full =
      lift_gate(gate_exponential(h2, cxd(tau, 0.0)));
  for (int s = 0; s < n_steps; ++s) {
    apply_gate_layer(state, even_half, 0, chi_max, cutoff);
    apply_gate_layer(state, odd_full, 1, chi_max, cutoff);
    apply_gate_layer(state, even_half, 0, chi_max, cutoff);
    if ((s + 1) % 50 == 0 && canonical_residual(state) > 1e-8)
      state = canonicalize(state);
    if (observer) observer(state);
  }
}

}  // namespace

UniformMPS thermal_state(const Params& p, double beta, double delta_beta,
                         long chi_max, double cutoff) {
  if (delta_beta <= 0) throw std::invalid_argument("step must be positive");
  UniformMPS state = identity_pair_state();
  if (beta == 0.0) return state;
  const int n = std::max(1, int(std::round(std::abs(beta) / delta_beta)));
  const double tau = 0.5 * beta / n;
  cool(state, p, n, tau, chi_max, cutoff, nullptr);
  return state;
}

Eigen::MatrixXcd trace_ancillas(const Eigen::MatrixXcd& rho, int n_sites) {
  std::vector<int> keep;
  for (int j = 0; j < n_sites; ++j) keep.push_back(2 * j);
  return partial_trace_qubits(rho, 2 * n_sites, keep);
}

Eigen::MatrixXcd thermal_rdm(const Params& p, double beta, int n_sites,
                             double delta_beta, long chi_max) {
  const UniformMPS state =
      thermal_state(p, beta, delta_beta, chi_max, 1e-12);
  return trace_ancillas(rdm_window(state, n_sites), n_sites);
}

double purification_energy(const Params& p, const UniformMPS& state) {
  const Eigen::MatrixXcd rho2 = trace_ancillas(rdm_window(state, 2), 2);
  const Eigen::MatrixXcd h2 = two_site_hamiltonian(p).cast<cxd>();
  return (rho2 * h2).trace().real();
}

ThermalCurve compute_thermal_curve(const Params& p, double beta_min,
                                   double beta_max, double delta_beta,
                                   long chi_max) {
  if (delta_beta <= 0) throw std::invalid_argument("step must be positive");
  if (beta_min > 0 || beta_max < 0)
    throw std::invalid_argument("beta range must straddle zero");
  const int n_up = int(std::round(beta_max / delta_beta));
  const int n_dn = int(std::round(-beta_min / delta_beta));

  std::vector<double> e_up, e_dn;
  {
    UniformMPS state = identity_pair_state();
    cool(state, p, n_up, 0.5 * delta_beta, chi_max, 1e-12,
         [&](const UniformMPS& s) { e_up.push_back(purification_energy(p, s)); });
  }
  {
    UniformMPS state = identity_pair_state();
    cool(state, p, n_dn, -0.5 * delta_beta, chi_max, 1e-12,
         [&](const UniformMPS& s) { e_dn.push_back(purification_energy(p, s)); });
  }

  ThermalCurve curve;
  for (int k = n_dn; k >= 1; --k) {
    curve.betas.push_back(-k * delta_beta);
    curve.energies.push_back(e_dn[k - 1]);
  }
  curve.betas.push_back(0.0);
  curve.energies.push_back(0.0);
  for (int k = 1; k <= n_up; ++k) {
    curve.betas.push_back(k * delta_beta);
    curve.energies.push_back(e_up[k - 1]);
  }
  return curve;
}

double energy_at_beta(const ThermalCurve& curve, double beta) {
  if (curve.betas.size() < 2)
    throw std::invalid_argument("curve too short to interpolate");
  if (beta < curve.betas.front() || beta > curve.betas.back())
    throw std::invalid_argument("beta outside the recorded range");
  const auto it =
      std::upper_bound(curve.betas.begin(), curve.betas.end(), beta);
  std::size_t hi = std::min<std::size_t>(curve.betas.size() - 1,
                                         it - curve.betas.begin());
  if (hi == 0) hi = 1;
  const std::size_t lo = hi - 1;
  const double w =
      (beta - curve.betas[lo]) / (curve.betas[hi] - curve.betas[lo]);
  return (1.0 - w) * curve.energies[lo] + w * curve.energies[hi];
}

double beta_for_energy(const ThermalCurve& curve, double energy) {
  if (curve.betas.size() < 2)
    throw std::invalid_argument("curve too short to invert");
  // Bond energy falls as beta grows, so the interpolant is decreasing.
  const double e_lo = curve.energies.back();   // at largest beta
  const double e_hi = curve.energies.front();  // at smallest beta
  if (energy < e_lo || energy > e_hi)
    throw std::runtime_error("energy outside the recorded thermal range");
  double a = curve.betas.front(), b = curve.betas.back();
  for (int it = 0; it < 200 && b - a > 1e-12; ++it) {
    const double mid = 0.5 * (a + b);
    if (energy_at_beta(curve, mid) > energy)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

double thermal_sensitivity(const ThermalCurve& curve, double beta0,
                           double rel_shift) {
  const double e0 = energy_at_beta(curve, beta0);
  const double shifted = beta_for_energy(curve, e0 * (1.0 + rel_shift));
  return std::abs(shifted - beta0);
}

}  // namespace tnq
