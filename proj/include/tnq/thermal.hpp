#pragma once

#include <Eigen/Dense>
#include <vector>

#include "tnq/hamiltonian.hpp"
#include "tnq/mps.hpp"

namespace tnq {

// Gibbs states of the infinite chain through a purified uniform MPS whose
// local dimension pairs each spin with one ancilla (index s*2 + a).  The
// infinite-temperature state is the maximally entangled pair on every site;
// cooling acts on the physical half only.  Negative beta flips the sign of
// the generator and targets the inverted ensemble.

// Lifts a two-site spin gate to the purified space, identity on ancillas.
Eigen::MatrixXcd lift_gate(const Eigen::Matrix4cd& gate);

// Purified Gibbs state at inverse temperature beta.  The cooling schedule
// divides beta into equal steps no larger than delta_beta so the requested
// value is hit exactly.
UniformMPS thermal_state(const Params& p, double beta, double delta_beta = 0.01,
                         long chi_max = 20, double cutoff = 1e-12);

// Traces the ancilla of each site out of a purified window matrix.
Eigen::MatrixXcd trace_ancillas(const Eigen::MatrixXcd& rho, int n_sites);

// Reduced density matrix of n adjacent spins in the Gibbs state.
Eigen::MatrixXcd thermal_rdm(const Params& p, double beta, int n_sites,
                             double delta_beta = 0.01, long chi_max = 20);

// Energy per bond of a purified state.
double purification_energy(const Params& p, const UniformMPS& state);

// Energy per bond on a regular beta grid, betas strictly ascending.
struct ThermalCurve {
  std::vector<double> betas;
  std::vector<double> energies;
};

// Sweeps one purification from infinite temperature up to beta_max and a
// second one down to beta_min, recording the bond energy at every grid
// point.  Requires beta_min <= 0 <= beta_max.
ThermalCurve compute_thermal_curve(const Params& p, double beta_min,
                                   double beta_max, double delta_beta = 0.01,
                                   long chi_max = 20);

// Linear interpolation of the curve at an arbitrary beta inside its range.
double energy_at_beta(const ThermalCurve& curve, double beta);

// Inverts the curve by bisection on its piecewise linear interpolant.
// Throws when the energy lies outside the recorded range or the curve is
// not monotone around the target.
double beta_for_energy(const ThermalCurve& curve, double energy);

// Shift of the matched inverse temperature when the target energy moves by
// the given relative amount away from E(beta0).
double thermal_sensitivity(const ThermalCurve& curve, double beta0,
                           double rel_shift);

}  // namespace tnq
