#pragma once

#include "tnq/hamiltonian.hpp"
#include "tnq/series.hpp"

namespace tnq {

enum class Boundary { open, periodic };

// Full dense eigensystem of the L-site chain, ascending energies, vectors in
// columns. Real symmetric basis: bit j of the basis index is site j's spin,
// bit value 0 meaning <Z> = +1, with site 0 in the highest bit.
struct Spectrum {
  int L = 0;
  Eigen::VectorXd energies;
  Eigen::MatrixXd vectors;
};

// Memoized per (L, g, h, boundary); dense diagonalization is restricted to
// L <= 12 to bound memory.
const Spectrum& cached_spectrum(int L, const Params& p, Boundary bc);

// H|psi> without forming the matrix; any L up to the address-space limit.
Eigen::VectorXcd apply_hamiltonian(int L, const Params& p, Boundary bc,
                                   const Eigen::VectorXcd& psi);

Eigen::VectorXcd product_state_vector(int L, const ProductState& s);

Eigen::VectorXcd evolve_exact(const Spectrum& spec,
                              const Eigen::VectorXcd& psi0, double t);

// Lanczos propagator, full reorthogonalization, sub-steps of at most dt.
// Matches evolve_exact to near machine precision while never materializing
// the 2^L x 2^L matrix, so it reaches L = 16.
Eigen::VectorXcd evolve_krylov(int L, const Params& p, Boundary bc,
                               Eigen::VectorXcd psi, double t, double dt = 0.05,
                               int krylov_dim = 30);

// Density matrix of sites [first, first + n) with everything else traced out.
Eigen::MatrixXcd rdm_exact(const Eigen::VectorXcd& psi, int L, int first,
                           int n);

// Gibbs window state of the n central sites at inverse temperature beta.
Eigen::MatrixXcd thermal_rdm_exact(int L, const Params& p, Boundary bc,
                                   double beta, int n);

// Mid-chain window helpers; the window starts at (L - n) / 2.
Eigen::MatrixXcd rdm_mid(const Eigen::VectorXcd& psi, int L, int n);
double expect_mid(const Eigen::VectorXcd& psi, int L,
                  const Eigen::Matrix2cd& op);

// tr(rho2 h2) on the central bond.
double energy_density_mid(const Eigen::VectorXcd& psi, int L, const Params& p);

// Full pipeline on the finite chain: Lanczos evolution sampled on a uniform
// grid, mid-chain window observables. Reference backend for the infinite
// methods inside the light cone.
RunSeries run_quench_exact(int L, const ProductState& s0, const Params& p,
                           double t_max, double sample_every, int rdm_sites);

}  // namespace tnq
