#pragma once

#include <string>

#include "tnq/linalg.hpp"

namespace tnq {

// Couplings of the infinite chain H = sum_j [ -Z_j Z_{j+1} - g X_j - h Z_j ].
struct Params {
  double g = -1.05;
  double h = 0.5;
};

// Either coupling switched off leaves an integrable chain (free fermions at
// h = 0, a classical diagonal Hamiltonian at g = 0). Quench drivers refuse
// such points unless explicitly overridden.
bool integrable(const Params& p);

// Bloch angles of a one-site pure state,
//   |psi> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>,
// so <Z> = cos(theta), <X> = sin(theta) cos(phi), <Y> = sin(theta) sin(phi).
struct ProductState {
  double theta = 0.0;
  double phi = 0.0;
};

// "X+", "Y+", "Z+" aliases; throws std::invalid_argument for anything else.
ProductState named_state(const std::string& name);

Eigen::Vector2cd bloch_vector(const ProductState& s);

Eigen::Matrix2cd pauli_x();
Eigen::Matrix2cd pauli_y();
Eigen::Matrix2cd pauli_z();
Eigen::Matrix2cd pauli_id();

// Kronecker product with row-major grouping: index (i1 i2) = i1*rows(b)+i2.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Two-site cell with the one-site fields split evenly between the two bonds
// touching each site:
//   h2 = -Z x Z - (g/2)(X x 1 + 1 x X) - (h/2)(Z x 1 + 1 x Z).
// Real symmetric. Summing h2 over all bonds recovers H with full fields on
// every interior site; only chain ends see half fields.
Eigen::Matrix4d two_site_hamiltonian(const Params& p);

// Energy per site of the translation-invariant product state,
//   E(theta, phi) = -(cos^2 theta + g sin theta cos phi + h cos theta).
double product_energy(const ProductState& s, const Params& p);

// Global minimizer of product_energy over the Bloch sphere: dense grid scan
// followed by Newton polish until the (theta, phi) gradient norm falls below
// 1e-10. At a pole phi is undefined and is pinned to zero.
ProductState minimal_energy_product_state(const Params& p);

}  // namespace tnq
