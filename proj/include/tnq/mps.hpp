#pragma once

#include <array>
#include <Eigen/Dense>

#include "tnq/tensor.hpp"

namespace tnq {

// Infinite MPS with a two-site unit cell in weight/tensor (Vidal) form.
// gamma[0] sits between lambda[1] (left) and lambda[0] (right); gamma[1]
// between lambda[0] and lambda[1].  Physical dimension is 2 for spins and 4
// for thermal purifications.
struct UniformMPS {
  long phys_dim = 2;
  std::array<DenseTensor, 2> gamma;       // (left bond, phys, right bond)
  std::array<Eigen::VectorXd, 2> lambda;  // unit Euclidean norm each
  double canonical_tol = 1e-10;

  long bond_dim() const {
    return std::max(lambda[0].size(), lambda[1].size());
  }
};

// Largest deviation (Frobenius norm) from the four orthonormality
// conditions of the weight/tensor form.
double canonical_residual(const UniformMPS& state);

// Restores canonical form via the transfer-matrix gauge fixing on the
// coarse-grained cell, then re-splits the cell with an SVD.  The state is
// unchanged up to global phase.
UniformMPS canonicalize(const UniformMPS& state, double tol = 1e-10);

// |per-site overlap| between two uniform MPS, from the dominant eigenvalue
// of the mixed cell transfer matrix normalized by the individual norms.
// Equals 1 iff the states coincide up to phase (and gauge).
double uniform_overlap_per_site(const UniformMPS& a, const UniformMPS& b);

}  // namespace tnq
