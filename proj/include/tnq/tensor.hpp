#pragma once

#include <complex>
#include <utility>
#include <vector>
#include <Eigen/Dense>

#include "tnq/linalg.hpp"

namespace tnq {

// Dense complex tensor with dynamic rank, row-major storage.  Rank 0 holds a
// single scalar entry.  This is the lingua franca between modules; hot loops
// reshape into Eigen matrices and use BLAS underneath.
struct DenseTensor {
  std::vector<long> shape;
  std::vector<cxd> data;

  DenseTensor() = default;
  explicit DenseTensor(std::vector<long> s);

  static DenseTensor scalar(cxd v);

  long rank() const { return static_cast<long>(shape.size()); }
  long size() const { return static_cast<long>(data.size()); }
  long dim(long axis) const { return shape.at(axis); }

  std::vector<long> strides() const;  // row-major, in elements

  cxd& at(const std::vector<long>& idx);
  cxd at(const std::vector<long>& idx) const;

  DenseTensor reshape(std::vector<long> new_shape) const;
  DenseTensor permute(const std::vector<long>& order) const;
  DenseTensor conjugate() const;
  double norm() const;
  bool finite() const;
};

// Pairwise tensor contraction.  index_pairs lists (axis of a, axis of b);
// the result carries a's free axes followed by b's.  Zero pairs is an outer
// product.
DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<long, long>>& index_pairs);

// theta is rank-4 (left, phys1, phys2, right), split between axes 1 and 2.
// Kept weights are renormalized to unit Euclidean norm; discarded_weight is
// the raw sum of squared dropped singular values.
struct SvdResult {
  DenseTensor left;         // (left, phys1, chi)
  Eigen::VectorXd weights;  // descending, unit norm
  DenseTensor right;        // (chi, phys2, right)
  double discarded_weight = 0.0;
};

SvdResult truncated_svd(const DenseTensor& theta, long chi_max, double cutoff);

double entanglement_entropy(const Eigen::VectorXd& lambda);
double renyi2_entropy(const Eigen::VectorXd& lambda);

// Flatten the first row_axes axes into rows, the rest into columns.
Eigen::MatrixXcd tensor_to_matrix(const DenseTensor& t, long row_axes);
DenseTensor matrix_to_tensor(const Eigen::MatrixXcd& m,
                             std::vector<long> shape);

// Partial trace of a 2^n x 2^n density matrix onto the listed qubits, which
// must be strictly increasing; the result orders them as given. Qubit 0 is
// the most significant bit.
Eigen::MatrixXcd partial_trace_qubits(const Eigen::MatrixXcd& rho, int n,
                                      const std::vector<int>& keep);

}  // namespace tnq
