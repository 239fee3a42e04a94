#pragma once

#include <complex>
#include <Eigen/Dense>

// Thin wrappers over LAPACKE for the decompositions that dominate runtime.
// Eigen's own SVD/eigensolvers are correct but noticeably slower at the
// matrix sizes the boundary compression produces, so everything funnels
// through here.

namespace tnq {

using cxd = std::complex<double>;

struct SvdEcon {
  Eigen::MatrixXcd u;   // m x r
  Eigen::VectorXd s;    // r, descending
  Eigen::MatrixXcd vh;  // r x n
};

// Economy SVD. Tries the divide-and-conquer driver first and falls back to
// the QR-based one if it fails to converge (rare, but it happens on nearly
// rank-deficient inputs).
SvdEcon svd_econ(const Eigen::MatrixXcd& a);

struct EighReal {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

struct EighComplex {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;
};

EighReal eigh(const Eigen::MatrixXd& a);
EighComplex eigh(const Eigen::MatrixXcd& a);

}  // namespace tnq
