#include "tnq/linalg.hpp"

#include <stdexcept>
#include <string>

#define LAPACK_COMPLEX_CPP
#include <lapacke.h>

namespace tnq {

namespace {

lapack_complex_double* lp(Eigen::MatrixXcd& m) {
  return reinterpret_cast<lapack_complex_double*>(m.data());
}

}  // namespace

SvdEcon svd_econ(const Eigen::MatrixXcd& a) {
  const lapack_int m = static_cast<lapack_int>(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.cols());
  const lapack_int r = std::min(m, n);
  if (r == 0) throw std::invalid_argument("svd_econ: empty matrix");

  SvdEcon out;
  out.u.resize(m, r);
  out.s.resize(r);
  out.vh.resize(r, n);

  Eigen::MatrixXcd work = a;
  lapack_int info = LAPACKE_zgesdd(LAPACK_COL_MAJOR, 'S', m, n, lp(work), m,
                                   out.s.data(), lp(out.u), m, lp(out.vh), r);
  if (info != 0) {
    // zgesdd occasionally fails on ill-conditioned input; zgesvd is slower
    // but more forgiving.
    work = a;
    Eigen::VectorXd superb(r > 1 ? r - 1 : 1);
    info = LAPACKE_zgesvd(LAPACK_COL_MAJOR, 'S', 'S', m, n, lp(work), m,
                          out.s.data(), lp(out.u), m, lp(out.vh), r,
                          superb.data());
    if (info != 0)
      throw std::runtime_error("svd_econ: LAPACK failed with info " +
                               std::to_string(info));
  }
  return out;
}

EighReal eigh(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("eigh: matrix not square");
  EighReal out;
  out.vectors = a;
  out.values.resize(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.rows());
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                   out.vectors.data(), n, out.values.data());
  if (info != 0)
    throw std::runtime_error("eigh(real): LAPACK failed with info " +
                             std::to_string(info));
  return out;
}

EighComplex eigh(const Eigen::MatrixXcd& a) {
  if (a.rows() != a.cols())
    throw std::invalid_argument("eigh: matrix not square");
  EighComplex out;
  out.vectors = a;
  out.values.resize(a.rows());
  const lapack_int n = static_cast<lapack_int>(a.rows());
  lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                   lp(out.vectors), n, out.values.data());
  if (info != 0)
    throw std::runtime_error("eigh(complex): LAPACK failed with info " +
                             std::to_string(info));
  return out;
}

}  // namespace tnq
