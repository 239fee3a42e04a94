#include "tnq/mps.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace tnq {

namespace {

// View of one physical slice of a rank-3 (l, p, r) tensor as an l x r matrix.
Eigen::MatrixXcd gamma_slice(const DenseTensor& g, long s) {
  const long l = g.shape[0], d = g.shape[1], r = g.shape[2];
  Eigen::MatrixXcd m(l, r);
  for (long i = 0; i < l; ++i)
    for (long j = 0; j < r; ++j) m(i, j) = g.data[(i * d + s) * r + j];
  return m;
}

// Cell matrices C(s1,s2) = G0(s1) diag(lambda0) G1(s2), indexed s1*d+s2.
std::vector<Eigen::MatrixXcd> cell_matrices(const UniformMPS& st) {
  const long d = st.phys_dim;
  const Eigen::VectorXd& l0 = st.lambda[0];
  std::vector<Eigen::MatrixXcd> cell(d * d);
  std::vector<Eigen::MatrixXcd> g0(d), g1(d);
  for (long s = 0; s < d; ++s) {
    g0[s] = gamma_slice(st.gamma[0], s) * l0.asDiagonal();
    g1[s] = gamma_slice(st.gamma[1], s);
  }
  for (long s1 = 0; s1 < d; ++s1)
    for (long s2 = 0; s2 < d; ++s2) cell[s1 * d + s2] = g0[s1] * g1[s2];
  return cell;
}

struct FixedPoint {
  Eigen::MatrixXcd x;  // Hermitian PSD
  double eigenvalue;
};

// Dominant fixed point of X -> sum_s M(s) X M(s)^dag (dir=+1) or of the
// adjoint map X -> sum_s M(s)^dag X M(s) (dir=-1).
FixedPoint transfer_fixed_point(const std::vector<Eigen::MatrixXcd>& m,
                                int dir) {
  const long dim = (dir > 0) ? m[0].cols() : m[0].rows();
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Identity(dim, dim) / double(dim);
  double eta = 1.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(dim, dim);
    for (const auto& ms : m)
      y += (dir > 0) ? Eigen::MatrixXcd(ms * x * ms.adjoint())
                     : Eigen::MatrixXcd(ms.adjoint() * x * ms);
    y = 0.5 * (y + y.adjoint()).eval();
    eta = y.trace().real();
    if (eta <= 0.0)
      throw std::runtime_error("transfer_fixed_point: nonpositive trace");
    y /= eta;
    const double diff = (y - x).norm();
    x = y;
    if (diff < 1e-14) return {x, eta};
  }
  throw std::runtime_error("transfer_fixed_point: no convergence");
}

struct HermFactor {
  Eigen::MatrixXcd x;      // V = x * x^dag
  Eigen::MatrixXcd x_inv;  // pseudo-inverse
};

HermFactor factor_psd(const Eigen::MatrixXcd& v) {
  EighComplex es = eigh(v);
  const long n = es.values.size();
  const double vmax = es.values(n - 1);
  Eigen::VectorXd root = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd root_inv = Eigen::VectorXd::Zero(n);
  for (long i = 0; i < n; ++i) {
    const double mu = es.values(i);
    if (mu > 1e-28 * vmax) {
      root(i) = std::sqrt(mu);
      root_inv(i) = 1.0 / root(i);
    }
  }
  HermFactor f;
  f.x = es.vectors * root.asDiagonal();
  f.x_inv = root_inv.asDiagonal() * es.vectors.adjoint();
  return f;
}

}  // namespace

double canonical_residual(const UniformMPS& st) {
  const long d = st.phys_dim;
  double worst = 0.0;
  for (int site = 0; site < 2; ++site) {
    const Eigen::VectorXd& ll = st.lambda[1 - site];  // left of this site
    const Eigen::VectorXd& lr = st.lambda[site];      // right of this site
    const long nl = ll.size(), nr = lr.size();
    Eigen::MatrixXcd left_acc = Eigen::MatrixXcd::Zero(nr, nr);
    Eigen::MatrixXcd right_acc = Eigen::MatrixXcd::Zero(nl, nl);
    for (long s = 0; s < d; ++s) {
      const Eigen::MatrixXcd g = gamma_slice(st.gamma[site], s);
      const Eigen::MatrixXcd a = ll.asDiagonal() * g;
      const Eigen::MatrixXcd b = g * lr.asDiagonal();
      left_acc += a.adjoint() * a;
      right_acc += b * b.adjoint();
    }
    worst = std::max(
        worst, (left_acc - Eigen::MatrixXcd::Identity(nr, nr)).norm());
    worst = std::max(
        worst, (right_acc - Eigen::MatrixXcd::Identity(nl, nl)).norm());
  }
  return worst;
}

UniformMPS canonicalize(const UniformMPS& st, double tol) {
  const long d = st.phys_dim;
  for (int b = 0; b < 2; ++b) {
    const double mx = st.lambda[b].maxCoeff();
    const double mn = st.lambda[b].minCoeff();
    if (!(mx > 0.0) || mn < 1e-14 * mx)
      throw std::runtime_error(
          "canonicalize: singular bond matrix, smallest weight " +
          std::to_string(mn));
  }

  const Eigen::VectorXd lb = st.lambda[1];
  std::vector<Eigen::MatrixXcd> cell = cell_matrices(st);

  // Fixed points of the cell transfer matrix with the outer bond weights
  // attached on the appropriate side.
  std::vector<Eigen::MatrixXcd> mr(cell.size()), ml(cell.size());
  for (size_t i = 0; i < cell.size(); ++i) {
    mr[i] = cell[i] * lb.asDiagonal();
    ml[i] = lb.asDiagonal() * cell[i];
  }
  FixedPoint vr = transfer_fixed_point(mr, +1);
  FixedPoint vl = transfer_fixed_point(ml, -1);

  HermFactor fx = factor_psd(vr.x);  // V_R = X X^dag
  HermFactor fy = factor_psd(vl.x);  // V_L = (Y^dag) (Y^dag)^dag with Y below
  const Eigen::MatrixXcd y = fy.x.adjoint();
  const Eigen::MatrixXcd y_inv = fy.x_inv.adjoint();

  // New cell bond: SVD of Y lambda X.
  SvdEcon mid = svd_econ(y * lb.asDiagonal() * fx.x);
  const double smax = mid.s(0);
  long keep = 0;
  for (long i = 0; i < mid.s.size(); ++i)
    if (mid.s(i) >= 1e-14 * smax) ++keep;
  Eigen::VectorXd lb_new = mid.s.head(keep);
  lb_new /= lb_new.norm();

  // Gauge the cell: C' = V^dag X^+ C Y^+ U.  The overall scale restores a
  // unit transfer eigenvalue so the orthonormality conditions come out
  // exactly normalized.
  const double eta = 0.5 * (vr.eigenvalue + vl.eigenvalue);
  const double scale = mid.s.head(keep).norm() / std::sqrt(eta);
  const Eigen::MatrixXcd gl = mid.vh.topRows(keep) * fx.x_inv;
  const Eigen::MatrixXcd gr = y_inv * mid.u.leftCols(keep);
  std::vector<Eigen::MatrixXcd> cell_new(cell.size());
  for (size_t i = 0; i < cell.size(); ++i)
    cell_new[i] = scale * gl * cell[i] * gr;

  // Re-split the cell into the two-site form through one more SVD.
  const long dn = keep;
  DenseTensor theta({dn, d, d, dn});
  for (long s1 = 0; s1 < d; ++s1)
    for (long s2 = 0; s2 < d; ++s2) {
      const Eigen::MatrixXcd& c = cell_new[s1 * d + s2];
      for (long i = 0; i < dn; ++i)
        for (long j = 0; j < dn; ++j)
          theta.data[((i * d + s1) * d + s2) * dn + j] =
              lb_new(i) * c(i, j) * lb_new(j);
    }
  SvdResult split = truncated_svd(theta, dn * d, 1e-13);

  UniformMPS out;
  out.phys_dim = d;
  out.canonical_tol = tol;
  out.lambda[1] = lb_new;
  out.lambda[0] = split.weights;
  const long chi = split.weights.size();

  // Strip the outer bond weights from the split isometries.
  out.gamma[0] = DenseTensor({dn, d, chi});
  out.gamma[1] = DenseTensor({chi, d, dn});
  for (long i = 0; i < dn; ++i)
    for (long s = 0; s < d; ++s)
      for (long k = 0; k < chi; ++k)
        out.gamma[0].data[(i * d + s) * chi + k] =
            split.left.data[(i * d + s) * chi + k] / lb_new(i);
  for (long k = 0; k < chi; ++k)
    for (long s = 0; s < d; ++s)
      for (long j = 0; j < dn; ++j)
        out.gamma[1].data[(k * d + s) * dn + j] =
            split.right.data[(k * d + s) * dn + j] / lb_new(j);
  return out;
}

double uniform_overlap_per_site(const UniformMPS& a, const UniformMPS& b) {
  std::vector<Eigen::MatrixXcd> ca = cell_matrices(a);
  std::vector<Eigen::MatrixXcd> cb = cell_matrices(b);
  for (size_t i = 0; i < ca.size(); ++i) {
    ca[i] = ca[i] * a.lambda[1].asDiagonal();
    cb[i] = cb[i] * b.lambda[1].asDiagonal();
  }
  if (ca.size() != cb.size())
    throw std::invalid_argument("uniform_overlap_per_site: phys_dim mismatch");

  auto norm_eig = [](const std::vector<Eigen::MatrixXcd>& m) {
    return transfer_fixed_point(m, +1).eigenvalue;
  };
  const double ea = norm_eig(ca);
  const double eb = norm_eig(cb);

  // Mixed transfer: X -> sum_s Ma(s) X Mb(s)^dag on rectangular X.
  const long da = ca[0].rows(), db = cb[0].rows();
  Eigen::MatrixXcd x = Eigen::MatrixXcd::Ones(da, db) / std::sqrt(double(da * db));
  double mag = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(da, db);
    for (size_t s = 0; s < ca.size(); ++s) y += ca[s] * x * cb[s].adjoint();
    const double n = y.norm();
    if (n == 0.0) return 0.0;
    y /= n;
    const double diff = std::min((y - x).norm(), (y + x).norm());
    x = y;
    mag = n;
    if (it > 5 && diff < 1e-13) break;
  }
  return mag / std::sqrt(ea * eb);
}

}  // namespace tnq
