#include "tnq/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tnq {

bool integrable(const Params& p) { return p.g == 0.0 || p.h == 0.0; }

ProductState named_state(const std::string& name) {
  if (name == "X+") return {M_PI / 2.0, 0.0};
  if (name == "Y+") return {M_PI / 2.0, M_PI / 2.0};
  if (name == "Z+") return {0.0, 0.0};
  throw std::invalid_argument("unknown state name '" + name +
                              "' (expected X+, Y+ or Z+)");
}

Eigen::Vector2cd bloch_vector(const ProductState& s) {
  Eigen::Vector2cd v;
  v(0) = std::cos(s.theta / 2.0);
  v(1) = std::exp(cxd(0.0, s.phi)) * std::sin(s.theta / 2.0);
  return v;
}

Eigen::Matrix2cd pauli_x() {
  Eigen::Matrix2cd m;
  m << 0, 1, 1, 0;
  return m;
}

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd m;
  m << cxd(0, 0), cxd(0, -1), cxd(0, 1), cxd(0, 0);
  return m;
}

Eigen::Matrix2cd pauli_z() {
  Eigen::Matrix2cd m;
  m << 1, 0, 0, -1;
  return m;
}

Eigen::Matrix2cd pauli_id() { return Eigen::Matrix2cd::Identity(); }

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Eigen::Matrix4d two_site_hamiltonian(const Params& p) {
  const Eigen::Matrix2cd x = pauli_x(), z = pauli_z(), id = pauli_id();
  Eigen::Matrix4cd h = -kron(z, z) - (p.g / 2.0) * (kron(x, id) + kron(id, x)) -
                       (p.h / 2.0) * (kron(z, id) + kron(id, z));
  return h.real();
}

double product_energy(const ProductState& s, const Params& p) {
  const double ct = std::cos(s.theta);
  const double sx = std::sin(s.theta) * std::cos(s.phi);
  return -(ct * ct + p.g * sx + p.h * ct);
}

namespace {

// dE/dtheta, dE/dphi of product_energy in closed form.
void energy_gradient(const ProductState& s, const Params& p, double& gt,
                     double& gp) {
  gt = std::sin(2.0 * s.theta) - p.g * std::cos(s.theta) * std::cos(s.phi) +
       p.h * std::sin(s.theta);
  gp = p.g * std::sin(s.theta) * std::sin(s.phi);
}

}  // namespace

ProductState minimal_energy_product_state(const Params& p) {
  ProductState best;
  double e_best = product_energy(best, p);
  const int nt = 360, np = 720;
  for (int i = 0; i <= nt; ++i) {
    for (int j = 0; j < np; ++j) {
      ProductState s{M_PI * i / nt, 2.0 * M_PI * j / np};
      const double e = product_energy(s, p);
      if (e < e_best) {
        e_best = e;
        best = s;
      }
    }
  }

  // Newton polish, coordinate-wise with a damped fallback when the local
  // second derivative is not positive. The pole leaves phi unconstrained;
  // keep it fixed there so the iteration stays well posed.
  for (int iter = 0; iter < 200; ++iter) {
    double gt, gp;
    energy_gradient(best, p, gt, gp);
    if (std::hypot(gt, gp) < 1e-12) break;
    const double htt = 2.0 * std::cos(2.0 * best.theta) +
                       p.g * std::sin(best.theta) * std::cos(best.phi) +
                       p.h * std::cos(best.theta);
    best.theta -= (htt > 1e-8) ? gt / htt : 0.1 * gt;
    best.theta = std::clamp(best.theta, 0.0, M_PI);
    if (std::sin(best.theta) > 1e-8) {
      const double hpp = p.g * std::sin(best.theta) * std::cos(best.phi);
      energy_gradient(best, p, gt, gp);
      best.phi -= (hpp > 1e-8) ? gp / hpp : 0.1 * gp;
    } else {
      best.phi = 0.0;
    }
  }
  if (std::sin(best.theta) <= 1e-8) best.phi = 0.0;
  return best;
}

}  // namespace tnq
