#include "tnq/exact.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace tnq {

namespace {

// Spin of site j in basis index b; site 0 occupies the highest bit.
inline int spin(std::size_t b, int L, int j) {
  return ((b >> (L - 1 - j)) & 1u) ? -1 : 1;
}

Eigen::VectorXd diagonal_part(int L, const Params& p, Boundary bc) {
  const std::size_t dim = std::size_t(1) << L;
  Eigen::VectorXd diag(dim);
  const int nb = bc == Boundary::periodic ? L : L - 1;
  for (std::size_t b = 0; b < dim; ++b) {
    double e = 0.0;
    for (int j = 0; j < nb; ++j)
      e -= double(spin(b, L, j)) * double(spin(b, L, (j + 1) % L));
    for (int j = 0; j < L; ++j) e -= p.h * double(spin(b, L, j));
    diag(b) = e;
  }
  return diag;
}

struct SpectrumKey {
  int L;
  double g, h;
  int bc;
  bool operator<(const SpectrumKey& o) const {
    return std::tie(L, g, h, bc) < std::tie(o.L, o.g, o.h, o.bc);
  }
};

}  // namespace

const Spectrum& cached_spectrum(int L, const Params& p, Boundary bc) {
  if (L < 2 || L > 12)
    throw std::invalid_argument(
        "dense spectrum limited to 2 <= L <= 12, got L=" + std::to_string(L));
  static std::map<SpectrumKey, std::unique_ptr<Spectrum>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  const SpectrumKey key{L, p.g, p.h, int(bc)};
  auto it = cache.find(key);
  if (it != cache.end()) return *it->second;

  const std::size_t dim = std::size_t(1) << L;
  Eigen::MatrixXd hmat = Eigen::MatrixXd::Zero(dim, dim);
  hmat.diagonal() = diagonal_part(L, p, bc);
  for (std::size_t b = 0; b < dim; ++b)
    for (int j = 0; j < L; ++j)
      hmat(b ^ (std::size_t(1) << (L - 1 - j)), b) -= p.g;

  auto spec = std::make_unique<Spectrum>();
  spec->L = L;
  EighReal ed = eigh(hmat);
  spec->energies = std::move(ed.values);
  spec->vectors = std::move(ed.vectors);
  auto [pos, inserted] = cache.emplace(key, std::move(spec));
  return *pos->second;
}

Eigen::VectorXcd apply_hamiltonian(int L, const Params& p, Boundary bc,
                                   const Eigen::VectorXcd& psi) {
  const std::size_t dim = std::size_t(1) << L;
  if (std::size_t(psi.size()) != dim)
    throw std::invalid_argument("state dimension does not match L");
  const Eigen::VectorXd diag = diagonal_part(L, p, bc);
  Eigen::VectorXcd out = diag.cast<cxd>().cwiseProduct(psi);
  for (int j = 0; j < L; ++j) {
    const std::size_t mask = std::size_t(1) << (L - 1 - j);
    for (std::size_t b = 0; b < dim; ++b) out(b) -= p.g * psi(b ^ mask);
  }
  return out;
}

Eigen::VectorXcd product_state_vector(int L, const ProductState& s) {
  const Eigen::Vector2cd v = bloch_vector(s);
  const std::size_t dim = std::size_t(1) << L;
  Eigen::VectorXcd psi(dim);
  for (std::size_t b = 0; b < dim; ++b) {
    cxd amp = 1.0;
    for (int j = 0; j < L; ++j) amp *= v((b >> (L - 1 - j)) & 1u);
    psi(b) = amp;
  }
  return psi;
}

Eigen::VectorXcd evolve_exact(const Spectrum& spec,
                              const Eigen::VectorXcd& psi0, double t) {
  const Eigen::MatrixXd& v = spec.vectors;
  Eigen::VectorXcd coeff =
      (v.transpose() * psi0.real()).cast<cxd>() +
      cxd(0, 1) * (v.transpose() * psi0.imag()).cast<cxd>();
  for (Eigen::Index n = 0; n < coeff.size(); ++n)
    coeff(n) *= std::exp(cxd(0.0, -spec.energies(n) * t));
  return (v * coeff.real()).cast<cxd>() +
         cxd(0, 1) * (v * coeff.imag()).cast<cxd>();
}

namespace {

Eigen::VectorXcd apply_with_diag(int L, double g, const Eigen::VectorXd& diag,
                                 const Eigen::VectorXcd& psi) {
  Eigen::VectorXcd out = diag.cast<cxd>().cwiseProduct(psi);
  const std::size_t dim = std::size_t(psi.size());
  for (int j = 0; j < L; ++j) {
    const std::size_t mask = std::size_t(1) << (L - 1 - j);
    for (std::size_t b = 0; b < dim; ++b) out(b) -= g * psi(b ^ mask);
  }
  return out;
}

// One Lanczos step of exp(-i dt H) with full reorthogonalization.
Eigen::VectorXcd krylov_substep(int L, double g, const Eigen::VectorXd& diag,
                                const Eigen::VectorXcd& psi, double dt, int m) {
  const double nrm = psi.norm();
  if (nrm < 1e-300) return psi;
  std::vector<Eigen::VectorXcd> basis;
  basis.push_back(psi / nrm);
  std::vector<double> alpha, beta;
  int k = 0;
  for (; k < m; ++k) {
    Eigen::VectorXcd w = apply_with_diag(L, g, diag, basis[k]);
    // Two-pass classical Gram-Schmidt keeps the basis orthonormal even for
    // long chains where rounding accumulates.
    for (int pass = 0; pass < 2; ++pass)
      for (int j = 0; j <= k; ++j) {
        const cxd h = basis[j].dot(w);
        if (pass == 0 && j == k) alpha.push_back(h.real());
        w -= h * basis[j];
      }
    const double b = w.norm();
    if (b < 1e-13 || k == m - 1) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }
  const int dim = int(alpha.size());
  Eigen::MatrixXd tri = Eigen::MatrixXd::Zero(dim, dim);
  for (int i = 0; i < dim; ++i) {
    tri(i, i) = alpha[i];
    if (i + 1 < dim) tri(i, i + 1) = tri(i + 1, i) = beta[i];
  }
  const EighReal ed = eigh(tri);
  Eigen::VectorXcd small = Eigen::VectorXcd::Zero(dim);
  for (int i = 0; i < dim; ++i) {
    cxd acc = 0.0;
    for (int n = 0; n < dim; ++n)
      acc += ed.vectors(i, n) * std::exp(cxd(0.0, -ed.values(n) * dt)) *
             ed.vectors(0, n);
    small(i) = acc;
  }
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(psi.size());
  for (int i = 0; i < dim; ++i) out += small(i) * basis[i];
  return out * nrm;
}

}  // namespace

Eigen::VectorXcd evolve_krylov(int L, const Params& p, Boundary bc,
                               Eigen::VectorXcd psi, double t, double dt,
                               int krylov_dim) {
  if (dt <= 0) throw std::invalid_argument("Krylov sub-step must be positive");
  const int nsub = std::max(1, int(std::ceil(std::abs(t) / dt - 1e-12)));
  const double step = t / nsub;
  const Eigen::VectorXd diag = diagonal_part(L, p, bc);
  for (int i = 0; i < nsub; ++i)
    psi = krylov_substep(L, p.g, diag, psi, step, krylov_dim);
  return psi;
}

Eigen::MatrixXcd rdm_exact(const Eigen::VectorXcd& psi, int L, int first,
                           int n) {
  if (first < 0 || n < 1 || first + n > L)
    throw std::invalid_argument("reduced-density window out of range");
  const std::size_t dl = std::size_t(1) << first;
  const std::size_t dm = std::size_t(1) << n;
  const std::size_t dr = std::size_t(1) << (L - first - n);
  if (std::size_t(psi.size()) != dl * dm * dr)
    throw std::invalid_argument("state dimension does not match L");
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(dm, dm);
  for (std::size_t l = 0; l < dl; ++l) {
    Eigen::Map<const Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        block(psi.data() + l * dm * dr, dm, dr);
    rho.noalias() += block * block.adjoint();
  }
  const double tr = rho.trace().real();
  if (tr > 0) rho /= tr;
  return rho;
}

Eigen::MatrixXcd thermal_rdm_exact(int L, const Params& p, Boundary bc,
                                   double beta, int n) {
  const Spectrum& spec = cached_spectrum(L, p, bc);
  const std::size_t dim = std::size_t(1) << L;
  // Shift the exponent so the largest Boltzmann weight is 1 for either sign
  // of beta.
  double shift = -beta * spec.energies(0);
  for (std::size_t k = 1; k < dim; ++k)
    shift = std::max(shift, -beta * spec.energies(k));
  const int first = (L - n) / 2;
  Eigen::MatrixXcd rho =
      Eigen::MatrixXcd::Zero(std::size_t(1) << n, std::size_t(1) << n);
  double z = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double w = std::exp(-beta * spec.energies(k) - shift);
    if (w < 1e-300) continue;
    const Eigen::VectorXcd psi = spec.vectors.col(k).cast<cxd>();
    rho += w * rdm_exact(psi, L, first, n);
    z += w;
  }
  return rho / z;
}

Eigen::MatrixXcd rdm_mid(const Eigen::VectorXcd& psi, int L, int n) {
  return rdm_exact(psi, L, (L - n) / 2, n);
}

double expect_mid(const Eigen::VectorXcd& psi, int L,
                  const Eigen::Matrix2cd& op) {
  const Eigen::MatrixXcd rho = rdm_exact(psi, L, (L - 1) / 2, 1);
  return (rho * op).trace().real();
}

double energy_density_mid(const Eigen::VectorXcd& psi, int L, const Params& p) {
  const Eigen::MatrixXcd rho = rdm_exact(psi, L, (L - 1) / 2, 2);
  return (rho * two_site_hamiltonian(p).cast<cxd>()).trace().real();
}

RunSeries run_quench_exact(int L, const ProductState& s0, const Params& p,
                           double t_max, double sample_every, int rdm_sites) {
  if (t_max < 0 || sample_every <= 0)
    throw std::invalid_argument("bad sampling window");
  RunSeries out;
  out.rdm_sites = rdm_sites;
  Eigen::VectorXcd psi = product_state_vector(L, s0);
  const int nsamp = int(std::round(t_max / sample_every));
  const Eigen::Matrix2cd sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  const std::size_t half = std::size_t(1) << (L / 2);
  for (int i = 0; i <= nsamp; ++i) {
    const double t = i * sample_every;
    // A ring keeps the state translation invariant, so the mid-window
    // values are the everywhere values and the bond energy is conserved.
    if (i > 0) psi = evolve_krylov(L, p, Boundary::periodic, psi, sample_every);
    out.times.push_back(t);
    out.sx.push_back(expect_mid(psi, L, sx));
    out.sy.push_back(expect_mid(psi, L, sy));
    out.sz.push_back(expect_mid(psi, L, sz));
    out.energy.push_back(energy_density_mid(psi, L, p));
    out.rdms.push_back(rdm_mid(psi, L, rdm_sites));
    // Half-cut entanglement through the exact Schmidt spectrum.
    Eigen::Map<const Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>
        m(psi.data(), half, (std::size_t(1) << L) / half);
    const SvdEcon svd = svd_econ(Eigen::MatrixXcd(m));
    double s1 = 0.0, s2 = 0.0;
    int nkeep = 0;
    for (Eigen::Index k = 0; k < svd.s.size(); ++k) {
      const double w = svd.s(k) * svd.s(k);
      if (w > 1e-28) {
        s1 -= w * std::log(w);
        s2 += w * w;
        ++nkeep;
      }
    }
    out.entropy.push_back(s1);
    out.renyi2.push_back(-std::log(s2));
    out.bond_dim.push_back(nkeep);
    out.truncation_error.push_back(0.0);
  }
  return out;
}

}  // namespace tnq
