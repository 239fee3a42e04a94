#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tnq/exact.hpp"

using namespace tnq;

namespace {

Eigen::MatrixXcd embed_site(const Eigen::Matrix2cd& op, int site, int L) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  const Eigen::MatrixXcd id2 = Eigen::MatrixXcd::Identity(2, 2);
  for (int j = 0; j < L; ++j)
    out = kron(out, j == site ? Eigen::MatrixXcd(op) : id2);
  return out;
}

// Dense H built from one-site embeddings only, so it cannot share a mistake
// with the matrix-free kernel.
Eigen::MatrixXcd dense_hamiltonian(int L, const Params& p, Boundary bc) {
  const long dim = 1L << L;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(dim, dim);
  const int bonds = bc == Boundary::periodic ? L : L - 1;
  for (int b = 0; b < bonds; ++b)
    h -= embed_site(pauli_z(), b, L) * embed_site(pauli_z(), (b + 1) % L, L);
  for (int j = 0; j < L; ++j)
    h -= p.g * embed_site(pauli_x(), j, L) + p.h * embed_site(pauli_z(), j, L);
  return h;
}

Eigen::VectorXcd random_state(int L, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXcd psi(1L << L);
  for (long i = 0; i < psi.size(); ++i) psi(i) = cxd(n(rng), n(rng));
  return psi / psi.norm();
}

}  // namespace

TEST_CASE("matrix-free apply matches the dense Hamiltonian") {
  const Params p{-0.7, 0.33};
  for (int L : {4, 6}) {
    for (Boundary bc : {Boundary::open, Boundary::periodic}) {
      const Eigen::MatrixXcd h = dense_hamiltonian(L, p, bc);
      const Eigen::VectorXcd psi = random_state(L, 7 + L);
      CHECK((apply_hamiltonian(L, p, bc, psi) - h * psi).norm() < 1e-12);
    }
  }
}

TEST_CASE("cached spectrum diagonalizes the dense Hamiltonian") {
  const Params p;
  for (Boundary bc : {Boundary::open, Boundary::periodic}) {
    const Spectrum& spec = cached_spectrum(8, p, bc);
    const Eigen::MatrixXcd h = dense_hamiltonian(8, p, bc);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    CHECK((spec.energies - es.eigenvalues()).norm() < 1e-10);
    const Eigen::MatrixXd v = spec.vectors;
    CHECK((v.transpose() * v -
           Eigen::MatrixXd::Identity(v.cols(), v.cols()))
              .norm() < 1e-10);
    const Eigen::MatrixXcd hv = h * v.cast<cxd>();
    const Eigen::MatrixXcd ve = v.cast<cxd>() * spec.energies.asDiagonal();
    CHECK((hv - ve).norm() < 1e-9);
    CHECK(&spec == &cached_spectrum(8, p, bc));
  }
}

TEST_CASE("product state vector matches per-site amplitudes") {
  const ProductState s{1.1, 2.3};
  const int L = 5;
  const Eigen::VectorXcd psi = product_state_vector(L, s);
  const Eigen::Vector2cd v = bloch_vector(s);
  for (long idx = 0; idx < psi.size(); ++idx) {
    cxd want = 1.0;
    for (int j = 0; j < L; ++j) want *= v((idx >> (L - 1 - j)) & 1);
    CHECK(std::abs(psi(idx) - want) < 1e-13);
  }
}

TEST_CASE("krylov evolution matches eigendecomposition evolution") {
  const Params p;
  const int L = 8;
  const Eigen::VectorXcd psi0 = product_state_vector(L, named_state("Y+"));
  const Spectrum& spec = cached_spectrum(L, p, Boundary::periodic);
  for (double t : {0.4, 1.7}) {
    const Eigen::VectorXcd a = evolve_exact(spec, psi0, t);
    const Eigen::VectorXcd b =
        evolve_krylov(L, p, Boundary::periodic, psi0, t);
    CHECK((a - b).norm() < 1e-10);
    CHECK(std::abs(b.norm() - 1.0) < 1e-12);
  }
}

TEST_CASE("reduced density matrix against an explicit loop") {
  const int L = 6;
  const Eigen::VectorXcd psi = random_state(L, 99);
  for (int first : {0, 2, 4}) {
    const int n = 2;
    const Eigen::MatrixXcd rho = rdm_exact(psi, L, first, n);
    REQUIRE(rho.rows() == 4);
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
    const int rest = L - n;
    for (long a = 0; a < 4; ++a)
      for (long b = 0; b < 4; ++b)
        for (long e = 0; e < (1L << rest); ++e) {
          // Scatter window bits and environment bits back into full indices.
          auto weave = [&](long w) {
            long idx = 0;
            int eb = rest;
            for (int j = 0; j < L; ++j) {
              long bit;
              if (j >= first && j < first + n)
                bit = (w >> (n - 1 - (j - first))) & 1;
              else
                bit = (e >> --eb) & 1;
              idx = (idx << 1) | bit;
            }
            return idx;
          };
          want(a, b) += psi(weave(a)) * std::conj(psi(weave(b)));
        }
    CHECK((rho - want).norm() < 1e-12);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
    CHECK((rho - rho.adjoint()).norm() < 1e-12);
  }
}

TEST_CASE("window helpers agree with rdm_exact") {
  const int L = 6;
  const Eigen::VectorXcd psi = random_state(L, 5);
  const Eigen::MatrixXcd rho = rdm_mid(psi, L, 2);
  CHECK((rho - rdm_exact(psi, L, 2, 2)).norm() < 1e-13);
  const Eigen::MatrixXcd rho1 = rdm_mid(psi, L, 1);
  const double x = expect_mid(psi, L, pauli_x());
  CHECK(x == doctest::Approx((rho1 * pauli_x()).trace().real()));
  const Params p;
  const double e = energy_density_mid(psi, L, p);
  const Eigen::MatrixXcd h2 = two_site_hamiltonian(p).cast<cxd>();
  CHECK(e == doctest::Approx((rdm_mid(psi, L, 2) * h2).trace().real()));
}

TEST_CASE("thermal window state matches the dense Gibbs ensemble") {
  const Params p;
  const int L = 8, n = 2;
  SUBCASE("infinite temperature") {
    const Eigen::MatrixXcd rho =
        thermal_rdm_exact(L, p, Boundary::periodic, 0.0, n);
    CHECK((rho - Eigen::MatrixXcd::Identity(4, 4) / 4.0).norm() < 1e-12);
  }
  SUBCASE("finite temperature") {
    const double beta = 0.6;
    const Eigen::MatrixXcd h = dense_hamiltonian(L, p, Boundary::periodic);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    const Eigen::VectorXd w =
        (-beta * (es.eigenvalues().array() - es.eigenvalues().minCoeff()))
            .exp();
    Eigen::MatrixXcd gibbs = es.eigenvectors() *
                             (w / w.sum()).cast<cxd>().asDiagonal() *
                             es.eigenvectors().adjoint();
    // Trace out everything but the central window, bit pair by bit pair.
    const int first = (L - n) / 2;
    Eigen::MatrixXcd want = Eigen::MatrixXcd::Zero(4, 4);
    const int rest = L - n;
    auto weave = [&](long w2, long e) {
      long idx = 0;
      int eb = rest;
      for (int j = 0; j < L; ++j) {
        long bit;
        if (j >= first && j < first + n)
          bit = (w2 >> (n - 1 - (j - first))) & 1;
        else
          bit = (e >> --eb) & 1;
        idx = (idx << 1) | bit;
      }
      return idx;
    };
    for (long a = 0; a < 4; ++a)
      for (long b = 0; b < 4; ++b)
        for (long e = 0; e < (1L << rest); ++e)
          want(a, b) += gibbs(weave(a, e), weave(b, e));
    const Eigen::MatrixXcd rho =
        thermal_rdm_exact(L, p, Boundary::periodic, beta, n);
    CHECK((rho - want).norm() < 1e-10);
  }
}

TEST_CASE("finite chain quench pipeline") {
  const Params p;
  const RunSeries run = run_quench_exact(8, named_state("Z+"), p, 1.0, 0.5, 3);
  REQUIRE(run.times.size() == 3);
  CHECK(run.times[0] == doctest::Approx(0.0));
  CHECK(run.times[2] == doctest::Approx(1.0));
  CHECK(run.sz[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(run.sx[0] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(run.rdm_sites == 3);
  REQUIRE(run.rdms.size() == 3);
  for (const Eigen::MatrixXcd& rho : run.rdms) {
    REQUIRE(rho.rows() == 8);
    CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
    CHECK((rho - rho.adjoint()).norm() < 1e-10);
  }
  double drift = 0;
  for (double e : run.energy) drift = std::max(drift, std::abs(e - run.energy[0]));
  CHECK(drift < 1e-10);
  CHECK_FALSE(run.unreliable);
}
