#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tnq/hamiltonian.hpp"

using namespace tnq;

namespace {

// Reference bond Hamiltonian assembled from explicit Kronecker products.
Eigen::Matrix4cd reference_h2(const Params& p) {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::MatrixXcd h = -kron(pauli_z(), pauli_z()) -
                       0.5 * p.g * (kron(pauli_x(), id) + kron(id, pauli_x())) -
                       0.5 * p.h * (kron(pauli_z(), id) + kron(id, pauli_z()));
  return h;
}

}  // namespace

TEST_CASE("pauli algebra") {
  CHECK((pauli_x() * pauli_y() - cxd(0, 1) * pauli_z()).norm() < 1e-15);
  CHECK((pauli_y() * pauli_z() - cxd(0, 1) * pauli_x()).norm() < 1e-15);
  CHECK((pauli_z() * pauli_x() - cxd(0, 1) * pauli_y()).norm() < 1e-15);
  CHECK((pauli_x() * pauli_x() - Eigen::Matrix2cd::Identity()).norm() < 1e-15);
}

TEST_CASE("kron follows row-major index grouping") {
  Eigen::MatrixXcd a(2, 2), b(2, 2);
  a << 1, 2, 3, 4;
  b << 5, 6, 7, 8;
  Eigen::MatrixXcd k = kron(a, b);
  REQUIRE(k.rows() == 4);
  for (long i = 0; i < 2; ++i)
    for (long j = 0; j < 2; ++j)
      for (long m = 0; m < 2; ++m)
        for (long n = 0; n < 2; ++n)
          CHECK(k(i * 2 + m, j * 2 + n) == a(i, j) * b(m, n));
}

TEST_CASE("bond Hamiltonian matches the Kronecker assembly") {
  for (const Params p : {Params{}, Params{0.3, -0.8}, Params{-2.0, 0.01}}) {
    const Eigen::Matrix4d h = two_site_hamiltonian(p);
    const Eigen::Matrix4cd ref = reference_h2(p);
    CHECK((h.cast<cxd>() - ref).norm() < 1e-14);
    CHECK((h - h.transpose()).norm() < 1e-14);
  }
}

TEST_CASE("default parameters sit away from the integrable lines") {
  CHECK(Params{}.g == doctest::Approx(-1.05));
  CHECK(Params{}.h == doctest::Approx(0.5));
  CHECK_FALSE(integrable(Params{}));
  CHECK(integrable(Params{-1.05, 0.0}));
  CHECK(integrable(Params{0.0, 0.5}));
}

TEST_CASE("bloch vector reproduces the angle parameterization") {
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    const ProductState s{u(rng) * M_PI, u(rng) * 2.0 * M_PI};
    const Eigen::Vector2cd v = bloch_vector(s);
    CHECK(std::abs(v.norm() - 1.0) < 1e-12);
    const double x = (v.adjoint() * pauli_x() * v)(0).real();
    const double y = (v.adjoint() * pauli_y() * v)(0).real();
    const double z = (v.adjoint() * pauli_z() * v)(0).real();
    CHECK(x == doctest::Approx(std::sin(s.theta) * std::cos(s.phi)));
    CHECK(y == doctest::Approx(std::sin(s.theta) * std::sin(s.phi)));
    CHECK(z == doctest::Approx(std::cos(s.theta)));
  }
}

TEST_CASE("product energy equals the two-site sandwich") {
  std::mt19937_64 rng(43);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const Params p;
  for (int i = 0; i < 20; ++i) {
    const ProductState s{u(rng) * M_PI, u(rng) * 2.0 * M_PI};
    const Eigen::Vector2cd v = bloch_vector(s);
    Eigen::Vector4cd vv;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) vv(a * 2 + b) = v(a) * v(b);
    const double want = (vv.adjoint() * reference_h2(p) * vv)(0).real();
    CHECK(product_energy(s, p) == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("named states carry the expected energies") {
  const Params p;
  CHECK(product_energy(named_state("X+"), p) == doctest::Approx(1.05));
  CHECK(product_energy(named_state("Y+"), p) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(product_energy(named_state("Z+"), p) == doctest::Approx(-1.5));
  CHECK_THROWS(named_state("Q+"));
}

TEST_CASE("energy minimizer beats a dense grid and is stationary") {
  const Params p;
  const ProductState best = minimal_energy_product_state(p);
  const double e_best = product_energy(best, p);
  CHECK(e_best < -1.71);

  double grid_min = 1e9;
  for (int it = 0; it <= 180; ++it)
    for (int ip = 0; ip < 360; ++ip) {
      const ProductState s{M_PI * it / 180.0, 2.0 * M_PI * ip / 360.0};
      grid_min = std::min(grid_min, product_energy(s, p));
    }
  CHECK(e_best <= grid_min + 1e-9);

  const double eps = 1e-5;
  const double dtheta =
      (product_energy({best.theta + eps, best.phi}, p) -
       product_energy({best.theta - eps, best.phi}, p)) /
      (2 * eps);
  const double dphi = (product_energy({best.theta, best.phi + eps}, p) -
                       product_energy({best.theta, best.phi - eps}, p)) /
                      (2 * eps);
  CHECK(std::abs(dtheta) < 1e-6);
  CHECK(std::abs(dphi) < 1e-6);
}
