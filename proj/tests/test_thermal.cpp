#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tnq/exact.hpp"
#include "tnq/thermal.hpp"

using namespace tnq;

TEST_CASE("gate lifting acts on spins only") {
  Eigen::Matrix4cd g;
  for (long i = 0; i < 4; ++i)
    for (long j = 0; j < 4; ++j) g(i, j) = cxd(0.1 * i + j, i - 0.3 * j);
  const Eigen::MatrixXcd lifted = lift_gate(g);
  REQUIRE(lifted.rows() == 16);
  // Purified index on each site is s*2 + a; the pair index is row-major over
  // the two sites.
  for (long s1 = 0; s1 < 2; ++s1)
    for (long a1 = 0; a1 < 2; ++a1)
      for (long s2 = 0; s2 < 2; ++s2)
        for (long a2 = 0; a2 < 2; ++a2)
          for (long t1 = 0; t1 < 2; ++t1)
            for (long b1 = 0; b1 < 2; ++b1)
              for (long t2 = 0; t2 < 2; ++t2)
                for (long b2 = 0; b2 < 2; ++b2) {
                  const long row = (s1 * 2 + a1) * 4 + (s2 * 2 + a2);
                  const long colm = (t1 * 2 + b1) * 4 + (t2 * 2 + b2);
                  const cxd want = (a1 == b1 && a2 == b2)
                                       ? g(s1 * 2 + s2, t1 * 2 + t2)
                                       : cxd(0, 0);
                  CHECK(std::abs(lifted(row, colm) - want) < 1e-15);
                }
}

TEST_CASE("infinite temperature window is maximally mixed") {
  const Eigen::MatrixXcd rho = thermal_rdm(Params{}, 0.0, 2);
  CHECK((rho - Eigen::MatrixXcd::Identity(4, 4) / 4.0).norm() < 1e-12);
}

TEST_CASE("finite temperature window matches the dense Gibbs ensemble") {
  const Params p;
  const double beta = 0.5;
  const Eigen::MatrixXcd got = thermal_rdm(p, beta, 2, 0.01, 24);
  // A 12-site ring is converged in the window to well below the tolerance.
  const Eigen::MatrixXcd want =
      thermal_rdm_exact(12, p, Boundary::periodic, beta, 2);
  CHECK((got - want).norm() < 2e-3);
  CHECK(std::abs(got.trace().real() - 1.0) < 1e-10);
  CHECK((got - got.adjoint()).norm() < 1e-10);
}

TEST_CASE("negative beta inverts the ensemble") {
  const Params p;
  const Eigen::MatrixXcd got = thermal_rdm(p, -0.4, 2, 0.01, 24);
  const Eigen::MatrixXcd want =
      thermal_rdm_exact(12, p, Boundary::periodic, -0.4, 2);
  CHECK((got - want).norm() < 2e-3);
  const Eigen::MatrixXcd h2 = two_site_hamiltonian(p).cast<cxd>();
  CHECK((got * h2).trace().real() > 0.1);
}

TEST_CASE("energy curve is decreasing through a zero at infinite temperature") {
  const ThermalCurve curve = compute_thermal_curve(Params{}, -0.6, 0.8, 0.02, 16);
  REQUIRE(curve.betas.size() == curve.energies.size());
  REQUIRE(curve.betas.size() == 71);
  for (size_t i = 1; i < curve.betas.size(); ++i) {
    CHECK(curve.betas[i] > curve.betas[i - 1]);
    CHECK(curve.energies[i] < curve.energies[i - 1] + 1e-9);
  }
  CHECK(energy_at_beta(curve, 0.0) == doctest::Approx(0.0).epsilon(1e-10));
  // Leading order in beta: E(beta) = -beta tr(h2 h) with h the per-site
  // average of the bond terms touching one site; slope is negative.
  CHECK(energy_at_beta(curve, 0.05) < -1e-3);
}

TEST_CASE("curve inversion round trips") {
  const ThermalCurve curve = compute_thermal_curve(Params{}, -0.5, 0.9, 0.02, 16);
  for (double beta : {-0.35, -0.1, 0.2, 0.66}) {
    const double e = energy_at_beta(curve, beta);
    CHECK(beta_for_energy(curve, e) == doctest::Approx(beta).epsilon(1e-6));
  }
  CHECK(beta_for_energy(curve, 0.0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK_THROWS(beta_for_energy(curve, -50.0));
  CHECK_THROWS(beta_for_energy(curve, 50.0));
}

TEST_CASE("sensitivity reports the beta shift of a nudged target") {
  const ThermalCurve curve = compute_thermal_curve(Params{}, -0.2, 1.0, 0.02, 16);
  const double s = thermal_sensitivity(curve, 0.6, 0.01);
  CHECK(s > 0.0);
  CHECK(s < 0.1);
  // Linear response: the shift is |E dE/dbeta^-1| * rel, so doubling the
  // nudge about doubles the answer.
  const double s2 = thermal_sensitivity(curve, 0.6, 0.02);
  CHECK(s2 == doctest::Approx(2 * s).epsilon(0.05));
}
