#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tnq/exact.hpp"
#include "tnq/fermion.hpp"

using namespace tnq;

TEST_CASE("initial values and bounds") {
  const std::vector<double> times{0.0, 0.3, 0.9, 1.4};
  const std::vector<double> x_from_x = free_fermion_sigma_x("X+", -1.05, times);
  REQUIRE(x_from_x.size() == times.size());
  CHECK(x_from_x[0] == doctest::Approx(1.0).epsilon(1e-8));
  const std::vector<double> x_from_z = free_fermion_sigma_x("Z+", -1.05, times);
  CHECK(x_from_z[0] == doctest::Approx(0.0).epsilon(1e-8));
  for (double v : x_from_x) CHECK(std::abs(v) <= 1.0 + 1e-9);
  for (double v : x_from_z) CHECK(std::abs(v) <= 1.0 + 1e-9);
  CHECK_THROWS(free_fermion_sigma_x("Y+", -1.05, times));
}

TEST_CASE("mode integral tracks a periodic Krylov chain at h = 0") {
  // The ring momentum sum converges to the infinite-chain integral
  // exponentially in L with a rate set by the gap, so the comparison runs at
  // couplings well away from |g| = 1. Short times keep the wavefront away
  // from the wrap. A product Z+ start is an equal mix of the two symmetry
  // sectors, but the X expectation carries no cross-sector terms, so it is a
  // valid stand-in for the symmetry-broken state.
  const int L = 14;
  const std::vector<double> times{0.5, 1.0};
  for (double g : {-2.0, -0.5}) {
    const Params p{g, 0.0};
    for (const char* name : {"X+", "Z+"}) {
      const std::vector<double> pred = free_fermion_sigma_x(name, g, times);
      Eigen::VectorXcd psi = product_state_vector(L, named_state(name));
      double prev_t = 0.0;
      for (size_t i = 0; i < times.size(); ++i) {
        psi = evolve_krylov(L, p, Boundary::periodic, psi, times[i] - prev_t);
        prev_t = times[i];
        const double got = expect_mid(psi, L, pauli_x());
        CHECK(got == doctest::Approx(pred[i]).epsilon(1e-3));
      }
    }
  }
}

TEST_CASE("quench from an eigenstate stays put") {
  // At g = 0 the coupling ground state does not move.
  const std::vector<double> times{0.0, 1.0, 2.0};
  const std::vector<double> vals = free_fermion_sigma_x("Z+", 0.0, times);
  for (double v : vals) CHECK(v == doctest::Approx(0.0).epsilon(1e-8));
}
