#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tnq/exact.hpp"
#include "tnq/itebd.hpp"
#include "tnq/tensor.hpp"

using namespace tnq;

TEST_CASE("product start is canonical with the right expectations") {
  const ProductState s{0.7, 1.9};
  const UniformMPS state = init_product(bloch_vector(s));
  CHECK(canonical_residual(state) < 1e-12);
  CHECK(state.bond_dim() == 1);
  CHECK(local_expectation(state, pauli_z()) ==
        doctest::Approx(std::cos(s.theta)));
  CHECK(local_expectation(state, pauli_x()) ==
        doctest::Approx(std::sin(s.theta) * std::cos(s.phi)));
  CHECK(energy_density(state, Params{}) ==
        doctest::Approx(product_energy(s, Params{})));
}

TEST_CASE("gate layers keep the state normalized and canonical") {
  const Params p;
  UniformMPS state = init_product(bloch_vector(named_state("Z+")));
  const GateSchedule sched = build_schedule(p, 0.1, 2, TimeMode::real_time);
  for (int i = 0; i < 10; ++i) step(state, sched, 32);
  // Truncation leaves a small canonical debt; it stays at the discarded
  // weight scale rather than machine precision.
  CHECK(canonical_residual(state) < 1e-5);
  const Eigen::MatrixXcd rho = rdm_window(state, 2);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-10);
  CHECK((rho - rho.adjoint()).norm() < 1e-10);
}

TEST_CASE("window marginals are mutually consistent") {
  const Params p;
  UniformMPS state = init_product(bloch_vector(named_state("X+")));
  const GateSchedule sched = build_schedule(p, 0.1, 2, TimeMode::real_time);
  for (int i = 0; i < 8; ++i) step(state, sched, 32);
  const Eigen::MatrixXcd rho3 = rdm_window_at(state, 3, 0);
  const Eigen::MatrixXcd rho2 = rdm_window_at(state, 2, 0);
  // Trace the last site of the 3-site window by hand.
  Eigen::MatrixXcd traced = Eigen::MatrixXcd::Zero(4, 4);
  for (long a = 0; a < 4; ++a)
    for (long b = 0; b < 4; ++b)
      for (long s = 0; s < 2; ++s) traced(a, b) += rho3(a * 2 + s, b * 2 + s);
  CHECK((traced - rho2).norm() < 1e-9);
  // One-site expectation from the window matches the direct contraction.
  Eigen::MatrixXcd x1 = Eigen::MatrixXcd::Zero(2, 2);
  for (long a = 0; a < 2; ++a)
    for (long b = 0; b < 2; ++b)
      for (long s = 0; s < 2; ++s) x1(a, b) += rho2(a * 2 + s, b * 2 + s);
  CHECK((x1 * pauli_x()).trace().real() ==
        doctest::Approx(local_expectation_at(state, pauli_x(), 0))
            .epsilon(1e-8));
}

TEST_CASE("short quench tracks the finite chain inside the light cone") {
  // The ring is the infinite chain until the counter-propagating fronts
  // wrap; at L=14 that keeps the reference good to ~3e-5 through t=2.
  const Params p;
  QuenchSettings settings;
  settings.t_max = 2.0;
  settings.sample_every = 0.5;
  settings.delta = 0.1;
  settings.order = 4;
  settings.chi_max = 48;
  const int L = 14;
  for (const char* name : {"Z+", "X+"}) {
    const RunSeries mps = run_quench_itebd(named_state(name), p, settings);
    const RunSeries ref =
        run_quench_exact(L, named_state(name), p, settings.t_max,
                         settings.sample_every, 3);
    REQUIRE(mps.times.size() == ref.times.size());
    for (size_t i = 0; i < mps.times.size(); ++i) {
      CHECK(std::abs(mps.sx[i] - ref.sx[i]) < 1e-3);
      CHECK(std::abs(mps.sy[i] - ref.sy[i]) < 1e-3);
      CHECK(std::abs(mps.sz[i] - ref.sz[i]) < 1e-3);
    }
    CHECK_FALSE(mps.unreliable);
  }
}

TEST_CASE("energy stays conserved and entropies grow in order") {
  const Params p;
  QuenchSettings settings;
  settings.t_max = 3.0;
  settings.sample_every = 0.5;
  settings.chi_max = 64;
  const RunSeries run = run_quench_itebd(named_state("Z+"), p, settings);
  REQUIRE(run.times.size() == 7);
  CHECK(run.energy[0] == doctest::Approx(-1.5).epsilon(1e-6));
  for (double e : run.energy)
    CHECK(std::abs(e - run.energy[0]) < 5e-3 * std::abs(run.energy[0]));
  REQUIRE(run.entropy.size() == run.times.size());
  CHECK(run.entropy[0] == doctest::Approx(0.0).epsilon(1e-8));
  CHECK(run.entropy.back() > 0.1);
  for (size_t i = 0; i < run.times.size(); ++i) {
    CHECK(run.renyi2[i] <= run.entropy[i] + 1e-10);
    CHECK(run.renyi2[i] >= -1e-12);
  }
  // Growth is monotone over this window up to sampling noise.
  for (size_t i = 1; i < run.entropy.size(); ++i)
    CHECK(run.entropy[i] >= run.entropy[i - 1] - 1e-6);
  CHECK(run.bond_dim.back() > 1);
}
