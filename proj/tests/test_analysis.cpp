#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "tnq/analysis.hpp"

using namespace tnq;

namespace {

Eigen::MatrixXcd random_hermitian(std::mt19937_64& rng, long n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::MatrixXcd m(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) m(i, j) = cxd(g(rng), g(rng));
  return 0.5 * (m + m.adjoint());
}

RunSeries series_from(const std::vector<double>& times,
                      const std::vector<Eigen::MatrixXcd>& rdms) {
  RunSeries s;
  s.times = times;
  s.rdms = rdms;
  s.rdm_sites = 1;
  return s;
}

}  // namespace

TEST_CASE("operator distance is a metric on Hermitian matrices") {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const Eigen::MatrixXcd a = random_hermitian(rng, 4);
    const Eigen::MatrixXcd b = random_hermitian(rng, 4);
    const Eigen::MatrixXcd c = random_hermitian(rng, 4);
    const double ab = op_distance(a, b);
    const double ba = op_distance(b, a);
    const double ac = op_distance(a, c);
    const double cb = op_distance(c, b);
    CHECK(ab >= 0.0);
    CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(op_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  }
  Eigen::MatrixXcd d1 = Eigen::MatrixXcd::Zero(2, 2);
  Eigen::MatrixXcd d2 = Eigen::MatrixXcd::Zero(2, 2);
  d1(0, 0) = 0.9;
  d1(1, 1) = 0.1;
  d2(0, 0) = 0.4;
  d2(1, 1) = 0.6;
  CHECK(op_distance(d1, d2) == doctest::Approx(0.5));
}

TEST_CASE("time average integrates the trailing half window") {
  // With rho(t) = rho0 + t rho1 the trapezoid average over [t/2, t] is exact
  // and equals rho0 + (3t/4) rho1 before renormalization.
  std::mt19937_64 rng(7);
  Eigen::MatrixXcd rho0 = random_hermitian(rng, 2);
  Eigen::MatrixXcd rho1 = random_hermitian(rng, 2);
  rho0 += 10.0 * Eigen::MatrixXcd::Identity(2, 2);  // keep traces positive
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> rdms;
  for (int i = 0; i <= 40; ++i) {
    times.push_back(0.1 * i);
    rdms.push_back(rho0 + times.back() * rho1);
  }
  const double t = 4.0;
  const Eigen::MatrixXcd got = time_average_rdm(times, rdms, t);
  Eigen::MatrixXcd want = rho0 + 0.75 * t * rho1;
  want /= want.trace().real();
  CHECK((got - want).norm() < 1e-12);
  CHECK_THROWS(time_average_rdm({0.0, 1.0}, {rdms[0], rdms[1]}, 0.5));
}

TEST_CASE("inverse square root fit recovers planted coefficients") {
  std::vector<double> times, values;
  for (int i = 0; i < 50; ++i) {
    const double t = 1.0 + 0.25 * i;
    times.push_back(t);
    values.push_back(0.042 + 0.3 / std::sqrt(t));
  }
  const InverseSqrtFit fit = fit_asymptote_inverse_sqrt(times, values, 3.0);
  CHECK(fit.a == doctest::Approx(0.042).epsilon(1e-10));
  CHECK(fit.b == doctest::Approx(0.3).epsilon(1e-10));
  CHECK(fit.rms < 1e-12);
  CHECK(fit.n == 42);
}

TEST_CASE("distance series carries instantaneous and averaged values") {
  std::mt19937_64 rng(11);
  const Eigen::MatrixXcd ref =
      Eigen::MatrixXcd::Identity(2, 2) / 2.0;
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> prim, sec;
  for (int i = 0; i <= 20; ++i) {
    times.push_back(0.5 * i);
    Eigen::MatrixXcd rho = ref;
    rho(0, 0) += 0.01 * i;
    rho(1, 1) -= 0.01 * i;
    prim.push_back(rho);
    Eigen::MatrixXcd rho2 = rho;
    rho2(0, 1) = rho2(1, 0) = 0.001;
    sec.push_back(rho2);
  }
  const DistanceSeries d =
      distance_series(series_from(times, prim), series_from(times, sec), ref);
  REQUIRE(d.times.size() == times.size());
  CHECK(d.d_inst[0] == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(d.d_inst[10] == doctest::Approx(0.1).epsilon(1e-10));
  // Too few samples in [t/2, t] at the start: averaged value is NaN.
  CHECK(std::isnan(d.d_avg[0]));
  CHECK(std::isfinite(d.d_avg.back()));
  for (size_t i = 0; i < d.times.size(); ++i) {
    CHECK(d.err_inst[i] >= 0.0);
    if (std::isfinite(d.d_avg[i])) CHECK(d.err_avg[i] >= 0.0);
  }
}

TEST_CASE("peak to trough measures the tail spread") {
  const std::vector<double> times{0, 1, 2, 3, 4, 5};
  const std::vector<double> values{5.0, 0.2, 0.8, 0.3, 0.9, 0.4};
  CHECK(peak_to_trough(times, values, 2.0) == doctest::Approx(0.6));
  CHECK(peak_to_trough(times, values, 0.0) == doctest::Approx(4.8));
}

TEST_CASE("regime calls on planted series") {
  auto make = [](double floor, double amp) {
    DistanceSeries d;
    for (int i = 0; i <= 120; ++i) {
      const double t = 0.1 * i;
      d.times.push_back(t);
      d.d_inst.push_back(floor + (t > 0 ? amp / std::sqrt(t + 0.1) : amp));
      d.d_avg.push_back(floor + (t > 0 ? amp / std::sqrt(t + 0.1) : amp));
      d.err_inst.push_back(0.0);
      d.err_avg.push_back(0.0);
    }
    return d;
  };
  SUBCASE("instantaneous decay to zero reads strong") {
    const RegimeCall call = classify_regime(make(0.001, 0.1));
    CHECK(call.regime == Regime::strong);
    CHECK(call.final_quarter_max < 0.05);
  }
  SUBCASE("persistent oscillation with a decaying average reads weak") {
    DistanceSeries d = make(0.002, 0.05);
    for (size_t i = 0; i < d.times.size(); ++i)
      d.d_inst[i] += 0.3 * (1.0 + std::sin(3.0 * d.times[i]));
    const RegimeCall call = classify_regime(d);
    CHECK(call.regime == Regime::weak);
    CHECK(call.avg_fit.a < 0.05);
  }
  SUBCASE("flat offset in both signals reads none") {
    const RegimeCall call = classify_regime(make(0.4, 0.05));
    CHECK(call.regime == Regime::none);
  }
  SUBCASE("loosening the strong cutoff upgrades the verdict") {
    DistanceSeries d = make(0.06, 0.02);
    RegimeThresholds strict;
    strict.strong_distance = 0.05;
    RegimeThresholds loose = strict;
    loose.strong_distance = 0.2;
    CHECK(classify_regime(d, strict).regime != Regime::strong);
    CHECK(classify_regime(d, loose).regime == Regime::strong);
  }
}

TEST_CASE("energy drift conventions") {
  RunSeries s;
  s.times = {0, 1, 2};
  s.energy = {-1.5, -1.47, -1.53};
  CHECK(energy_drift(s) == doctest::Approx(0.02));
  RunSeries z;
  z.times = {0, 1};
  z.energy = {0.0, 0.03};
  // Initial energy at zero: the drift stays absolute.
  CHECK(energy_drift(z) == doctest::Approx(0.03));
}

TEST_CASE("bloch sweep matches product energies to the curve") {
  // A synthetic linear curve lets every matched beta be predicted in closed
  // form: E = -2 beta on beta in [-1, 1].
  ThermalCurve curve;
  for (int i = 0; i <= 200; ++i) {
    curve.betas.push_back(-1.0 + 0.01 * i);
    curve.energies.push_back(-2.0 * curve.betas.back());
  }
  const Params p;
  const std::vector<BlochPoint> grid = bloch_sweep(p, curve, 5, 6);
  REQUIRE(!grid.empty());
  int ok_count = 0;
  for (const BlochPoint& pt : grid) {
    if (!pt.ok) continue;
    ++ok_count;
    CHECK(pt.energy ==
          doctest::Approx(product_energy({pt.theta, pt.phi}, p)).epsilon(1e-10));
    CHECK(pt.beta == doctest::Approx(-pt.energy / 2.0).epsilon(1e-6));
  }
  CHECK(ok_count > 10);
  // X+ sits at energy 1.05, inside the synthetic range, so the pole rows
  // and the equator all resolve.
  for (const BlochPoint& pt : grid)
    if (!pt.ok) CHECK(!pt.message.empty());
}
