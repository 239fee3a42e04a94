#include "tnq/analysis.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "tnq/linalg.hpp"

namespace tnq {

double op_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw std::invalid_argument("operator shapes differ");
  Eigen::MatrixXcd diff = a - b;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  EighComplex eg = eigh(diff);
  double mx = 0.0;
  for (long i = 0; i < eg.values.size(); ++i)
    mx = std::max(mx, std::abs(eg.values(i)));
  return mx;
}

Eigen::MatrixXcd time_average_rdm(const std::vector<double>& times,
                                  const std::vector<Eigen::MatrixXcd>& rdms,
                                  double t) {
  if (times.size() != rdms.size())
    throw std::invalid_argument("sample count mismatch");
  const double lo = t / 2.0, hi = t;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (times[i] >= lo - 1e-9 && times[i] <= hi + 1e-9) idx.push_back(i);
  if (idx.size() < 2)
    throw std::invalid_argument("window holds fewer than two samples");
  Eigen::MatrixXcd acc =
      Eigen::MatrixXcd::Zero(rdms[idx[0]].rows(), rdms[idx[0]].cols());
  double span = 0.0;
  for (std::size_t j = 0; j + 1 < idx.size(); ++j) {
    const double dt = times[idx[j + 1]] - times[idx[j]];
    acc += 0.5 * dt * (rdms[idx[j]] + rdms[idx[j + 1]]);
    span += dt;
  }
  acc /= span;
  acc = 0.5 * (acc + acc.adjoint()).eval();
  const double tr = acc.trace().real();
  if (std::abs(tr) < 1e-300)
    throw std::runtime_error("averaged matrix lost its trace");
  return acc / tr;
}

InverseSqrtFit fit_asymptote_inverse_sqrt(const std::vector<double>& times,
                                          const std::vector<double>& values,
                                          double t_min) {
  if (times.size() != values.size())
    throw std::invalid_argument("sample count mismatch");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_min || !std::isfinite(values[i])) continue;
    x.push_back(1.0 / std::sqrt(times[i]));
    y.push_back(values[i]);
  }
  InverseSqrtFit fit;
  fit.n = int(x.size());
  if (fit.n < 5)
    throw std::invalid_argument("fewer than five points beyond t_min");
  double sx = 0, sxx = 0, sy = 0, sxy = 0;
  for (int i = 0; i < fit.n; ++i) {
    sx += x[i];
    sxx += x[i] * x[i];
    sy += y[i];
    sxy += x[i] * y[i];
  }
  const double det = fit.n * sxx - sx * sx;
  if (std::abs(det) < 1e-300)
    throw std::runtime_error("degenerate fit window");
  fit.b = (fit.n * sxy - sx * sy) / det;
  fit.a = (sy - fit.b * sx) / fit.n;
  double ss = 0.0;
  for (int i = 0; i < fit.n; ++i) {
    const double r = y[i] - fit.a - fit.b * x[i];
    ss += r * r;
  }
  fit.rms = std::sqrt(ss / fit.n);
  return fit;
}

DistanceSeries distance_series(const RunSeries& primary,
                               const RunSeries& secondary,
                               const Eigen::MatrixXcd& reference) {
  if (primary.times.size() != primary.rdms.size())
    throw std::invalid_argument("primary run lacks window matrices");
  const bool have_secondary = !secondary.times.empty();
  const double nan = std::numeric_limits<double>::quiet_NaN();

  auto build = [&](const RunSeries& run) {
    std::pair<std::vector<double>, std::vector<double>> out;
    for (std::size_t i = 0; i < run.times.size(); ++i) {
      out.first.push_back(op_distance(run.rdms[i], reference));
      double avg = nan;
      try {
        avg = op_distance(
            time_average_rdm(run.times, run.rdms, run.times[i]), reference);
      } catch (const std::invalid_argument&) {
      }
      out.second.push_back(avg);
    }
    return out;
  };

  DistanceSeries series;
  series.times = primary.times;
  auto [inst_p, avg_p] = build(primary);
  series.d_inst = std::move(inst_p);
  series.d_avg = std::move(avg_p);
  series.err_inst.assign(series.times.size(), 0.0);
  series.err_avg.assign(series.times.size(), 0.0);
  if (have_secondary) {
    auto [inst_s, avg_s] = build(secondary);
    const std::size_t n = std::min(inst_s.size(), series.times.size());
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(secondary.times[i] - series.times[i]) > 1e-9) break;
      series.err_inst[i] = std::abs(series.d_inst[i] - inst_s[i]);
      if (std::isfinite(series.d_avg[i]) && std::isfinite(avg_s[i]))
        series.err_avg[i] = std::abs(series.d_avg[i] - avg_s[i]);
    }
  }
  return series;
}

double peak_to_trough(const std::vector<double>& times,
                      const std::vector<double>& values, double t_from) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < t_from || !std::isfinite(values[i])) continue;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  if (!(hi >= lo)) throw std::invalid_argument("empty tail window");
  return hi - lo;
}

RegimeCall classify_regime(const DistanceSeries& series,
                           const RegimeThresholds& thresholds) {
  if (series.times.size() < 4)
    throw std::invalid_argument("series too short to classify");
  RegimeCall call;
  const double t_end = series.times.back();
  const double t_q = 0.75 * t_end;
  double mx = 0.0;
  int n_q = 0;
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    if (series.times[i] < t_q) continue;
    mx = std::max(mx, series.d_inst[i]);
    ++n_q;
  }
  call.final_quarter_max = mx;
  if (n_q >= 2 && mx < thresholds.strong_distance) {
    call.regime = Regime::strong;
    if (mx > 0.8 * thresholds.strong_distance) {
      call.low_confidence = true;
      call.note = "final-quarter distance close to the cutoff";
    }
    return call;
  }

  bool fit_ok = false;
  try {
    call.avg_fit = fit_asymptote_inverse_sqrt(series.times, series.d_avg,
                                              thresholds.fit_t_min);
    fit_ok = true;
  } catch (const std::exception& e) {
    call.note = std::string("averaged-distance fit unavailable: ") + e.what();
  }
  if (fit_ok && call.avg_fit.a < thresholds.weak_asymptote &&
      call.avg_fit.rms < thresholds.fit_residual) {
    call.regime = Regime::weak;
    if (call.avg_fit.a > 0.8 * thresholds.weak_asymptote ||
        call.avg_fit.rms > 0.8 * thresholds.fit_residual) {
      call.low_confidence = true;
      call.note = "fit sits close to the acceptance edge";
    }
    return call;
  }
  call.regime = Regime::none;
  if (fit_ok && call.avg_fit.a < 1.2 * thresholds.weak_asymptote) {
    call.low_confidence = true;
    call.note = "fitted asymptote marginally above the cutoff";
  }
  return call;
}

double energy_drift(const RunSeries& series) {
  if (series.energy.empty()) throw std::invalid_argument("empty run");
  const double e0 = series.energy.front();
  double worst = 0.0;
  for (double e : series.energy) {
    const double d =
        std::abs(e0) < 0.1 ? std::abs(e - e0) : std::abs((e - e0) / e0);
    worst = std::max(worst, d);
  }
  return worst;
}

std::vector<BlochPoint> bloch_sweep(const Params& p, const ThermalCurve& curve,
                                    int n_theta, int n_phi) {
  if (n_theta < 2 || n_phi < 1) throw std::invalid_argument("grid too small");
  std::vector<BlochPoint> out;
  for (int it = 0; it < n_theta; ++it) {
    const double theta = M_PI * it / (n_theta - 1);
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = 2.0 * M_PI * ip / n_phi;
      BlochPoint pt;
      pt.theta = theta;
      pt.phi = phi;
      pt.energy = product_energy(ProductState{theta, phi}, p);
      try {
        pt.beta = beta_for_energy(curve, pt.energy);
        pt.ok = true;
      } catch (const std::exception& e) {
        pt.message = e.what();
      }
      out.push_back(pt);
      if (theta == 0.0 || theta == M_PI) break;  // poles need one phi only
    }
  }
  return out;
}

}  // namespace tnq
