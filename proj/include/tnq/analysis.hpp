#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "tnq/hamiltonian.hpp"
#include "tnq/series.hpp"
#include "tnq/thermal.hpp"

namespace tnq {

// Operator-norm distance between two Hermitian matrices; the difference is
// symmetrized before its extremal eigenvalue is taken.
double op_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

// Trapezoid average of the sampled window matrices over [t/2, t],
// re-Hermitized and normalized to unit trace.  Requires at least two
// samples inside the window.
Eigen::MatrixXcd time_average_rdm(const std::vector<double>& times,
                                  const std::vector<Eigen::MatrixXcd>& rdms,
                                  double t);

// Least-squares fit of y(t) = a + b / sqrt(t) over samples with t >= t_min.
struct InverseSqrtFit {
  double a = 0.0;
  double b = 0.0;
  double rms = 0.0;  // root mean square residual
  int n = 0;         // points used
};

InverseSqrtFit fit_asymptote_inverse_sqrt(const std::vector<double>& times,
                                          const std::vector<double>& values,
                                          double t_min = 3.0);

// Distance of a run to a fixed reference window matrix, instantaneous and
// time-averaged, with pointwise error bars from a companion run at lower
// bond dimension.  Averages that lack enough samples are NaN.
struct DistanceSeries {
  std::vector<double> times;
  std::vector<double> d_inst;
  std::vector<double> d_avg;
  std::vector<double> err_inst;
  std::vector<double> err_avg;
};

DistanceSeries distance_series(const RunSeries& primary,
                               const RunSeries& secondary,
                               const Eigen::MatrixXcd& reference);

// Largest spread of a signal at or beyond t_from.
double peak_to_trough(const std::vector<double>& times,
                      const std::vector<double>& values, double t_from);

// Relaxation categories and the thresholds that separate them.  Loosening
// a threshold can only move a run toward the stronger verdict.
enum class Regime { strong, weak, none };

struct RegimeThresholds {
  double strong_distance = 0.05;  // instantaneous, over the final quarter
  double weak_asymptote = 0.05;   // fitted averaged-distance asymptote
  double fit_residual = 0.05;     // rms ceiling for trusting the fit
  double fit_t_min = 3.0;
};

struct RegimeCall {
  Regime regime = Regime::none;
  double final_quarter_max = 0.0;  // instantaneous distance
  InverseSqrtFit avg_fit;
  bool low_confidence = false;
  std::string note;
};

RegimeCall classify_regime(const DistanceSeries& series,
                           const RegimeThresholds& thresholds = {});

// Worst energy drift over a run, relative to the initial value unless that
// value is too close to zero to divide by.
double energy_drift(const RunSeries& series);

// Thermal match over a grid of product states; failures are recorded per
// point instead of aborting the sweep.
struct BlochPoint {
  double theta = 0.0;
  double phi = 0.0;
  double energy = 0.0;
  double beta = 0.0;
  bool ok = false;
  std::string message;
};

std::vector<BlochPoint> bloch_sweep(const Params& p, const ThermalCurve& curve,
                                    int n_theta, int n_phi);

}  // namespace tnq
