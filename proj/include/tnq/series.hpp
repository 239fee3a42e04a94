#pragma once

#include <string>
#include <vector>

#include "tnq/linalg.hpp"

namespace tnq {

// Time series produced by any of the quench backends. All vectors share the
// indexing of `times`; entropy and renyi2 stay empty for backends that do not
// expose a spatial cut. rdms holds the n-site window density matrix at each
// sample, Hermitian with unit trace.
struct RunSeries {
  std::vector<double> times;
  std::vector<double> sx, sy, sz;  // one-site expectations, window center
  std::vector<double> energy;      // per site, from the two-site marginal
  std::vector<double> entropy;     // half-cut von Neumann entropy
  std::vector<double> renyi2;      // half-cut Renyi-2 entropy
  std::vector<int> bond_dim;
  std::vector<double> truncation_error;  // discarded weight, accumulated
  std::vector<Eigen::MatrixXcd> rdms;
  int rdm_sites = 0;
  // Set when the run stopped early or its energy drifted by more than a
  // fifth of the initial scale; `note` carries the diagnostic.
  bool unreliable = false;
  std::string note;
};

}  // namespace tnq
