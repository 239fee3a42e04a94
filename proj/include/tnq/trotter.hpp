#pragma once

#include <vector>

#include "tnq/hamiltonian.hpp"

namespace tnq {

enum class TimeMode { real_time, imaginary_time };

// One gate layer: the same two-site gate on every bond of the given parity
// (0 = bonds (0,1),(2,3),...; 1 = bonds (1,2),(3,4),...).
struct GateItem {
  int parity = 0;
  double tau = 0.0;       // evolution time this layer advances on its bonds
  Eigen::Matrix4cd gate;  // exp(-i tau h2) in real time, exp(-tau h2) otherwise
};

// Layer sequence advancing one full step delta. Adjacent same-parity half
// layers are merged, so order 4 costs 11 layers per step instead of 15.
struct GateSchedule {
  Params params;
  double delta = 0.1;
  int order = 2;
  TimeMode mode = TimeMode::real_time;
  std::vector<GateItem> items;
};

// exp(-tau h) for real symmetric h via eigendecomposition. tau is complex so
// the same path serves unitary (tau = i dt) and Gibbs (tau real) evolution.
Eigen::Matrix4cd gate_exponential(const Eigen::Matrix4d& h, cxd tau);

// Orders 2 and 4 only; order 2 is the symmetric even/odd/even split and
// order 4 the five-fold fractal composition of it. delta must be nonzero.
GateSchedule build_schedule(const Params& p, double delta, int order,
                            TimeMode mode);

// Sub-step sizes, in units of delta, whose symmetric splits compose to one
// full step: {1} at order 2; {s, s, 1-4s, s, s} with s = 1/(4 - 4^(1/3)) at
// order 4, where the middle entry is negative.
std::vector<double> substep_fractions(int order);

}  // namespace tnq
