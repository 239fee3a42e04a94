#pragma once

#include "tnq/mps.hpp"
#include "tnq/series.hpp"
#include "tnq/trotter.hpp"

namespace tnq {

// Translation-invariant product start: both cell tensors carry the given
// one-site state on bond dimension 1.
UniformMPS init_product(const Eigen::VectorXcd& site);

// Apply one gate layer on every bond of the given parity in the weight/tensor
// gauge, splitting the two-site wavefunction with a truncated SVD. The gate
// is (d^2 x d^2) acting on the ordered pair, row-major grouping. Returns the
// discarded weight of the split. Bond weights come back unit-normalized, so
// the state stays normalized in both real and imaginary time.
double apply_gate_layer(UniformMPS& state, const Eigen::MatrixXcd& gate,
                        int parity, long chi_max, double cutoff);

// One full Trotter step (all layers of the schedule). Returns accumulated
// discarded weight.
double step(UniformMPS& state, const GateSchedule& sched, long chi_max,
            double cutoff = 1e-12);

// <op> on one site of the cell (0 or 1), assuming canonical gauge.
double local_expectation_at(const UniformMPS& state,
                            const Eigen::MatrixXcd& op, int site);

// Averaged over the two cell alignments; the physical chain is
// translation invariant and the two-site cell is an artifact of the layer
// parities, so the average is the meaningful value.
double local_expectation(const UniformMPS& state, const Eigen::MatrixXcd& op);

// Window density matrix of n consecutive sites starting at cell position
// `start` (0 or 1); Hermitian, unit trace.
Eigen::MatrixXcd rdm_window_at(const UniformMPS& state, int n, int start);

// Alignment-averaged window density matrix.
Eigen::MatrixXcd rdm_window(const UniformMPS& state, int n);

// tr(rho2 h2), averaged over the two bonds of the cell.
double energy_density(const UniformMPS& state, const Params& p);

struct QuenchSettings {
  double t_max = 10.0;
  double sample_every = 0.2;  // must be an integer multiple of delta
  double delta = 0.1;
  int order = 2;
  long chi_max = 120;
  double cutoff = 1e-12;
  int rdm_sites = 3;
};

// Quench from a product state: evolve, sample window observables, flag the
// series unreliable when the energy per site drifts by more than 20% of its
// initial scale or an exception ends the run early (partial series kept).
RunSeries run_quench_itebd(const ProductState& s0, const Params& p,
                           const QuenchSettings& settings);

}  // namespace tnq
