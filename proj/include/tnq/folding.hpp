#pragma once

#include <cstdint>

#include "tnq/series.hpp"
#include "tnq/tensor.hpp"
#include "tnq/trotter.hpp"

namespace tnq {

// Space-time transfer machinery: the evolution network is contracted along
// the space direction, with each lattice site contributing one column. A
// column is a matrix product operator running up the time axis; its virtual
// legs are spin legs doubled with their conjugate partner (dimension 4) and
// its physical legs are the doubled bond legs of the interaction layer
// (dimension 4). Boundary states on the space cut are finite MPS over the
// column rows with physical dimension 4 and their own bond dimension.

// Single-sheet slice advancing one symmetric sub-step tau:
//   exp(i (tau/2) (g X + h Z)) . exp(i tau Z Z') . exp(i (tau/2) (g X + h Z)),
// with the bond coupling factored symmetrically across left/right legs, so
// the tensor is invariant under swapping them. Index order (dn, up, l, r),
// all dimension 2.
DenseTensor forward_slice(const Params& p, double tau);

// forward_slice paired with its complex conjugate, every leg doubled to
// dimension 4 with forward-major grouping. Keeps the left/right symmetry.
DenseTensor folded_slice(const Params& p, double tau);

// Doubled caps: vec of the initial product state and of an inserted
// operator. The identity insertion closes the norm network.
Eigen::Vector4cd fold_state_cap(const ProductState& s);
Eigen::Vector4cd fold_operator_cap(const Eigen::Matrix2cd& op);

struct FoldedColumn {
  std::vector<DenseTensor> slices;  // bottom to top, each (4,4,4,4)
  Eigen::Vector4cd bottom;          // closes the first slice's dn leg
  Eigen::Vector4cd top;             // closes the last slice's up leg
};

// Column for n_steps full Trotter steps: one slice per sub-step, so n_steps
// rows at order 2 and 5 n_steps at order 4. Top cap is the identity.
FoldedColumn build_transfer_column(const ProductState& s0, const Params& p,
                                   double delta, int order, int n_steps);

// Boundary state on a space cut; site r's physical leg is row r's doubled
// bond leg. sites[r] has index order (bond_dn, phys, bond_up).
struct BoundaryMps {
  std::vector<DenseTensor> sites;
};

cxd boundary_overlap(const BoundaryMps& a, const BoundaryMps& b);
double boundary_norm(const BoundaryMps& a);
long boundary_bond_dim(const BoundaryMps& a);

// One application of the column transfer map, growing then truncating the
// boundary bond: zip-up sweep with per-row SVD truncation to chi_max and
// relative cutoff. Result comes back unnormalized; its norm estimates the
// transfer eigenvalue when the input was normalized. Columns are symmetric
// under left/right exchange, so one routine serves both boundaries.
struct ApplyResult {
  BoundaryMps mps;
  double norm = 0.0;
  double discarded_weight = 0.0;
};
ApplyResult apply_column(const FoldedColumn& col, const BoundaryMps& mps,
                         long chi_max, double cutoff);

// Variational re-fit of guess onto E|base| at the guess's fixed bond
// dimensions: alternating one-site updates in mixed canonical gauge.
// Refines the zip-up's sequential truncation.
BoundaryMps fit_apply(const FoldedColumn& col, const BoundaryMps& base,
                      BoundaryMps guess, int sweeps);

struct BoundarySolve {
  BoundaryMps right;         // dominant eigenvector; the left one equals it
                             // because the columns are left/right symmetric
  double eigenvalue = 0.0;   // |lambda| from the last application
  double residual = 0.0;     // sqrt(2 (1 - overlap)) of the last power step
  double discarded_weight = 0.0;
  int iterations = 0;
  bool converged = false;
  // Truncation puts a floor under the successive-overlap deficit; once the
  // deficit stops shrinking the iteration has extracted everything the bond
  // cap allows, and the loop exits here with the floor in `residual`.
  bool stalled = false;
  // Raised when convergence stalls long enough to suggest competing
  // eigenvalues of comparable size; results stay usable as diagnostics.
  bool degenerate_warning = false;
};

// Power iteration on the norm column with a deterministic product-pattern
// start (or a warm start from a shorter column), one seeded random restart
// if the first attempt wanders without reaching a truncation floor, and a
// final variational refinement sweep.
BoundarySolve dominant_boundaries(const FoldedColumn& norm_column,
                                  long chi_max, double cutoff = 1e-12,
                                  double tol = 1e-8, int max_iter = 500,
                                  const BoundaryMps* warm = nullptr,
                                  std::uint64_t seed = 0);

// Window density matrix of n adjacent sites at the final time: n norm
// columns with open top legs, sandwiched between the boundary and its
// mirror image. Hermitized and normalized to unit trace.
Eigen::MatrixXcd reconstruct_rdm(const FoldedColumn& norm_column,
                                 const BoundaryMps& boundary, int n);

// Product of one-site operators on n adjacent sites via operator caps,
// normalized by the identity-cap contraction. Cross-checks the window
// reconstruction.
double expectation_pauli_string(const FoldedColumn& norm_column,
                                const BoundaryMps& boundary,
                                const std::vector<Eigen::Matrix2cd>& ops);

struct FoldSettings {
  double t_max = 10.0;
  double sample_every = 0.2;  // must be an integer multiple of delta
  double delta = 0.1;
  int order = 2;
  long chi_t = 120;  // boundary bond dimension cap
  double cutoff = 1e-12;
  int rdm_sites = 3;
  double tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
};

// Quench driver: boundaries are re-solved per sample time with warm starts
// from the previous sample. Spatial-cut entropies are not observable from
// the time-direction boundaries, so those series stay empty. Unconverged
// boundary solves flag the series unreliable but still contribute samples.
RunSeries run_quench_fold(const ProductState& s0, const Params& p,
                          const FoldSettings& settings);

}  // namespace tnq
