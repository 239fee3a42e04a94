#pragma once

#include <cstdint>
#include <vector>

#include "tnq/hamiltonian.hpp"

namespace tnq {

// Symmetry-resolved spectra of the periodic chain and spacing statistics.
// Translation blocks are labeled by integer momentum k in 0..L-1; the k=0
// and k=L/2 blocks are further split by reflection parity.  Momenta k and
// L-k carry identical spectra, so only one of each pair is kept.

struct SectorSpectrum {
  int k = 0;
  int parity = 0;  // +1 or -1 where reflection is resolved, 0 elsewhere
  std::vector<double> energies;  // ascending
};

// All resolved blocks: k=0 and k=L/2 split by parity, plus k=1..L/2-1.
// Requires even L between 4 and 16.
std::vector<SectorSpectrum> resolved_sector_spectra(const Params& p, int L);

// Reference spacing distributions via their distribution functions.
double wigner_cdf(double s);
double poisson_cdf(double s);

// Adjacent-gap-ratio reference means.
constexpr double kGapRatioPoisson = 0.38629436111989062;  // 2 ln 2 - 1
constexpr double kGapRatioGoe = 0.5307;

// Mean ratio of adjacent gaps min/max over an ascending level sequence.
double mean_gap_ratio(const std::vector<double>& levels);

// Unfolds one block by a degree-7 polynomial fit to its spectral staircase,
// drops trim_frac of the levels at each edge, and returns consecutive
// unfolded gaps.  When lo < hi, only gaps whose raw endpoints both lie in
// [lo, hi] survive.
std::vector<double> unfolded_spacings(const std::vector<double>& energies,
                                      double lo, double hi,
                                      double trim_frac = 0.02,
                                      int degree = 7);

// Spacing statistics pooled over all blocks.  A positive window width
// restricts to raw energies per site within width/2 of center; width <= 0
// keeps everything.  The histogram covers [0,4] in 40 bins plus the tail,
// and the distances are L1 between binned masses.
struct SpacingStats {
  std::vector<double> spacings;
  double r_mean = 0.0;
  double l1_wigner = 0.0;
  double l1_poisson = 0.0;
  std::vector<double> hist_density;  // 40 bins, probability density
};

SpacingStats pooled_spacing_stats(const std::vector<SectorSpectrum>& sectors,
                                  int L, double center_per_site = 0.0,
                                  double width_per_site = 0.0);

// Synthetic ensembles for calibrating the gap-ratio scale.
std::vector<double> poisson_levels(int n, std::uint64_t seed);

// Middle half of the spectrum of one n-by-n random real symmetric matrix.
std::vector<double> goe_middle_levels(int n, std::uint64_t seed);

}  // namespace tnq
