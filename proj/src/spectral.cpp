#include "tnq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

#include "tnq/linalg.hpp"

namespace tnq {

namespace {

// Site j lives on bit j; translation moves bit j to bit j+1 cyclically.
long translate(long n, int L) {
  const long mask = (1L << L) - 1;
  return ((n << 1) | (n >> (L - 1))) & mask;
}

long reflect(long n, int L) {
  long out = 0;
  for (int j = 0; j < L; ++j)
    if (n & (1L << j)) out |= 1L << (L - 1 - j);
  return out;
}

// Smallest orbit member and the shift carrying n onto it.
void orbit_rep(long n, int L, long& rep, int& shift, int& period) {
  rep = n;
  shift = 0;
  period = L;
  long m = n;
  for (int j = 1; j <= L; ++j) {
    m = translate(m, L);
    if (m == n && j < period) period = j;
    if (j < L && m < rep) {
      rep = m;
      shift = j;
    }
  }
}

double diagonal_energy(long n, int L, const Params& p) {
  double e = 0.0;
  for (int j = 0; j < L; ++j) {
    const double zj = (n >> j) & 1 ? -1.0 : 1.0;
    const double zn = (n >> ((j + 1) % L)) & 1 ? -1.0 : 1.0;
    e += -zj * zn - p.h * zj;
  }
  return e;
}

struct SectorBasis {
  std::vector<long> reps;
  std::vector<int> periods;
  std::vector<long> index_of;  // 2^L entries, -1 when absent
};

SectorBasis build_sector(int k, int L) {
  SectorBasis basis;
  basis.index_of.assign(1L << L, -1);
  for (long n = 0; n < (1L << L); ++n) {
    long rep;
    int shift, period;
    orbit_rep(n, L, rep, shift, period);
    if (rep != n) continue;
    if ((long(k) * period) % L != 0) continue;
    basis.index_of[n] = long(basis.reps.size());
    basis.reps.push_back(n);
    basis.periods.push_back(period);
  }
  return basis;
}

Eigen::MatrixXcd sector_hamiltonian(const SectorBasis& basis, int k, int L,
                                    const Params& p) {
  const long d = long(basis.reps.size());
  Eigen::MatrixXcd hmat = Eigen::MatrixXcd::Zero(d, d);
  const double w = -2.0 * M_PI * k / L;
  for (long ia = 0; ia < d; ++ia) {
    const long a = basis.reps[ia];
    hmat(ia, ia) += diagonal_energy(a, L, p);
    for (int j = 0; j < L; ++j) {
      const long s = a ^ (1L << j);
      long rep;
      int shift, period;
      orbit_rep(s, L, rep, shift, period);
      const long ib = basis.index_of[rep];
      if (ib < 0) continue;
      const double amp =
          -p.g * std::sqrt(double(basis.periods[ia]) / basis.periods[ib]);
      hmat(ib, ia) += amp * std::polar(1.0, w * shift);
    }
  }
  return hmat;
}

// Reflection within the k=0 or k=L/2 block is a signed permutation of the
// momentum basis; the sign at k=L/2 tracks the shift aligning the mirrored
// representative.
Eigen::MatrixXd reflection_matrix(const SectorBasis& basis, int k, int L) {
  const long d = long(basis.reps.size());
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(d, d);
  for (long ia = 0; ia < d; ++ia) {
    const long m = reflect(basis.reps[ia], L);
    long rep;
    int shift, period;
    orbit_rep(m, L, rep, shift, period);
    const long ib = basis.index_of[rep];
    if (ib < 0) throw std::logic_error("reflection left the block");
    double sign = 1.0;
    if (k != 0 && shift % 2 != 0) sign = -1.0;
    r(ib, ia) = sign;
  }
  return r;
}

std::vector<double> eigenvalues_of(const Eigen::MatrixXcd& hmat) {
  EighComplex eg = eigh(hmat);
  std::vector<double> out(eg.values.data(),
                          eg.values.data() + eg.values.size());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

std::vector<SectorSpectrum> resolved_sector_spectra(const Params& p, int L) {
  if (L < 4 || L > 16 || L % 2 != 0)
    throw std::invalid_argument("chain length must be even and in [4,16]");
  std::vector<SectorSpectrum> out;
  for (int k : {0, L / 2}) {
    const SectorBasis basis = build_sector(k, L);
    const Eigen::MatrixXcd hmat = sector_hamiltonian(basis, k, L, p);
    const Eigen::MatrixXd refl = reflection_matrix(basis, k, L);
    EighReal re = eigh(refl);
    for (int parity : {1, -1}) {
      std::vector<long> cols;
      for (long c = 0; c < re.values.size(); ++c)
        if (std::abs(re.values(c) - parity) < 1e-8) cols.push_back(c);
      Eigen::MatrixXcd v(refl.rows(), long(cols.size()));
      for (std::size_t c = 0; c < cols.size(); ++c)
        v.col(c) = re.vectors.col(cols[c]).cast<cxd>();
      SectorSpectrum s;
      s.k = k;
      s.parity = parity;
      s.energies = eigenvalues_of(v.adjoint() * hmat * v);
      out.push_back(std::move(s));
    }
  }
  for (int k = 1; k < L / 2; ++k) {
    const SectorBasis basis = build_sector(k, L);
    SectorSpectrum s;
    s.k = k;
    s.parity = 0;
    s.energies = eigenvalues_of(sector_hamiltonian(basis, k, L, p));
    out.push_back(std::move(s));
  }
  return out;
}

double wigner_cdf(double s) {
  if (s <= 0) return 0.0;
  return 1.0 - std::exp(-M_PI * s * s / 4.0);
}

double poisson_cdf(double s) {
  if (s <= 0) return 0.0;
  return 1.0 - std::exp(-s);
}

double mean_gap_ratio(const std::vector<double>& levels) {
  double sum = 0.0;
  long cnt = 0;
  for (std::size_t i = 0; i + 2 < levels.size(); ++i) {
    const double d1 = levels[i + 1] - levels[i];
    const double d2 = levels[i + 2] - levels[i + 1];
    const double hi = std::max(d1, d2);
    if (hi <= 0) continue;
    sum += std::min(d1, d2) / hi;
    ++cnt;
  }
  if (cnt == 0) throw std::invalid_argument("too few levels for gap ratios");
  return sum / cnt;
}

std::vector<double> unfolded_spacings(const std::vector<double>& energies,
                                      double lo, double hi, double trim_frac,
                                      int degree) {
  const long n = long(energies.size());
  if (n < degree + 2) throw std::invalid_argument("block too small to unfold");
  std::vector<double> e(energies);
  std::sort(e.begin(), e.end());
  // Map energies to [-1,1] to keep the Vandermonde system well behaved.
  const double e0 = e.front(), e1 = e.back();
  const double span = std::max(e1 - e0, 1e-12);
  Eigen::MatrixXd vand(n, degree + 1);
  Eigen::VectorXd stair(n);
  for (long i = 0; i < n; ++i) {
    const double x = 2.0 * (e[i] - e0) / span - 1.0;
    double xp = 1.0;
    for (int c = 0; c <= degree; ++c) {
      vand(i, c) = xp;
      xp *= x;
    }
    stair(i) = double(i) + 0.5;
  }
  const Eigen::VectorXd coef = vand.colPivHouseholderQr().solve(stair);
  const Eigen::VectorXd unfolded = vand * coef;

  const long cut = long(std::floor(trim_frac * n));
  std::vector<double> out;
  for (long i = cut; i + 1 < n - cut; ++i) {
    if (lo < hi && (e[i] < lo || e[i + 1] > hi)) continue;
    out.push_back(std::max(0.0, unfolded(i + 1) - unfolded(i)));
  }
  return out;
}

SpacingStats pooled_spacing_stats(const std::vector<SectorSpectrum>& sectors,
                                  int L, double center_per_site,
                                  double width_per_site) {
  SpacingStats stats;
  double lo = 1.0, hi = -1.0;  // inverted means no window
  if (width_per_site > 0) {
    lo = (center_per_site - width_per_site / 2.0) * L;
    hi = (center_per_site + width_per_site / 2.0) * L;
  }
  double r_sum = 0.0;
  long r_cnt = 0;
  for (const SectorSpectrum& s : sectors) {
    // Blocks below the unfolding fit's support carry no usable statistics;
    // at small L the odd-parity zero-momentum block can be this small.
    if (long(s.energies.size()) < 9) continue;
    std::vector<double> sp = unfolded_spacings(s.energies, lo, hi);
    stats.spacings.insert(stats.spacings.end(), sp.begin(), sp.end());
    // Raw-gap ratios, windowed on the center level of each triple.
    const std::vector<double>& e = s.energies;
    for (std::size_t i = 0; i + 2 < e.size(); ++i) {
      if (lo < hi && (e[i + 1] < lo || e[i + 1] > hi)) continue;
      const double d1 = e[i + 1] - e[i];
      const double d2 = e[i + 2] - e[i + 1];
      const double top = std::max(d1, d2);
      if (top <= 0) continue;
      r_sum += std::min(d1, d2) / top;
      ++r_cnt;
    }
  }
  if (stats.spacings.empty() || r_cnt == 0)
    throw std::runtime_error("window left no usable levels");
  stats.r_mean = r_sum / r_cnt;

  constexpr int kBins = 40;
  constexpr double kMax = 4.0;
  std::vector<double> mass(kBins, 0.0);
  double tail = 0.0;
  for (double s : stats.spacings) {
    if (s >= kMax)
      tail += 1.0;
    else
      mass[int(s / kMax * kBins)] += 1.0;
  }
  const double total = double(stats.spacings.size());
  stats.hist_density.assign(kBins, 0.0);
  double l1w = 0.0, l1p = 0.0;
  for (int b = 0; b < kBins; ++b) {
    const double p = mass[b] / total;
    const double s0 = b * kMax / kBins, s1 = (b + 1) * kMax / kBins;
    l1w += std::abs(p - (wigner_cdf(s1) - wigner_cdf(s0)));
    l1p += std::abs(p - (poisson_cdf(s1) - poisson_cdf(s0)));
    stats.hist_density[b] = p / (kMax / kBins);
  }
  l1w += std::abs(tail / total - (1.0 - wigner_cdf(kMax)));
  l1p += std::abs(tail / total - (1.0 - poisson_cdf(kMax)));
  stats.l1_wigner = l1w;
  stats.l1_poisson = l1p;
  return stats;
}

std::vector<double> poisson_levels(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> gap(1.0);
  std::vector<double> levels(n);
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += gap(rng);
    levels[i] = acc;
  }
  return levels;
}

std::vector<double> goe_middle_levels(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd a(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) a(i, j) = gauss(rng);
  Eigen::MatrixXd sym = (a + a.transpose()) / 2.0;
  EighReal eg = eigh(sym);
  std::vector<double> all(eg.values.data(), eg.values.data() + n);
  std::sort(all.begin(), all.end());
  return std::vector<double>(all.begin() + n / 4, all.begin() + 3 * n / 4);
}

}  // namespace tnq
