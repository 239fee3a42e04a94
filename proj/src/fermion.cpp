#include "tnq/fermion.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

namespace tnq {

namespace {

using cd = std::complex<double>;

// Occupation of the upper component after evolving one two-level mode.
double excited_weight(double k, double t, double g, bool from_coupling_gs) {
  const double a = 2.0 * (g - std::cos(k));
  const double b = 2.0 * std::sin(k);
  double p1 = 1.0, p2 = 0.0;
  if (from_coupling_gs) {
    const double nrm = std::sqrt(2.0 + 2.0 * std::cos(k));
    if (nrm < 1e-12) {
      p1 = 0.0;
      p2 = 1.0;
    } else {
      p1 = -std::sin(k) / nrm;
      p2 = (1.0 + std::cos(k)) / nrm;
    }
  }
  const double e = std::hypot(a, b);
  const double c = std::cos(e * t);
  const double s = e < 1e-12 ? t : std::sin(e * t) / e;
  // e^{-iHt} with H = [[-a, b], [b, a]].
  const cd u21 = cd(0.0, -s * b);
  const cd u22 = c - cd(0.0, s * a);
  const cd psi2 = u21 * p1 + u22 * p2;
  return std::norm(psi2);
}

struct GaussRule {
  double nodes[16];
  double weights[16];
};

// Nodes and weights of the 32-point Legendre rule on [-1,1], found by
// Newton refinement of Chebyshev estimates; only the positive half is
// stored.
const GaussRule& legendre32() {
  static const GaussRule rule = [] {
    GaussRule r;
    const int n = 32;
    for (int i = 0; i < 16; ++i) {
      double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
      double pp = 0.0;
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
          const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / pp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      r.nodes[i] = x;
      r.weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
    }
    return r;
  }();
  return rule;
}

double panel(const std::function<double(double)>& f, double a, double b) {
  const GaussRule& r = legendre32();
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < 16; ++i) {
    acc += r.weights[i] * f(mid + half * r.nodes[i]);
    acc += r.weights[i] * f(mid - half * r.nodes[i]);
  }
  return acc * half;
}

double adaptive(const std::function<double(double)>& f, double a, double b,
                double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, a, mid);
  const double right = panel(f, mid, b);
  if (std::abs(left + right - whole) < tol || depth >= 24)
    return left + right;
  return adaptive(f, a, mid, left, tol / 2.0, depth + 1) +
         adaptive(f, mid, b, right, tol / 2.0, depth + 1);
}

}  // namespace

std::vector<double> free_fermion_sigma_x(const std::string& initial, double g,
                                         const std::vector<double>& times) {
  bool from_gs;
  if (initial == "X+")
    from_gs = false;
  else if (initial == "Z+")
    from_gs = true;
  else
    throw std::invalid_argument("initial state must be X+ or Z+");
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) {
    auto f = [&](double k) { return excited_weight(k, t, g, from_gs); };
    const double whole = panel(f, 0.0, M_PI);
    const double integral = adaptive(f, 0.0, M_PI, whole, 1e-7, 0);
    out.push_back(1.0 - 2.0 / M_PI * integral);
  }
  return out;
}

}  // namespace tnq
