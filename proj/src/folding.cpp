#include "tnq/folding.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "tnq/hamiltonian.hpp"
#include "tnq/linalg.hpp"

namespace tnq {

namespace {

// exp(i (tau/2)(g X + h Z)) in closed form through the Bloch axis.
Eigen::Matrix2cd field_half(const Params& p, double tau) {
  const double n = std::hypot(p.g, p.h);
  const double th = 0.5 * tau * n;
  Eigen::Matrix2cd out = std::cos(th) * Eigen::Matrix2cd::Identity();
  if (n > 0.0)
    out += cxd(0.0, std::sin(th) / n) *
           (p.g * pauli_x() + p.h * pauli_z());
  return out;
}

// Split of the bond phase e^{i tau s s'} = sum_l c(l,s) c(l,s') with real
// weight vectors, which is what makes every slice symmetric in its bond
// legs. Requires |tau| < pi/2 so the first weight stays away from zero.
Eigen::Matrix2cd bond_split_factors(double tau) {
  if (std::abs(tau) >= M_PI / 2.0)
    throw std::invalid_argument("sub-step too large for the bond split");
  const cxd c1 = std::sqrt(cxd(std::cos(tau), 0.0));
  const cxd c2 = std::sqrt(cxd(0.0, std::sin(tau)));
  Eigen::Matrix2cd c;
  c(0, 0) = c1;
  c(0, 1) = c1;
  c(1, 0) = c2;
  c(1, 1) = -c2;
  return c;  // row = bond leg, column = spin (0 meaning s = +1)
}

}  // namespace

DenseTensor forward_slice(const Params& p, double tau) {
  const Eigen::Matrix2cd f = field_half(p, tau);
  const Eigen::Matrix2cd c = bond_split_factors(tau);
  DenseTensor t({2, 2, 2, 2});  // (dn, up, l, r)
  for (long dn = 0; dn < 2; ++dn)
    for (long up = 0; up < 2; ++up)
      for (long l = 0; l < 2; ++l)
        for (long r = 0; r < 2; ++r) {
          cxd acc = 0.0;
          for (long a = 0; a < 2; ++a)
            acc += f(up, a) * c(l, a) * c(r, a) * f(a, dn);
          t.at({dn, up, l, r}) = acc;
        }
  return t;
}

DenseTensor folded_slice(const Params& p, double tau) {
  const DenseTensor t = forward_slice(p, tau);
  DenseTensor s({4, 4, 4, 4});
  for (long df = 0; df < 2; ++df)
    for (long db = 0; db < 2; ++db)
      for (long uf = 0; uf < 2; ++uf)
        for (long ub = 0; ub < 2; ++ub)
          for (long lf = 0; lf < 2; ++lf)
            for (long lb = 0; lb < 2; ++lb)
              for (long rf = 0; rf < 2; ++rf)
                for (long rb = 0; rb < 2; ++rb)
                  s.at({df * 2 + db, uf * 2 + ub, lf * 2 + lb, rf * 2 + rb}) =
                      t.at({df, uf, lf, rf}) *
                      std::conj(t.at({db, ub, lb, rb}));
  return s;
}

Eigen::Vector4cd fold_state_cap(const ProductState& s) {
  const Eigen::Vector2cd v = bloch_vector(s);
  Eigen::Vector4cd cap;
  for (long f = 0; f < 2; ++f)
    for (long b = 0; b < 2; ++b) cap(f * 2 + b) = v(f) * std::conj(v(b));
  return cap;
}

Eigen::Vector4cd fold_operator_cap(const Eigen::Matrix2cd& op) {
  Eigen::Vector4cd cap;
  for (long f = 0; f < 2; ++f)
    for (long b = 0; b < 2; ++b) cap(f * 2 + b) = op(b, f);
  return cap;
}

FoldedColumn build_transfer_column(const ProductState& s0, const Params& p,
                                   double delta, int order, int n_steps) {
  if (n_steps < 1) throw std::invalid_argument("column needs at least a step");
  FoldedColumn col;
  col.bottom = fold_state_cap(s0);
  col.top = fold_operator_cap(Eigen::Matrix2cd::Identity());
  const std::vector<double> frac = substep_fractions(order);
  std::vector<DenseTensor> per_step;
  for (double f : frac) per_step.push_back(folded_slice(p, f * delta));
  for (int s = 0; s < n_steps; ++s)
    for (const DenseTensor& t : per_step) col.slices.push_back(t);
  return col;
}

cxd boundary_overlap(const BoundaryMps& a, const BoundaryMps& b) {
  if (a.sites.size() != b.sites.size())
    throw std::invalid_argument("boundary lengths differ");
  DenseTensor e({1, 1});
  e.data[0] = 1.0;
  for (std::size_t r = 0; r < a.sites.size(); ++r) {
    DenseTensor t = contract(e, a.sites[r].conjugate(), {{0, 0}});  // (b,x,a')
    e = contract(t, b.sites[r], {{0, 0}, {1, 1}});                  // (a',b')
  }
  return e.data[0];
}

double boundary_norm(const BoundaryMps& a) {
  return std::sqrt(std::max(0.0, boundary_overlap(a, a).real()));
}

long boundary_bond_dim(const BoundaryMps& a) {
  long chi = 1;
  for (const DenseTensor& s : a.sites) chi = std::max(chi, s.dim(2));
  return chi;
}

namespace {

void scale_boundary(BoundaryMps& a, double factor) {
  if (a.sites.empty()) return;
  for (cxd& v : a.sites.back().data) v *= factor;
}

BoundaryMps normalized(BoundaryMps a) {
  const double n = boundary_norm(a);
  if (n <= 0.0 || !std::isfinite(n))
    throw std::runtime_error("boundary state lost its norm");
  scale_boundary(a, 1.0 / n);
  return a;
}

// Product-pattern start: every row carries the doubled identity direction,
// the pattern the boundary takes when the column is trivial.
BoundaryMps product_boundary(std::size_t rows) {
  BoundaryMps b;
  for (std::size_t r = 0; r < rows; ++r) {
    DenseTensor site({1, 4, 1});
    site.data[0] = 1.0 / std::sqrt(2.0);
    site.data[3] = 1.0 / std::sqrt(2.0);
    b.sites.push_back(site);
  }
  return b;
}

BoundaryMps random_boundary(std::size_t rows, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ull);
  std::normal_distribution<double> dist(0.0, 1.0);
  BoundaryMps b;
  for (std::size_t r = 0; r < rows; ++r) {
    DenseTensor site({1, 4, 1});
    for (cxd& v : site.data) v = cxd(dist(rng), dist(rng));
    b.sites.push_back(site);
  }
  return normalized(b);
}

// Top-down truncation sweep in mixed canonical gauge. The zip-up leaves
// every site below the top left-orthonormal, so the singular values seen
// here are the state's own Schmidt weights and the cut is the best one
// available at this bond cap. The zip-up alone sees inflated spectra in its
// skew gauge and both overstates the rank and discards the wrong subspace
// when capped. Returns the relative weight dropped; the norm change is
// accumulated into log_norm.
double compress_boundary(BoundaryMps& b, long chi_max, double cutoff,
                         double& log_norm) {
  double dropped = 0.0;
  for (std::size_t r = b.sites.size(); r-- > 1;) {
    const DenseTensor& site = b.sites[r];
    const long d = site.dim(1), bb = site.dim(2);
    const SvdEcon e = svd_econ(tensor_to_matrix(site, 1));
    const double total = e.s.squaredNorm();
    if (total <= 0.0 || !std::isfinite(total))
      throw std::runtime_error("compression met a null block");
    const long kmax = std::min<long>(chi_max, e.s.size());
    long k = 1;
    while (k < kmax && e.s(k) >= cutoff * e.s(0)) ++k;
    double kept = 0.0;
    for (long i = 0; i < k; ++i) kept += e.s(i) * e.s(i);
    dropped += std::max(0.0, 1.0 - kept / total);
    b.sites[r] = matrix_to_tensor(e.vh.topRows(k), {k, d, bb});
    const DenseTensor carry = matrix_to_tensor(
        Eigen::MatrixXcd(e.u.leftCols(k) * e.s.head(k).asDiagonal()),
        {e.u.rows(), k});
    b.sites[r - 1] = contract(b.sites[r - 1], carry, {{2, 0}});
  }
  double n0 = 0.0;
  for (const cxd& v : b.sites[0].data) n0 += std::norm(v);
  n0 = std::sqrt(n0);
  if (n0 <= 0.0 || !std::isfinite(n0))
    throw std::runtime_error("compression annihilated the boundary");
  for (cxd& v : b.sites[0].data) v /= n0;
  log_norm += std::log(n0);
  return dropped;
}

}  // namespace

ApplyResult apply_column(const FoldedColumn& col, const BoundaryMps& mps,
                         long chi_max, double cutoff) {
  const std::size_t m = col.slices.size();
  if (m == 0) throw std::invalid_argument("empty column");
  if (mps.sites.size() != m)
    throw std::invalid_argument("boundary length does not match column");

  ApplyResult out;
  double log_norm = 0.0;

  // The zip-up sees the spectrum in a skew gauge, so it runs with headroom
  // above the requested cap and the canonical sweep below makes the cut
  // that counts.
  const long chi_zip = 2 * chi_max + 16;

  // Carried tensor (q, w, a): q the truncated new bond, w the doubled spin
  // leg entering the next row, a the old boundary bond.
  DenseTensor carry({1, 4, 1});
  for (long w = 0; w < 4; ++w) carry.at({0, w, 0}) = col.bottom(w);

  for (std::size_t r = 0; r < m; ++r) {
    // (a, a2, dn, up, l) after joining the old site with the slice.
    DenseTensor t1 = contract(mps.sites[r], col.slices[r], {{1, 3}});
    // (q, a2, up, l) after absorbing the carried block.
    DenseTensor t2 = contract(carry, t1, {{1, 2}, {2, 0}});
    DenseTensor theta = t2.permute({0, 3, 2, 1});  // (q, l, up, a2)
    if (r + 1 == m) {
      // Close the top leg with the cap; the remaining (q, l, 1) is the last
      // site of the new boundary.
      DenseTensor capped({theta.dim(0), theta.dim(1), 1});
      for (long q = 0; q < theta.dim(0); ++q)
        for (long x = 0; x < theta.dim(1); ++x) {
          cxd acc = 0.0;
          for (long w = 0; w < 4; ++w)
            acc += theta.at({q, x, w, 0}) * col.top(w);
          capped.at({q, x, 0}) = acc;
        }
      const double n = capped.norm();
      if (n <= 0.0 || !std::isfinite(n))
        throw std::runtime_error("column application annihilated the boundary");
      for (cxd& v : capped.data) v /= n;
      log_norm += std::log(n);
      out.mps.sites.push_back(std::move(capped));
      break;
    }
    const double theta_norm = theta.norm();
    if (theta_norm <= 0.0 || !std::isfinite(theta_norm))
      throw std::runtime_error("column application produced a null row");
    SvdResult split = truncated_svd(theta, chi_zip, cutoff);
    out.discarded_weight +=
        split.discarded_weight / (theta_norm * theta_norm);
    out.mps.sites.push_back(split.left);  // (q, l, k), orthonormal columns
    const double kept = std::sqrt(std::max(
        0.0, theta_norm * theta_norm - split.discarded_weight));
    log_norm += std::log(kept);
    carry = split.right;  // (k, up, a2)
    for (long i = 0; i < carry.size(); ++i) {
      const long k = i / (carry.dim(1) * carry.dim(2));
      carry.data[i] *= split.weights(k);
    }
  }
  out.discarded_weight += compress_boundary(out.mps, chi_max, cutoff, log_norm);
  out.norm = std::exp(log_norm);
  return out;
}

BoundaryMps fit_apply(const FoldedColumn& col, const BoundaryMps& base,
                      BoundaryMps guess, int sweeps) {
  const std::size_t m = col.slices.size();
  if (base.sites.size() != m || guess.sites.size() != m)
    throw std::invalid_argument("boundary length does not match column");
  if (m == 1) {
    // Single row: the optimum is the exact contraction.
    DenseTensor t1 = contract(base.sites[0], col.slices[0], {{1, 3}});
    // (a, a2, dn, up, l); close both caps.
    DenseTensor site({1, 4, 1});
    for (long x = 0; x < 4; ++x) {
      cxd acc = 0.0;
      for (long dn = 0; dn < 4; ++dn)
        for (long up = 0; up < 4; ++up)
          acc += col.bottom(dn) * t1.at({0, 0, dn, up, x}) * col.top(up);
      site.at({0, x, 0}) = acc;
    }
    BoundaryMps out;
    out.sites.push_back(site);
    return normalized(out);
  }

  // Right-canonicalize the guess from the top so the first upward sweep sees
  // orthonormal environments above the working site.
  for (std::size_t r = m - 1; r > 0; --r) {
    DenseTensor& site = guess.sites[r];
    const long a = site.dim(0), x = site.dim(1), b = site.dim(2);
    Eigen::MatrixXcd mat = tensor_to_matrix(site, 1);  // a rows, (x b) cols
    SvdEcon svd = svd_econ(mat);
    const long k = svd.s.size();
    guess.sites[r] = matrix_to_tensor(svd.vh, {k, x, b});
    Eigen::MatrixXcd carry = svd.u * svd.s.asDiagonal();
    DenseTensor ct = matrix_to_tensor(carry, {a, k});
    guess.sites[r - 1] = contract(guess.sites[r - 1], ct, {{2, 0}});
  }

  // env_below[r] and env_above[r] hold the contraction of all rows strictly
  // below/above r of <guess| column |base>, index order (guess bond, spin
  // leg, base bond).
  std::vector<DenseTensor> env_above(m);
  {
    DenseTensor top({1, 4, 1});
    for (long w = 0; w < 4; ++w) top.at({0, w, 0}) = col.top(w);
    env_above[m - 1] = top;
    for (std::size_t r = m - 1; r > 0; --r) {
      DenseTensor t1 = contract(base.sites[r], col.slices[r], {{1, 3}});
      // (a, a2, dn, up, l)
      DenseTensor t2 = contract(t1, env_above[r], {{1, 2}, {3, 1}});
      // (a, dn, l, g')
      DenseTensor t3 =
          contract(t2, guess.sites[r].conjugate(), {{2, 1}, {3, 2}});
      // (a, dn, g)
      env_above[r - 1] = t3.permute({2, 1, 0});  // (g, dn, a)
    }
  }

  DenseTensor bottom({1, 4, 1});
  for (long w = 0; w < 4; ++w) bottom.at({0, w, 0}) = col.bottom(w);

  auto local_update = [&](std::size_t r, const DenseTensor& below,
                          const DenseTensor& above) {
    DenseTensor t1 = contract(base.sites[r], col.slices[r], {{1, 3}});
    // (a, a2, dn, up, l)
    DenseTensor t2 = contract(below, t1, {{1, 2}, {2, 0}});
    // (g, a2, up, l)
    DenseTensor t3 = contract(t2, above, {{1, 2}, {2, 1}});
    // (g, l, g')  after contracting a2 with the base bond and up with spin
    return t3;
  };

  for (int sweep = 0; sweep < sweeps; ++sweep) {
    // Upward: orthonormalize each updated site from the left.
    std::vector<DenseTensor> env_below(m);
    env_below[0] = bottom;
    for (std::size_t r = 0; r < m; ++r) {
      DenseTensor y = local_update(r, env_below[r], env_above[r]);
      if (r + 1 < m) {
        const long g = y.dim(0), x = y.dim(1), gp = y.dim(2);
        SvdEcon svd = svd_econ(tensor_to_matrix(y, 2));  // (g x) rows
        guess.sites[r] = matrix_to_tensor(svd.u, {g, x, svd.u.cols()});
        // Rebuild the lower environment with the refreshed site.
        DenseTensor t1 = contract(base.sites[r], col.slices[r], {{1, 3}});
        DenseTensor t2 = contract(env_below[r], t1, {{1, 2}, {2, 0}});
        // (g, a2, up, l)
        DenseTensor t3 =
            contract(t2, guess.sites[r].conjugate(), {{0, 0}, {3, 1}});
        // (a2, up, g')
        env_below[r + 1] = t3.permute({2, 1, 0});  // (g', up, a2)
        (void)gp;
      } else {
        guess.sites[r] = y;
      }
    }
    // Downward: orthonormalize from the right, refreshing upper
    // environments.
    for (std::size_t r = m; r-- > 0;) {
      DenseTensor y = local_update(r, env_below[r], env_above[r]);
      if (r > 0) {
        const long g = y.dim(0), x = y.dim(1), gp = y.dim(2);
        SvdEcon svd = svd_econ(tensor_to_matrix(y, 1));  // g rows, (x g') cols
        const long k = svd.s.size();
        guess.sites[r] = matrix_to_tensor(svd.vh, {k, x, gp});
        DenseTensor t1 = contract(base.sites[r], col.slices[r], {{1, 3}});
        DenseTensor t2 = contract(t1, env_above[r], {{1, 2}, {3, 1}});
        // (a, dn, l, g')
        DenseTensor t3 =
            contract(t2, guess.sites[r].conjugate(), {{2, 1}, {3, 2}});
        // (a, dn, g)
        env_above[r - 1] = t3.permute({2, 1, 0});
        (void)g;
      } else {
        guess.sites[r] = y;
      }
    }
  }
  return normalized(std::move(guess));
}

BoundarySolve dominant_boundaries(const FoldedColumn& norm_column,
                                  long chi_max, double cutoff, double tol,
                                  int max_iter, const BoundaryMps* warm,
                                  std::uint64_t seed) {
  const std::size_t m = norm_column.slices.size();
  if (m == 0) throw std::invalid_argument("empty column");
  if (chi_max < 1) throw std::invalid_argument("bond cap must be positive");

  auto run_from = [&](BoundaryMps start, BoundarySolve& best) {
    BoundaryMps r = normalized(std::move(start));
    BoundarySolve solve;
    double best_deficit = 1.0;
    int since_improve = 0;
    for (int it = 0; it < max_iter; ++it) {
      ApplyResult applied = apply_column(norm_column, r, chi_max, cutoff);
      BoundaryMps next = normalized(std::move(applied.mps));
      const double c =
          std::min(1.0, std::abs(boundary_overlap(next, r)));
      const double deficit = 1.0 - c;
      solve.eigenvalue = applied.norm;
      solve.discarded_weight = applied.discarded_weight;
      solve.iterations = it + 1;
      solve.residual = std::sqrt(std::max(0.0, 2.0 * deficit));
      r = std::move(next);
      if (deficit < tol) {
        solve.converged = true;
        break;
      }
      // Truncation puts a floor under the deficit. Once it has sat at a
      // small floor without shrinking for several applications, more
      // iterations only burn time, so return the floor instead.
      if (deficit < 0.6 * best_deficit) {
        best_deficit = deficit;
        since_improve = 0;
      } else if (++since_improve >= 5 && best_deficit < 3e-2) {
        solve.stalled = true;
        break;
      }
      if (it + 1 >= 100) solve.degenerate_warning = true;
    }
    solve.right = std::move(r);
    if (!best.converged &&
        (solve.converged || best.right.sites.empty() ||
         solve.residual < best.residual))
      best = std::move(solve);
  };

  BoundarySolve best;
  BoundaryMps start;
  if (warm != nullptr && warm->sites.size() == m)
    start = *warm;
  else
    start = product_boundary(m);
  run_from(std::move(start), best);
  if (!best.converged && !best.stalled)
    run_from(random_boundary(m, seed), best);

  // Variational polish of the converged direction against one more
  // application of the column.
  if ((best.converged || best.stalled) && m >= 1) {
    BoundaryMps refined = fit_apply(norm_column, best.right, best.right, 2);
    const double c =
        std::min(1.0, std::abs(boundary_overlap(refined, best.right)));
    best.residual = std::sqrt(std::max(0.0, 2.0 * (1.0 - c)));
    best.right = std::move(refined);
  }
  return best;
}

namespace {

// Ladder of n adjacent norm columns between the boundary and its mirror;
// returns the tensor over the n open top legs (each of dimension 4).
DenseTensor open_ladder(const FoldedColumn& col, const BoundaryMps& left,
                        const BoundaryMps& right, int n) {
  const std::size_t m = col.slices.size();
  std::vector<long> shape(n + 2, 4);
  shape.front() = 1;
  shape.back() = 1;
  DenseTensor v(shape);
  // Start from the product of bottom caps.
  for (long i = 0; i < v.size(); ++i) {
    cxd acc = 1.0;
    long rem = i;
    for (int j = n - 1; j >= 0; --j) {
      acc *= col.bottom(rem % 4);
      rem /= 4;
    }
    v.data[i] = acc;
  }
  for (std::size_t r = 0; r < m; ++r) {
    // (d_1..d_n, b, x0, a') after absorbing the left site.
    DenseTensor t = contract(v, left.sites[r], {{0, 0}});
    for (int j = 0; j < n; ++j) {
      // The first column eats the boundary's spin leg, which sits one axis
      // before the bond; afterwards the dangling right leg is always last.
      const long xpos = (j == 0) ? t.rank() - 2 : t.rank() - 1;
      t = contract(t, col.slices[r], {{0, 0}, {xpos, 2}});
    }
    // (b, a', u_1..u_n, r_n) -> (a', u_1..u_n, b')
    t = contract(t, right.sites[r], {{0, 0}, {t.rank() - 1, 1}});
    v = std::move(t);
  }
  return v;
}

}  // namespace

Eigen::MatrixXcd reconstruct_rdm(const FoldedColumn& norm_column,
                                 const BoundaryMps& boundary, int n) {
  if (n < 1) throw std::invalid_argument("window must hold at least one site");
  DenseTensor v = open_ladder(norm_column, boundary, boundary, n);
  // v is (1, u_1..u_n, 1) with u = (forward spin, backward spin); regroup
  // all forward legs before all backward legs.
  std::vector<long> bits(2 * n + 2, 2);
  bits.front() = 1;
  bits.back() = 1;
  DenseTensor w = v.reshape(bits);
  std::vector<long> order;
  order.push_back(0);
  for (int j = 0; j < n; ++j) order.push_back(1 + 2 * j);
  for (int j = 0; j < n; ++j) order.push_back(2 + 2 * j);
  order.push_back(2 * n + 1);
  w = w.permute(order);
  const long d = 1L << n;
  Eigen::MatrixXcd rho(d, d);
  for (long a = 0; a < d; ++a)
    for (long b = 0; b < d; ++b) rho(a, b) = w.data[a * d + b];
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (!(std::abs(tr) > 0.0) || !std::isfinite(tr))
    throw std::runtime_error("window reconstruction lost its trace");
  return rho / tr;
}

double expectation_pauli_string(const FoldedColumn& norm_column,
                                const BoundaryMps& boundary,
                                const std::vector<Eigen::Matrix2cd>& ops) {
  const int n = int(ops.size());
  if (n < 1) throw std::invalid_argument("empty operator string");
  DenseTensor v = open_ladder(norm_column, boundary, boundary, n);
  cxd num = 0.0, den = 0.0;
  for (long i = 0; i < v.size(); ++i) {
    cxd wo = 1.0, wi = 1.0;
    long rem = i;
    for (int j = n - 1; j >= 0; --j) {
      const long u = rem % 4;
      rem /= 4;
      const long f = u / 2, b = u % 2;
      wo *= ops[j](b, f);
      wi *= (f == b) ? 1.0 : 0.0;
    }
    num += v.data[i] * wo;
    den += v.data[i] * wi;
  }
  if (std::abs(den) == 0.0)
    throw std::runtime_error("norm contraction vanished");
  return (num / den).real();
}

RunSeries run_quench_fold(const ProductState& s0, const Params& p,
                          const FoldSettings& settings) {
  if (settings.t_max < 0 || settings.sample_every <= 0 || settings.delta <= 0)
    throw std::invalid_argument("bad sampling window");
  const int per = int(std::round(settings.sample_every / settings.delta));
  if (per < 1 ||
      std::abs(per * settings.delta - settings.sample_every) > 1e-9)
    throw std::invalid_argument(
        "sample interval must be an integer multiple of the step");

  if (settings.rdm_sites < 2)
    throw std::invalid_argument("window must span at least one bond");

  RunSeries out;
  out.rdm_sites = settings.rdm_sites;
  const int nsamp = int(std::round(settings.t_max / settings.sample_every));
  const Eigen::Matrix2cd sx = pauli_x(), sy = pauli_y(), sz = pauli_z();
  const Eigen::MatrixXcd h2 = two_site_hamiltonian(p).cast<cxd>();
  const int n = settings.rdm_sites;
  const int center = (n - 1) / 2;
  double e0 = 0.0;
  BoundaryMps warm;
  try {
    for (int i = 0; i <= nsamp; ++i) {
      Eigen::MatrixXcd rho;
      int chi_now = 1;
      double disc_now = 0.0;
      if (i == 0) {
        const Eigen::Vector2cd v = bloch_vector(s0);
        Eigen::MatrixXcd site = v * v.adjoint();
        rho = Eigen::MatrixXcd::Ones(1, 1);
        for (int j = 0; j < n; ++j) rho = kron(rho, site).eval();
      } else {
        const FoldedColumn col = build_transfer_column(
            s0, p, settings.delta, settings.order, i * per);
        // Fresh rows appended at the top start from the product pattern.
        while (warm.sites.size() < col.slices.size()) {
          DenseTensor site({1, 4, 1});
          site.data[0] = 1.0 / std::sqrt(2.0);
          site.data[3] = 1.0 / std::sqrt(2.0);
          warm.sites.push_back(site);
        }
        BoundarySolve solve = dominant_boundaries(
            col, settings.chi_t, settings.cutoff, settings.tol,
            settings.max_iter, &warm, settings.seed);
        if (!solve.converged) {
          // A truncation-floor stall is the method operating at the bond
          // cap's accuracy; only a wandering iteration makes the run
          // untrustworthy.
          if (solve.stalled) {
            if (out.note.empty())
              out.note = "boundary at its truncation floor from t=" +
                         std::to_string(i * settings.sample_every) +
                         " (residual " + std::to_string(solve.residual) + ")";
          } else if (!out.unreliable) {
            out.unreliable = true;
            out.note = "boundary power iteration wandered at t=" +
                       std::to_string(i * settings.sample_every) +
                       " (residual " + std::to_string(solve.residual) + ")";
          }
        }
        rho = reconstruct_rdm(col, solve.right, n);
        chi_now = int(boundary_bond_dim(solve.right));
        disc_now = solve.discarded_weight;
        warm = std::move(solve.right);
      }
      const Eigen::MatrixXcd rho1 = partial_trace_qubits(rho, n, {center});
      Eigen::MatrixXcd rho2a = partial_trace_qubits(rho, n, {0, 1});
      double e = (rho2a * h2).trace().real();
      if (n > 2) {
        const Eigen::MatrixXcd rho2b = partial_trace_qubits(rho, n, {1, 2});
        e = 0.5 * (e + (rho2b * h2).trace().real());
      }
      out.times.push_back(i * settings.sample_every);
      out.sx.push_back((rho1 * sx).trace().real());
      out.sy.push_back((rho1 * sy).trace().real());
      out.sz.push_back((rho1 * sz).trace().real());
      out.energy.push_back(e);
      out.bond_dim.push_back(chi_now);
      out.truncation_error.push_back(disc_now);
      out.rdms.push_back(rho);
      if (i == 0) e0 = out.energy.front();
      const double drift =
          std::abs(e0) < 0.1 ? std::abs(e - e0) : std::abs((e - e0) / e0);
      if (drift > 0.2 && !out.unreliable) {
        out.unreliable = true;
        out.note = "energy drift exceeded 20% at t=" +
                   std::to_string(i * settings.sample_every);
      }
    }
  } catch (const std::exception& err) {
    out.unreliable = true;
    out.note = std::string("stopped early: ") + err.what();
  }
  return out;
}

}  // namespace tnq
