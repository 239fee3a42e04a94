#include "tnq/tensor.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace tnq {

namespace {

long shape_product(const std::vector<long>& shape) {
  long n = 1;
  for (long d : shape) {
    if (d <= 0) throw std::invalid_argument("tensor: nonpositive dimension");
    n *= d;
  }
  return n;
}

using RowMajorMap =
    Eigen::Map<Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic,
                             Eigen::RowMajor>>;
using ConstRowMajorMap =
    Eigen::Map<const Eigen::Matrix<cxd, Eigen::Dynamic, Eigen::Dynamic,
                                   Eigen::RowMajor>>;

}  // namespace

DenseTensor::DenseTensor(std::vector<long> s) : shape(std::move(s)) {
  data.assign(shape_product(shape), cxd(0.0, 0.0));
}

DenseTensor DenseTensor::scalar(cxd v) {
  DenseTensor t;
  t.data.assign(1, v);
  return t;
}

std::vector<long> DenseTensor::strides() const {
  std::vector<long> st(shape.size(), 1);
  for (long i = rank() - 2; i >= 0; --i) st[i] = st[i + 1] * shape[i + 1];
  return st;
}

cxd& DenseTensor::at(const std::vector<long>& idx) {
  const auto st = strides();
  long flat = 0;
  for (size_t i = 0; i < idx.size(); ++i) flat += idx[i] * st[i];
  return data[flat];
}

cxd DenseTensor::at(const std::vector<long>& idx) const {
  return const_cast<DenseTensor*>(this)->at(idx);
}

DenseTensor DenseTensor::reshape(std::vector<long> new_shape) const {
  if (shape_product(new_shape) != size())
    throw std::invalid_argument("reshape: size mismatch");
  DenseTensor t;
  t.shape = std::move(new_shape);
  t.data = data;
  return t;
}

DenseTensor DenseTensor::permute(const std::vector<long>& order) const {
  if (static_cast<long>(order.size()) != rank())
    throw std::invalid_argument("permute: order length != rank");
  std::vector<bool> seen(order.size(), false);
  for (long ax : order) {
    if (ax < 0 || ax >= rank() || seen[ax])
      throw std::invalid_argument("permute: invalid axis order");
    seen[ax] = true;
  }

  DenseTensor out;
  out.shape.resize(order.size());
  for (size_t i = 0; i < order.size(); ++i) out.shape[i] = shape[order[i]];
  out.data.resize(data.size());

  if (rank() == 0) {
    out.data = data;
    return out;
  }

  // Odometer walk over output coordinates; the input offset is updated with
  // precomputed stride deltas so no division happens per element.
  const auto in_strides = strides();
  std::vector<long> sel_strides(order.size());
  for (size_t i = 0; i < order.size(); ++i)
    sel_strides[i] = in_strides[order[i]];

  std::vector<long> coord(order.size(), 0);
  long in_off = 0;
  const long total = size();
  const long last = rank() - 1;
  for (long flat = 0; flat < total; ++flat) {
    out.data[flat] = data[in_off];
    for (long ax = last; ax >= 0; --ax) {
      if (++coord[ax] < out.shape[ax]) {
        in_off += sel_strides[ax];
        break;
      }
      in_off -= sel_strides[ax] * (out.shape[ax] - 1);
      coord[ax] = 0;
    }
  }
  return out;
}

DenseTensor DenseTensor::conjugate() const {
  DenseTensor t = *this;
  for (auto& v : t.data) v = std::conj(v);
  return t;
}

double DenseTensor::norm() const {
  double s = 0.0;
  for (const auto& v : data) s += std::norm(v);
  return std::sqrt(s);
}

bool DenseTensor::finite() const {
  for (const auto& v : data)
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

DenseTensor contract(const DenseTensor& a, const DenseTensor& b,
                     const std::vector<std::pair<long, long>>& index_pairs) {
  std::vector<bool> a_used(a.rank(), false), b_used(b.rank(), false);
  for (const auto& [ia, ib] : index_pairs) {
    if (ia < 0 || ia >= a.rank() || ib < 0 || ib >= b.rank())
      throw std::invalid_argument("contract: axis pair out of range");
    if (a_used[ia] || b_used[ib])
      throw std::invalid_argument("contract: repeated axis in pairs");
    if (a.shape[ia] != b.shape[ib])
      throw std::invalid_argument(
          "contract: dimension mismatch " + std::to_string(a.shape[ia]) +
          " vs " + std::to_string(b.shape[ib]));
    a_used[ia] = true;
    b_used[ib] = true;
  }

  std::vector<long> a_order, b_order, out_shape;
  for (long i = 0; i < a.rank(); ++i)
    if (!a_used[i]) {
      a_order.push_back(i);
      out_shape.push_back(a.shape[i]);
    }
  long k = 1;
  for (const auto& [ia, ib] : index_pairs) {
    a_order.push_back(ia);
    k *= a.shape[ia];
    (void)ib;
  }
  std::vector<long> b_contr;
  for (const auto& [ia, ib] : index_pairs) b_order.push_back(ib);
  for (long i = 0; i < b.rank(); ++i)
    if (!b_used[i]) {
      b_order.push_back(i);
      out_shape.push_back(b.shape[i]);
    }

  const DenseTensor pa = a.permute(a_order);
  const DenseTensor pb = b.permute(b_order);
  const long m = pa.size() / k;
  const long n = pb.size() / k;

  DenseTensor out;
  out.shape = out_shape;
  out.data.resize(m * n);
  ConstRowMajorMap ma(pa.data.data(), m, k);
  ConstRowMajorMap mb(pb.data.data(), k, n);
  RowMajorMap mo(out.data.data(), m, n);
  mo.noalias() = ma * mb;
  return out;
}

SvdResult truncated_svd(const DenseTensor& theta, long chi_max,
                        double cutoff) {
  if (theta.rank() != 4)
    throw std::invalid_argument("truncated_svd: theta must be rank 4");
  if (chi_max < 1)
    throw std::invalid_argument("truncated_svd: chi_max must be >= 1");
  if (!theta.finite())
    throw std::runtime_error("truncated_svd: non-finite input");

  const long dl = theta.shape[0], p1 = theta.shape[1];
  const long p2 = theta.shape[2], dr = theta.shape[3];

  SvdEcon svd = svd_econ(tensor_to_matrix(theta, 2));

  const long full = svd.s.size();
  const double smax = svd.s(0);
  long keep = 0;
  for (long i = 0; i < full; ++i) {
    if (i >= chi_max) break;
    if (svd.s(i) < cutoff * smax) break;
    ++keep;
  }
  if (keep == 0) keep = 1;  // all below cutoff: keep the leading value

  double dropped = 0.0;
  for (long i = keep; i < full; ++i) dropped += svd.s(i) * svd.s(i);

  SvdResult out;
  out.discarded_weight = dropped;
  out.weights = svd.s.head(keep);
  const double wn = out.weights.norm();
  if (wn > 0.0) out.weights /= wn;

  out.left = matrix_to_tensor(svd.u.leftCols(keep), {dl, p1, keep});
  out.right = matrix_to_tensor(svd.vh.topRows(keep), {keep, p2, dr});
  return out;
}

double entanglement_entropy(const Eigen::VectorXd& lambda) {
  double s = 0.0;
  for (long i = 0; i < lambda.size(); ++i) {
    const double p = lambda(i) * lambda(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return s;
}

double renyi2_entropy(const Eigen::VectorXd& lambda) {
  double q = 0.0;
  for (long i = 0; i < lambda.size(); ++i) {
    const double p = lambda(i) * lambda(i);
    q += p * p;
  }
  if (q <= 0.0) return 0.0;
  return -std::log(q);
}

Eigen::MatrixXcd tensor_to_matrix(const DenseTensor& t, long row_axes) {
  if (row_axes < 0 || row_axes > t.rank())
    throw std::invalid_argument("tensor_to_matrix: bad row_axes");
  long m = 1;
  for (long i = 0; i < row_axes; ++i) m *= t.shape[i];
  const long n = t.size() / m;
  ConstRowMajorMap map(t.data.data(), m, n);
  return Eigen::MatrixXcd(map);
}

DenseTensor matrix_to_tensor(const Eigen::MatrixXcd& m,
                             std::vector<long> shape) {
  DenseTensor t;
  t.shape = std::move(shape);
  t.data.resize(shape_product(t.shape));
  if (static_cast<long>(t.data.size()) != m.size())
    throw std::invalid_argument("matrix_to_tensor: size mismatch");
  RowMajorMap map(t.data.data(), m.rows(), m.cols());
  map = m;
  return t;
}

Eigen::MatrixXcd partial_trace_qubits(const Eigen::MatrixXcd& rho, int n,
                                      const std::vector<int>& keep) {
  const long dim = 1L << n;
  if (rho.rows() != dim || rho.cols() != dim)
    throw std::invalid_argument("partial_trace_qubits: dimension mismatch");
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= n)
      throw std::invalid_argument("partial_trace_qubits: qubit out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw std::invalid_argument(
          "partial_trace_qubits: qubits must be strictly increasing");
  }
  const int nk = int(keep.size());
  std::vector<int> rest;
  for (int q = 0; q < n; ++q)
    if (std::find(keep.begin(), keep.end(), q) == keep.end()) rest.push_back(q);

  auto assemble = [&](long kept_bits, long rest_bits) {
    long idx = 0;
    for (int i = 0; i < nk; ++i)
      if ((kept_bits >> (nk - 1 - i)) & 1) idx |= 1L << (n - 1 - keep[i]);
    for (std::size_t i = 0; i < rest.size(); ++i)
      if ((rest_bits >> (rest.size() - 1 - i)) & 1) idx |= 1L << (n - 1 - rest[i]);
    return idx;
  };

  const long dk = 1L << nk;
  const long dr = 1L << rest.size();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  for (long a = 0; a < dk; ++a)
    for (long b = 0; b < dk; ++b)
      for (long e = 0; e < dr; ++e)
        out(a, b) += rho(assemble(a, e), assemble(b, e));
  return out;
}

}  // namespace tnq
