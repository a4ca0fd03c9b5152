#pragma once

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "grasstensor/linalg.hpp"

namespace gt {

// Dense tensor in the canonical flattening: multi-index (i_1,...,i_r) maps to
// flat offset sum_j i_j * stride_j with stride_r = 1 (last mode fastest).
template <class Scalar>
class DenseTensor {
 public:
  DenseTensor() = default;

  explicit DenseTensor(std::vector<Index> shape) : shape_(std::move(shape)) {
    validate_shape();
    data_ = VecX<Scalar>::Zero(compute_size());
  }

  DenseTensor(std::vector<Index> shape, VecX<Scalar> flat) : shape_(std::move(shape)), data_(std::move(flat)) {
    validate_shape();
    if (data_.size() != compute_size()) throw std::invalid_argument("DenseTensor: flat data size does not match shape");
  }

  [[nodiscard]] Index order() const { return static_cast<Index>(shape_.size()); }
  [[nodiscard]] const std::vector<Index>& shape() const { return shape_; }
  [[nodiscard]] Index dim(Index mode) const { return shape_.at(static_cast<std::size_t>(mode)); }
  [[nodiscard]] Index size() const { return data_.size(); }

  [[nodiscard]] VecX<Scalar>& flat() { return data_; }
  [[nodiscard]] const VecX<Scalar>& flat() const { return data_; }

  [[nodiscard]] Index offset(const std::vector<Index>& idx) const {
    if (static_cast<Index>(idx.size()) != order()) throw std::invalid_argument("DenseTensor: index arity mismatch");
    Index off = 0;
    for (std::size_t j = 0; j < shape_.size(); ++j) {
      if (idx[j] < 0 || idx[j] >= shape_[j]) throw std::out_of_range("DenseTensor: index out of range");
      off = off * shape_[j] + idx[j];
    }
    return off;
  }

  [[nodiscard]] Scalar& at(const std::vector<Index>& idx) { return data_(offset(idx)); }
  [[nodiscard]] const Scalar& at(const std::vector<Index>& idx) const { return data_(offset(idx)); }

  template <class Other>
  [[nodiscard]] DenseTensor<Other> cast() const {
    return DenseTensor<Other>(shape_, data_.template cast<Other>());
  }

 private:
  void validate_shape() const {
    if (shape_.empty()) throw std::invalid_argument("DenseTensor: order must be at least 1");
    for (Index n : shape_)
      if (n < 1) throw std::invalid_argument("DenseTensor: every mode extent must be positive");
  }

  [[nodiscard]] Index compute_size() const {
    Index n = 1;
    for (Index d : shape_) {
      if (d != 0 && n > (std::numeric_limits<Index>::max)() / d) throw std::invalid_argument("DenseTensor: shape overflows");
      n *= d;
    }
    return n;
  }

  std::vector<Index> shape_;
  VecX<Scalar> data_;
};

// Which modes become matrix rows and which become columns.  Within each list
// the LAST listed mode varies fastest, matching the canonical flattening.
struct UnfoldingSpec {
  std::vector<Index> row_modes;
  std::vector<Index> col_modes;

  // Single-mode unfolding: rows = mode j, columns = all other modes in
  // increasing order.
  static UnfoldingSpec mode(Index j, Index order) {
    UnfoldingSpec spec;
    spec.row_modes.push_back(j);
    for (Index k = 0; k < order; ++k)
      if (k != j) spec.col_modes.push_back(k);
    return spec;
  }

  // Two row modes (j then k); columns = remaining modes in increasing order.
  static UnfoldingSpec mode_pair(Index j, Index k, Index order) {
    UnfoldingSpec spec;
    spec.row_modes = {j, k};
    for (Index l = 0; l < order; ++l)
      if (l != j && l != k) spec.col_modes.push_back(l);
    return spec;
  }

  static UnfoldingSpec vec_all(Index order) {
    UnfoldingSpec spec;
    for (Index k = 0; k < order; ++k) spec.row_modes.push_back(k);
    return spec;
  }

  void validate(Index order) const {
    std::vector<int> seen(static_cast<std::size_t>(order), 0);
    auto mark = [&](const std::vector<Index>& modes) {
      for (Index m : modes) {
        if (m < 0 || m >= order) throw std::invalid_argument("UnfoldingSpec: mode out of range");
        if (seen[static_cast<std::size_t>(m)]++) throw std::invalid_argument("UnfoldingSpec: repeated mode");
      }
    };
    mark(row_modes);
    mark(col_modes);
    for (int s : seen)
      if (!s) throw std::invalid_argument("UnfoldingSpec: modes must partition 0..r-1");
  }
};

namespace detail {

// Row-major strides for the listed modes: the last listed mode has stride 1.
inline std::vector<Index> group_strides(const std::vector<Index>& modes, const std::vector<Index>& shape) {
  std::vector<Index> strides(modes.size(), 1);
  for (std::size_t k = modes.size(); k-- > 1;)
    strides[k - 1] = strides[k] * shape[static_cast<std::size_t>(modes[k])];
  return strides;
}

inline Index group_size(const std::vector<Index>& modes, const std::vector<Index>& shape) {
  Index n = 1;
  for (Index m : modes) n *= shape[static_cast<std::size_t>(m)];
  return n;
}

// Calls fn(flat_offset, row, col) for every element of a tensor with the
// given shape, where (row, col) follow the unfolding spec.
template <class Fn>
void for_each_unfolding_index(const std::vector<Index>& shape, const UnfoldingSpec& spec, Fn&& fn) {
  const auto r = static_cast<Index>(shape.size());
  std::vector<Index> idx(static_cast<std::size_t>(r), 0);
  const std::vector<Index> row_strides = group_strides(spec.row_modes, shape);
  const std::vector<Index> col_strides = group_strides(spec.col_modes, shape);
  Index flat = 0;
  const Index total = std::accumulate(shape.begin(), shape.end(), Index(1), std::multiplies<>());
  for (; flat < total; ++flat) {
    Index row = 0, col = 0;
    for (std::size_t k = 0; k < spec.row_modes.size(); ++k) row += idx[static_cast<std::size_t>(spec.row_modes[k])] * row_strides[k];
    for (std::size_t k = 0; k < spec.col_modes.size(); ++k) col += idx[static_cast<std::size_t>(spec.col_modes[k])] * col_strides[k];
    fn(flat, row, col);
    for (Index j = r; j-- > 0;) {
      if (++idx[static_cast<std::size_t>(j)] < shape[static_cast<std::size_t>(j)]) break;
      idx[static_cast<std::size_t>(j)] = 0;
    }
  }
}

}  // namespace detail

template <class Scalar>
[[nodiscard]] MatX<Scalar> unfold(const DenseTensor<Scalar>& t, const UnfoldingSpec& spec) {
  spec.validate(t.order());
  MatX<Scalar> out(detail::group_size(spec.row_modes, t.shape()), detail::group_size(spec.col_modes, t.shape()));
  detail::for_each_unfolding_index(t.shape(), spec, [&](Index flat, Index row, Index col) { out(row, col) = t.flat()(flat); });
  return out;
}

template <class Scalar>
[[nodiscard]] MatX<Scalar> unfold_mode(const DenseTensor<Scalar>& t, Index j) {
  return unfold(t, UnfoldingSpec::mode(j, t.order()));
}

template <class Scalar>
[[nodiscard]] DenseTensor<Scalar> fold(const MatX<Scalar>& m, const UnfoldingSpec& spec, const std::vector<Index>& shape) {
  spec.validate(static_cast<Index>(shape.size()));
  if (m.rows() != detail::group_size(spec.row_modes, shape) || m.cols() != detail::group_size(spec.col_modes, shape))
    throw std::invalid_argument("fold: matrix extents do not match shape/spec");
  DenseTensor<Scalar> t(shape);
  detail::for_each_unfolding_index(shape, spec, [&](Index flat, Index row, Index col) { t.flat()(flat) = m(row, col); });
  return t;
}

// Canonical flattening as a column vector (order >= 1 enforced by the type).
template <class Scalar>
[[nodiscard]] VecX<Scalar> vec(const DenseTensor<Scalar>& t) {
  return t.flat();
}

// Mode-j product: replaces mode j of extent n_j by m.rows(), contracting
// m (q x n_j) against that mode.
template <class Scalar>
[[nodiscard]] DenseTensor<Scalar> mode_multiply(const DenseTensor<Scalar>& t, const MatX<Scalar>& m, Index j) {
  if (j < 0 || j >= t.order()) throw std::invalid_argument("mode_multiply: mode out of range");
  if (m.cols() != t.dim(j)) throw std::invalid_argument("mode_multiply: factor columns must match mode extent");
  const UnfoldingSpec spec = UnfoldingSpec::mode(j, t.order());
  MatX<Scalar> g = m * unfold(t, spec);
  std::vector<Index> shape = t.shape();
  shape[static_cast<std::size_t>(j)] = m.rows();
  return fold<Scalar>(g, spec, shape);
}

template <class Scalar>
[[nodiscard]] Scalar inner(const DenseTensor<Scalar>& a, const DenseTensor<Scalar>& b) {
  if (a.shape() != b.shape()) throw std::invalid_argument("inner: shape mismatch");
  return a.flat().dot(b.flat());  // conjugates the left argument
}

template <class Scalar>
[[nodiscard]] double norm(const DenseTensor<Scalar>& t) {
  return t.flat().norm();
}

namespace detail {

// Deterministic ordering of singular pairs: descending sigma; on (near-)equal
// sigma, the lexicographically smaller sign-normalized left vector first.
template <class Scalar>
void sort_singular_pairs(std::vector<double>& sigma, MatX<Scalar>& u, double tie_tol) {
  const Index k = static_cast<Index>(sigma.size());
  for (Index c = 0; c < u.cols() && c < k; ++c) {
    // sign normalization: first nonnegligible component becomes real positive
    for (Index i = 0; i < u.rows(); ++i) {
      if (std::abs(u(i, c)) > 1e-9) {
        u.col(c) *= Eigen::numext::conj(unit_phase(u(i, c)));
        break;
      }
    }
  }
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index(0));
  auto lex_less = [&](Index a, Index b) {
    for (Index i = 0; i < u.rows(); ++i) {
      const double ra = real_part(u(i, a)), rb = real_part(u(i, b));
      if (ra != rb) return ra < rb;
      if constexpr (is_complex_v<Scalar>) {
        const double ia = u(i, a).imag(), ib = u(i, b).imag();
        if (ia != ib) return ia < ib;
      }
    }
    return false;
  };
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    if (std::abs(sigma[static_cast<std::size_t>(a)] - sigma[static_cast<std::size_t>(b)]) > tie_tol)
      return sigma[static_cast<std::size_t>(a)] > sigma[static_cast<std::size_t>(b)];
    return lex_less(a, b);
  });
  std::vector<double> s2(sigma.size());
  MatX<Scalar> u2(u.rows(), u.cols());
  for (Index c = 0; c < k; ++c) {
    s2[static_cast<std::size_t>(c)] = sigma[static_cast<std::size_t>(order[static_cast<std::size_t>(c)])];
    u2.col(c) = u.col(order[static_cast<std::size_t>(c)]);
  }
  sigma.swap(s2);
  u = std::move(u2);
}

// Left singular vectors of a, padded with an orthonormal completion when more
// columns are requested than a has singular pairs.
template <class Scalar>
MatX<Scalar> leading_left_singular(const MatX<Scalar>& a, Index want, std::vector<double>* sigma_out = nullptr) {
  Eigen::JacobiSVD<MatX<Scalar>> svd(a, Eigen::ComputeFullU);
  MatX<Scalar> u = svd.matrixU();
  const Index k = std::min(a.rows(), a.cols());
  std::vector<double> sigma(static_cast<std::size_t>(u.cols()), 0.0);
  for (Index i = 0; i < k; ++i) sigma[static_cast<std::size_t>(i)] = svd.singularValues()(i);
  const double smax = sigma.empty() ? 0.0 : *std::max_element(sigma.begin(), sigma.end());
  sort_singular_pairs(sigma, u, 1e-12 * std::max(smax, 1.0));
  if (want > u.cols()) throw std::invalid_argument("leading_left_singular: rank larger than mode extent");
  if (sigma_out) *sigma_out = sigma;
  return u.leftCols(want);
}

}  // namespace detail

// Number of singular values of each single-mode unfolding above
// tol * sigma_max (sigma_max taken per mode).
template <class Scalar>
[[nodiscard]] std::vector<Index> multilinear_rank(const DenseTensor<Scalar>& t, double tol = 1e-10) {
  std::vector<Index> ranks;
  for (Index j = 0; j < t.order(); ++j) {
    Eigen::JacobiSVD<MatX<Scalar>> svd(unfold_mode(t, j));
    const auto& s = svd.singularValues();
    const double smax = s.size() ? s(0) : 0.0;
    Index r = 0;
    for (Index i = 0; i < s.size(); ++i)
      if (s(i) > tol * smax) ++r;
    ranks.push_back(r);
  }
  return ranks;
}

template <class Scalar>
struct TuckerFactors {
  std::vector<MatX<Scalar>> factors;  // factor j: n_j x m_j isometry
  DenseTensor<Scalar> core;           // m_1 x ... x m_r
};

// Truncated higher-order SVD: factor j holds the m_j leading left singular
// vectors of the mode-j unfolding; core = t contracted with every factor
// adjoint.
template <class Scalar>
[[nodiscard]] TuckerFactors<Scalar> hosvd_truncate(const DenseTensor<Scalar>& t, const std::vector<Index>& ranks) {
  if (static_cast<Index>(ranks.size()) != t.order()) throw std::invalid_argument("hosvd_truncate: rank arity mismatch");
  TuckerFactors<Scalar> out;
  for (Index j = 0; j < t.order(); ++j) {
    if (ranks[static_cast<std::size_t>(j)] < 1 || ranks[static_cast<std::size_t>(j)] > t.dim(j))
      throw std::invalid_argument("hosvd_truncate: rank out of range for mode " + std::to_string(j));
    out.factors.push_back(detail::leading_left_singular(unfold_mode(t, j), ranks[static_cast<std::size_t>(j)]));
  }
  out.core = t;
  for (Index j = 0; j < t.order(); ++j) out.core = mode_multiply(out.core, MatX<Scalar>(out.factors[static_cast<std::size_t>(j)].adjoint()), j);
  return out;
}

// core x_1 U_1 ... x_r U_r.
template <class Scalar>
[[nodiscard]] DenseTensor<Scalar> tucker_compose(const TuckerFactors<Scalar>& tk) {
  DenseTensor<Scalar> out = tk.core;
  for (Index j = 0; j < out.order(); ++j) out = mode_multiply(out, tk.factors[static_cast<std::size_t>(j)], j);
  return out;
}

}  // namespace gt
