#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "dense_tensor.hpp"
#include "grassmann.hpp"
#include "linalg.hpp"
#include "parallel.hpp"

namespace gt {

enum class ObjKind { dense, rank_one, kron_factors, sum_kron_powers, diagonal };
enum class Sense { maximize, minimize };

namespace detail {

inline std::vector<Index> digit_table(const std::vector<Index>& dims) {
  const auto r = static_cast<Index>(dims.size());
  Index total = 1;
  for (Index d : dims) total *= d;
  std::vector<Index> dig(static_cast<std::size_t>(total * r), 0);
  for (Index i = 0; i < total; ++i) {
    Index rest = i;
    for (Index j = r - 1; j >= 0; --j) {
      dig[static_cast<std::size_t>(i * r + j)] = rest % dims[static_cast<std::size_t>(j)];
      rest /= dims[static_cast<std::size_t>(j)];
    }
  }
  return dig;
}

// Partial trace of a dense kernel against per-mode matrices, leaving `free`
// modes open. Result rows/cols stack the free modes in listed order, last one
// fastest, matching the flat Kronecker index convention.
template <class Scalar>
MatX<Scalar> contract_all_but(const MatX<Scalar>& a, const std::vector<Index>& dims,
                              const std::vector<MatX<Scalar>>& per_mode, const std::vector<Index>& free) {
  const auto r = static_cast<Index>(dims.size());
  const Index n = a.rows();
  std::vector<char> is_free(static_cast<std::size_t>(r), 0);
  for (Index f : free) is_free[static_cast<std::size_t>(f)] = 1;
  std::vector<Index> fstride(free.size(), 1);
  Index fsize = 1;
  for (auto q = static_cast<Index>(free.size()) - 1; q >= 0; --q) {
    fstride[static_cast<std::size_t>(q)] = fsize;
    fsize *= dims[static_cast<std::size_t>(free[static_cast<std::size_t>(q)])];
  }
  const std::vector<Index> dig = digit_table(dims);
  const MatX<Scalar> zero = MatX<Scalar>::Zero(fsize, fsize);
  auto fold = [&](MatX<Scalar>& acc, Index row) {
    const Index* da = dig.data() + row * r;
    Index s = 0;
    for (std::size_t q = 0; q < free.size(); ++q) s += da[free[q]] * fstride[q];
    for (Index col = 0; col < n; ++col) {
      Scalar w = a(row, col);
      if (w == Scalar(0)) continue;
      const Index* db = dig.data() + col * r;
      for (Index j = 0; j < r; ++j)
        if (!is_free[static_cast<std::size_t>(j)]) w *= per_mode[static_cast<std::size_t>(j)](db[j], da[j]);
      Index t = 0;
      for (std::size_t q = 0; q < free.size(); ++q) t += db[free[q]] * fstride[q];
      acc(s, t) += w;
    }
  };
  return chunked_reduce(n, zero, fold, [](MatX<Scalar>& tot, const MatX<Scalar>& part) { tot += part; });
}

template <class Scalar>
MatX<Scalar> hermitian_part(const MatX<Scalar>& m) {
  return MatX<Scalar>((m + m.adjoint()) / 2.0);
}

}  // namespace detail

// Hermitian form on the tensor product space, stored in whichever structured
// shape the application provides. The structured kinds evaluate traces and
// partial contractions without ever materializing the full matrix.
template <class Scalar>
class ObjectiveMatrix {
 public:
  using Mat = MatX<Scalar>;
  using Vec = VecX<Scalar>;

  static ObjectiveMatrix dense(std::vector<Index> dims, const Mat& a, Sense sense = Sense::maximize) {
    ObjectiveMatrix out(ObjKind::dense, std::move(dims), sense);
    if (a.rows() != a.cols() || a.rows() != out.total_dim())
      throw std::invalid_argument("dense objective: matrix size does not match mode dims");
    const double scale = std::max(1.0, a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff());
    if (hermiticity_error(a) > 1e-10 * scale) throw std::invalid_argument("dense objective: matrix must be hermitian");
    out.dense_ = detail::hermitian_part(a);
    return out;
  }

  // A = vec(t) vec(t)^*, the form whose value at a product point is the
  // squared norm of the tensor compressed onto the chosen subspaces.
  static ObjectiveMatrix rank_one(DenseTensor<Scalar> t, Sense sense = Sense::maximize) {
    ObjectiveMatrix out(ObjKind::rank_one, t.shape(), sense);
    out.amps_ = std::move(t);
    return out;
  }

  // A = A_1 (x) ... (x) A_r with each factor hermitian.
  static ObjectiveMatrix kron_factors(std::vector<Mat> mats, Sense sense = Sense::maximize) {
    std::vector<Index> dims;
    for (const auto& m : mats) {
      if (m.rows() != m.cols() || m.rows() == 0) throw std::invalid_argument("kron objective: factors must be square");
      const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
      if (hermiticity_error(m) > 1e-10 * scale) throw std::invalid_argument("kron objective: factors must be hermitian");
      dims.push_back(m.rows());
    }
    ObjectiveMatrix out(ObjKind::kron_factors, std::move(dims), sense);
    out.factors_.reserve(mats.size());
    for (auto& m : mats) out.factors_.push_back(detail::hermitian_part(m));
    return out;
  }

  // A = sum_l (x_l x_l^*)^{(x) order}; all modes share the ambient dimension.
  static ObjectiveMatrix sum_kron_powers(std::vector<Vec> points, Index order, Sense sense = Sense::maximize) {
    if (points.empty() || order < 1) throw std::invalid_argument("power objective: need points and order >= 1");
    const Index n = points.front().size();
    for (const auto& x : points)
      if (x.size() != n || n == 0) throw std::invalid_argument("power objective: points must share a positive dimension");
    ObjectiveMatrix out(ObjKind::sum_kron_powers, std::vector<Index>(static_cast<std::size_t>(order), n), sense);
    out.points_ = std::move(points);
    return out;
  }

  // A = diag(vec(d)) with real entries laid out like the flat tensor index.
  static ObjectiveMatrix diagonal(DenseTensor<double> d, Sense sense = Sense::maximize) {
    ObjectiveMatrix out(ObjKind::diagonal, d.shape(), sense);
    out.diag_ = std::move(d);
    return out;
  }

  [[nodiscard]] ObjKind kind() const { return kind_; }
  [[nodiscard]] Sense sense() const { return sense_; }
  [[nodiscard]] double sign() const { return sense_ == Sense::maximize ? 1.0 : -1.0; }
  [[nodiscard]] const std::vector<Index>& dims() const { return dims_; }
  [[nodiscard]] Index order() const { return static_cast<Index>(dims_.size()); }
  [[nodiscard]] Index total_dim() const {
    Index n = 1;
    for (Index d : dims_) n *= d;
    return n;
  }
  [[nodiscard]] const DenseTensor<Scalar>& amplitudes() const {
    if (kind_ != ObjKind::rank_one) throw std::logic_error("amplitudes only stored for rank-one objectives");
    return amps_;
  }
  [[nodiscard]] const std::vector<MatX<Scalar>>& kron_blocks() const {
    if (kind_ != ObjKind::kron_factors) throw std::logic_error("kron blocks only stored for kron-factor objectives");
    return factors_;
  }
  [[nodiscard]] const std::vector<VecX<Scalar>>& data_points() const {
    if (kind_ != ObjKind::sum_kron_powers) throw std::logic_error("data points only stored for sum-kron-power objectives");
    return points_;
  }
  [[nodiscard]] const DenseTensor<double>& diagonal_table() const {
    if (kind_ != ObjKind::diagonal) throw std::logic_error("table only stored for diagonal objectives");
    return diag_;
  }

  // tr(A (P_1 (x) ... (x) P_r)); always the true value regardless of sense.
  [[nodiscard]] double rho(const ProductPoint<Scalar>& p) const {
    check_point(p);
    switch (kind_) {
      case ObjKind::dense:
        return real_part(detail::contract_all_but<Scalar>(dense_, dims_, projectors(p), {})(0, 0));
      case ObjKind::rank_one: {
        DenseTensor<Scalar> core = amps_;
        for (Index j = 0; j < order(); ++j) core = mode_multiply(core, Mat(p.factors[static_cast<std::size_t>(j)].basis().adjoint()), j);
        const double nn = norm(core);
        return nn * nn;
      }
      case ObjKind::kron_factors: {
        double out = 1.0;
        for (Index j = 0; j < order(); ++j) out *= factor_trace(p, j);
        return out;
      }
      case ObjKind::sum_kron_powers: {
        double out = 0.0;
        for (const auto& x : points_) {
          double term = 1.0;
          for (Index j = 0; j < order(); ++j) term *= point_weight(p, x, j);
          out += term;
        }
        return out;
      }
      case ObjKind::diagonal: {
        const auto diags = diag_vectors(p);
        const std::vector<Index> dig = detail::digit_table(dims_);
        const auto r = order();
        double out = 0.0;
        for (Index i = 0; i < diag_.size(); ++i) {
          double w = diag_.flat()(i);
          for (Index j = 0; j < r; ++j) w *= diags[static_cast<std::size_t>(j)](dig[static_cast<std::size_t>(i * r + j)]);
          out += w;
        }
        return out;
      }
    }
    throw std::logic_error("unreachable objective kind");
  }

  // The unique hermitian matrix with tr(A (P_1 (x) ... X_j ... (x) P_r)) =
  // tr(psi_hat(p, j) X_j) for every X_j.
  [[nodiscard]] Mat psi_hat(const ProductPoint<Scalar>& p, Index j) const {
    check_point(p);
    check_mode(j);
    switch (kind_) {
      case ObjKind::dense:
        return detail::hermitian_part<Scalar>(detail::contract_all_but<Scalar>(dense_, dims_, projectors(p), {j}));
      case ObjKind::rank_one: {
        const Mat b = unfold_mode(core_except(p, {j}), j);
        return detail::hermitian_part<Scalar>(b * b.adjoint());
      }
      case ObjKind::kron_factors: {
        double c = 1.0;
        for (Index k = 0; k < order(); ++k)
          if (k != j) c *= factor_trace(p, k);
        return Mat(Scalar(c) * factors_[static_cast<std::size_t>(j)]);
      }
      case ObjKind::sum_kron_powers: {
        const Index n = dims_[static_cast<std::size_t>(j)];
        const Mat zero = Mat::Zero(n, n);
        auto fold = [&](Mat& acc, Index l) {
          const Vec& x = points_[static_cast<std::size_t>(l)];
          double c = 1.0;
          for (Index k = 0; k < order(); ++k)
            if (k != j) c *= point_weight(p, x, k);
          acc += Scalar(c) * (x * x.adjoint());
        };
        const auto count = static_cast<Index>(points_.size());
        Mat out = chunked_reduce(count, zero, fold, [](Mat& tot, const Mat& part) { tot += part; });
        return detail::hermitian_part<Scalar>(out);
      }
      case ObjKind::diagonal:
        return diag_contract({j}, p);
    }
    throw std::logic_error("unreachable objective kind");
  }

  // Same partial contraction leaving two modes open (j < k, j slower / k
  // faster in the stacked index); feeds the mixed second-derivative terms.
  [[nodiscard]] Mat psi_hat_pair(const ProductPoint<Scalar>& p, Index j, Index k) const {
    check_point(p);
    check_mode(j);
    check_mode(k);
    if (j >= k) throw std::invalid_argument("psi_hat_pair: need j < k");
    switch (kind_) {
      case ObjKind::dense:
        return detail::hermitian_part<Scalar>(detail::contract_all_but<Scalar>(dense_, dims_, projectors(p), {j, k}));
      case ObjKind::rank_one: {
        const Mat c = unfold(core_except(p, {j, k}), UnfoldingSpec::mode_pair(j, k, order()));
        return detail::hermitian_part<Scalar>(c * c.adjoint());
      }
      case ObjKind::kron_factors: {
        double c = 1.0;
        for (Index l = 0; l < order(); ++l)
          if (l != j && l != k) c *= factor_trace(p, l);
        return Mat(Scalar(c) * kron(factors_[static_cast<std::size_t>(j)], factors_[static_cast<std::size_t>(k)]));
      }
      case ObjKind::sum_kron_powers: {
        const Index n = dims_[static_cast<std::size_t>(j)];
        const Mat zero = Mat::Zero(n * n, n * n);
        auto fold = [&](Mat& acc, Index l) {
          const Vec& x = points_[static_cast<std::size_t>(l)];
          double c = 1.0;
          for (Index q = 0; q < order(); ++q)
            if (q != j && q != k) c *= point_weight(p, x, q);
          const Vec xx = kron(Mat(x), Mat(x));
          acc += Scalar(c) * (xx * xx.adjoint());
        };
        const auto count = static_cast<Index>(points_.size());
        Mat out = chunked_reduce(count, zero, fold, [](Mat& tot, const Mat& part) { tot += part; });
        return detail::hermitian_part<Scalar>(out);
      }
      case ObjKind::diagonal:
        return diag_contract({j, k}, p);
    }
    throw std::logic_error("unreachable objective kind");
  }

  // Full matrix; meant for small sizes, cross-checks, and file export.
  [[nodiscard]] Mat materialize() const {
    switch (kind_) {
      case ObjKind::dense:
        return dense_;
      case ObjKind::rank_one: {
        const Vec v = vec(amps_);
        return Mat(v * v.adjoint());
      }
      case ObjKind::kron_factors:
        return kron_all(factors_);
      case ObjKind::sum_kron_powers: {
        const Index n = total_dim();
        Mat out = Mat::Zero(n, n);
        for (const auto& x : points_) {
          Vec big = x;
          for (Index j = 1; j < order(); ++j) big = kron(Mat(big), Mat(x));
          out += big * big.adjoint();
        }
        return out;
      }
      case ObjKind::diagonal: {
        Mat out = Mat::Zero(diag_.size(), diag_.size());
        for (Index i = 0; i < diag_.size(); ++i) out(i, i) = Scalar(diag_.flat()(i));
        return out;
      }
    }
    throw std::logic_error("unreachable objective kind");
  }

 private:
  ObjectiveMatrix(ObjKind kind, std::vector<Index> dims, Sense sense) : kind_(kind), sense_(sense), dims_(std::move(dims)) {
    if (dims_.empty()) throw std::invalid_argument("objective: need at least one mode");
    for (Index d : dims_)
      if (d <= 0) throw std::invalid_argument("objective: mode dims must be positive");
  }

  void check_point(const ProductPoint<Scalar>& p) const {
    if (p.dims() != dims_) throw std::invalid_argument("objective: point dims do not match objective dims");
  }
  void check_mode(Index j) const {
    if (j < 0 || j >= order()) throw std::out_of_range("objective: mode index out of range");
  }

  [[nodiscard]] std::vector<Mat> projectors(const ProductPoint<Scalar>& p) const {
    std::vector<Mat> out;
    out.reserve(p.factors.size());
    for (const auto& f : p.factors) out.push_back(f.projector());
    return out;
  }

  [[nodiscard]] double factor_trace(const ProductPoint<Scalar>& p, Index j) const {
    const auto& u = p.factors[static_cast<std::size_t>(j)].basis();
    return real_part(Scalar((u.adjoint() * factors_[static_cast<std::size_t>(j)] * u).trace()));
  }

  [[nodiscard]] double point_weight(const ProductPoint<Scalar>& p, const Vec& x, Index j) const {
    return (p.factors[static_cast<std::size_t>(j)].basis().adjoint() * x).squaredNorm();
  }

  [[nodiscard]] DenseTensor<Scalar> core_except(const ProductPoint<Scalar>& p, const std::vector<Index>& skip) const {
    DenseTensor<Scalar> core = amps_;
    for (Index j = 0; j < order(); ++j) {
      if (std::find(skip.begin(), skip.end(), j) != skip.end()) continue;
      core = mode_multiply(core, Mat(p.factors[static_cast<std::size_t>(j)].basis().adjoint()), j);
    }
    return core;
  }

  [[nodiscard]] std::vector<VecX<double>> diag_vectors(const ProductPoint<Scalar>& p) const {
    std::vector<VecX<double>> out;
    for (const auto& f : p.factors) {
      VecX<double> v(f.n());
      const Mat pr = f.projector();
      for (Index i = 0; i < f.n(); ++i) v(i) = real_part(pr(i, i));
      out.push_back(std::move(v));
    }
    return out;
  }

  [[nodiscard]] Mat diag_contract(const std::vector<Index>& free, const ProductPoint<Scalar>& p) const {
    const auto diags = diag_vectors(p);
    const std::vector<Index> dig = detail::digit_table(dims_);
    const auto r = order();
    std::vector<Index> fstride(free.size(), 1);
    Index fsize = 1;
    for (auto q = static_cast<Index>(free.size()) - 1; q >= 0; --q) {
      fstride[static_cast<std::size_t>(q)] = fsize;
      fsize *= dims_[static_cast<std::size_t>(free[static_cast<std::size_t>(q)])];
    }
    VecX<double> w = VecX<double>::Zero(fsize);
    for (Index i = 0; i < diag_.size(); ++i) {
      double c = diag_.flat()(i);
      Index s = 0;
      for (std::size_t q = 0; q < free.size(); ++q) s += dig[static_cast<std::size_t>(i * r + free[q])] * fstride[q];
      for (Index j = 0; j < r; ++j) {
        if (std::find(free.begin(), free.end(), j) != free.end()) continue;
        c *= diags[static_cast<std::size_t>(j)](dig[static_cast<std::size_t>(i * r + j)]);
      }
      w(s) += c;
    }
    Mat out = Mat::Zero(fsize, fsize);
    for (Index i = 0; i < fsize; ++i) out(i, i) = Scalar(w(i));
    return out;
  }

  ObjKind kind_;
  Sense sense_;
  std::vector<Index> dims_;
  Mat dense_;
  DenseTensor<Scalar> amps_;
  std::vector<Mat> factors_;
  std::vector<Vec> points_;
  DenseTensor<double> diag_;
};

}  // namespace gt
