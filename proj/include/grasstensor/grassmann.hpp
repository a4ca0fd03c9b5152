#pragma once

#include <random>
#include <stdexcept>
#include <vector>

#include "grasstensor/linalg.hpp"

namespace gt {

// Rank-m projector point on the Grassmannian, carried as a unitary frame
// Theta = [U V]: the projector is P = U U^*, U = first m columns.
// Retractions multiply the frame by fresh unitaries; a counter triggers
// periodic re-orthonormalization against slow drift.
template <class Scalar>
class GrassPoint {
 public:
  GrassPoint() = default;

  GrassPoint(MatX<Scalar> frame, Index m, double tol = 1e-8) : frame_(std::move(frame)), m_(m) {
    if (frame_.rows() != frame_.cols()) throw std::invalid_argument("GrassPoint: frame must be square");
    if (m_ < 1 || m_ >= frame_.rows()) throw std::invalid_argument("GrassPoint: rank must satisfy 0 < m < n");
    if (unitary_drift() > tol) throw std::invalid_argument("GrassPoint: frame is not unitary");
  }

  // Frame = identity: projector onto the first m coordinates.
  static GrassPoint standard(Index n, Index m) { return GrassPoint(MatX<Scalar>::Identity(n, n), m); }

  // Completes an n x m isometry to a unitary frame [U V]; V comes from the
  // orthogonal complement columns of a full QR of U, so P = U U^* exactly.
  static GrassPoint from_isometry(const MatX<Scalar>& u, double tol = 1e-10) {
    const Index n = u.rows(), m = u.cols();
    if (m < 1 || m >= n) throw std::invalid_argument("from_isometry: need 0 < m < n");
    if ((u.adjoint() * u - MatX<Scalar>::Identity(m, m)).cwiseAbs().maxCoeff() > tol)
      throw std::invalid_argument("from_isometry: columns are not orthonormal");
    MatX<Scalar> ortho = qr_positive<Scalar>(u);  // orthonormal, spans col(u)
    MatX<Scalar> frame(n, n);
    frame.leftCols(m) = u;
    frame.rightCols(n - m) = ortho.rightCols(n - m);
    return GrassPoint(std::move(frame), m, 1e-6);
  }

  static GrassPoint random(Index n, Index m, std::mt19937_64& rng) { return GrassPoint(haar_unitary<Scalar>(n, rng), m); }

  [[nodiscard]] Index n() const { return frame_.rows(); }
  [[nodiscard]] Index m() const { return m_; }
  [[nodiscard]] const MatX<Scalar>& frame() const { return frame_; }
  [[nodiscard]] auto basis() const { return frame_.leftCols(m_); }        // U
  [[nodiscard]] auto complement() const { return frame_.rightCols(n() - m_); }  // V
  [[nodiscard]] MatX<Scalar> projector() const { return basis() * basis().adjoint(); }

  [[nodiscard]] double unitary_drift() const {
    return (frame_.adjoint() * frame_ - MatX<Scalar>::Identity(n(), n())).cwiseAbs().maxCoeff();
  }

  void renormalize() {
    frame_ = qr_positive<Scalar>(frame_);
    updates_ = 0;
  }

  // Frame <- frame * q, with drift housekeeping.
  void apply_update(const MatX<Scalar>& q) {
    frame_ = frame_ * q;
    if (++updates_ >= kRenormEvery || unitary_drift() > kDriftTol) renormalize();
  }

 private:
  static constexpr int kRenormEvery = 64;
  static constexpr double kDriftTol = 1e-8;

  MatX<Scalar> frame_;
  Index m_ = 0;
  int updates_ = 0;
};

template <class Scalar>
struct ProductPoint {
  std::vector<GrassPoint<Scalar>> factors;

  [[nodiscard]] Index order() const { return static_cast<Index>(factors.size()); }
  [[nodiscard]] std::vector<Index> dims() const {
    std::vector<Index> out;
    for (const auto& f : factors) out.push_back(f.n());
    return out;
  }
  [[nodiscard]] std::vector<Index> ranks() const {
    std::vector<Index> out;
    for (const auto& f : factors) out.push_back(f.m());
    return out;
  }
};

template <class Scalar>
[[nodiscard]] ProductPoint<Scalar> random_product(const std::vector<Index>& dims, const std::vector<Index>& ranks, std::mt19937_64& rng) {
  if (dims.size() != ranks.size()) throw std::invalid_argument("random_product: dims/ranks arity mismatch");
  ProductPoint<Scalar> p;
  for (std::size_t j = 0; j < dims.size(); ++j) p.factors.push_back(GrassPoint<Scalar>::random(dims[j], ranks[j], rng));
  return p;
}

// Tangent vectors in frame coordinates: one m_j x (n_j - m_j) block per factor.
template <class Scalar>
struct TangentCoord {
  std::vector<MatX<Scalar>> blocks;

  static TangentCoord zero_like(const ProductPoint<Scalar>& p) {
    TangentCoord z;
    for (const auto& f : p.factors) z.blocks.push_back(MatX<Scalar>::Zero(f.m(), f.n() - f.m()));
    return z;
  }
};

template <class Scalar>
[[nodiscard]] TangentCoord<Scalar> random_tangent(const ProductPoint<Scalar>& p, std::mt19937_64& rng) {
  TangentCoord<Scalar> z;
  for (const auto& f : p.factors) z.blocks.push_back(gaussian_matrix<Scalar>(f.m(), f.n() - f.m(), rng));
  return z;
}

// xi = U Z V^* + V Z^* U^*  (Hermitian, P xi P = 0 on both diagonal blocks).
template <class Scalar>
[[nodiscard]] MatX<Scalar> tangent_ambient(const GrassPoint<Scalar>& pt, const MatX<Scalar>& z) {
  return MatX<Scalar>(pt.basis() * z * pt.complement().adjoint() + pt.complement() * z.adjoint() * pt.basis().adjoint());
}

// Tangent projection of a Hermitian ambient matrix: coordinates of
// [P,[P,X]] are simply U^* X V.
template <class Scalar>
[[nodiscard]] MatX<Scalar> project_to_tangent(const GrassPoint<Scalar>& pt, const MatX<Scalar>& x) {
  return MatX<Scalar>(pt.basis().adjoint() * x * pt.complement());
}

// Riemannian inner product sum_j tr(xi_j eta_j) = sum_j 2 Re tr(Z_j W_j^*).
template <class Scalar>
[[nodiscard]] double metric(const TangentCoord<Scalar>& a, const TangentCoord<Scalar>& b) {
  if (a.blocks.size() != b.blocks.size()) throw std::invalid_argument("metric: arity mismatch");
  double s = 0;
  for (std::size_t j = 0; j < a.blocks.size(); ++j) s += 2.0 * real_part(Scalar((a.blocks[j].array() * b.blocks[j].array().conjugate()).sum()));
  return s;
}

// Weighted variant with multipliers w_j (e.g. w_j = prod_{k != j} m_k).
template <class Scalar>
[[nodiscard]] double metric_weighted(const TangentCoord<Scalar>& a, const TangentCoord<Scalar>& b, const std::vector<double>& w) {
  double s = 0;
  for (std::size_t j = 0; j < a.blocks.size(); ++j) s += w[j] * 2.0 * real_part(Scalar((a.blocks[j].array() * b.blocks[j].array().conjugate()).sum()));
  return s;
}

template <class Scalar>
[[nodiscard]] double tangent_norm(const TangentCoord<Scalar>& a) {
  return std::sqrt(std::max(0.0, metric(a, a)));
}

// Real dimension of the product manifold: sum_j f * m_j (n_j - m_j) with
// f = 2 for complex scalars, 1 for real.
template <class Scalar>
[[nodiscard]] Index dimension(const ProductPoint<Scalar>& p) {
  Index d = 0;
  for (const auto& f : p.factors) d += real_params_v<Scalar> * f.m() * (f.n() - f.m());
  return d;
}

// P_1 (x) ... (x) P_r.
template <class Scalar>
[[nodiscard]] MatX<Scalar> kron_embed(const ProductPoint<Scalar>& p) {
  std::vector<MatX<Scalar>> projs;
  for (const auto& f : p.factors) projs.push_back(f.projector());
  return kron_all(projs);
}

// QR retraction: frame <- frame * qf([[I, -aZ],[aZ^*, I]]), unique Q with
// positive-diagonal R; first order this moves the projector by a * xi(Z).
template <class Scalar>
[[nodiscard]] GrassPoint<Scalar> qr_retract(const GrassPoint<Scalar>& pt, const MatX<Scalar>& z, double alpha) {
  const Index m = pt.m(), q = pt.n() - pt.m();
  if (z.rows() != m || z.cols() != q) throw std::invalid_argument("qr_retract: block shape mismatch");
  MatX<Scalar> x(pt.n(), pt.n());
  x.topLeftCorner(m, m) = MatX<Scalar>::Identity(m, m);
  x.topRightCorner(m, q) = -alpha * z;
  x.bottomLeftCorner(q, m) = alpha * z.adjoint();
  x.bottomRightCorner(q, q) = MatX<Scalar>::Identity(q, q);
  GrassPoint<Scalar> out = pt;
  out.apply_update(qr_positive<Scalar>(x));
  return out;
}

// Same projector as qr_retract, computed from the SVD of Z in closed form
// (the polar unitary of the update block; requires n >= 2m).  The update is
// W0 * [[D^-1, -S D^-1, 0],[S D^-1, D^-1, 0],[0, 0, I]] * W0^* with Z = X S Y^*,
// D = sqrt(I + S^2), W0 = diag(X, [Y Y']).
template <class Scalar>
[[nodiscard]] GrassPoint<Scalar> qr_retract_closed(const GrassPoint<Scalar>& pt, const MatX<Scalar>& z, double alpha) {
  const Index n = pt.n(), m = pt.m(), q = n - m;
  if (n < 2 * m) throw std::invalid_argument("qr_retract_closed: requires n >= 2m");
  MatX<Scalar> az = alpha * z;
  Eigen::JacobiSVD<MatX<Scalar>> svd(az, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const MatX<Scalar> xf = svd.matrixU();            // m x m
  const MatX<Scalar> yfull = svd.matrixV();         // q x q, first m cols = Y
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m);
  for (Index i = 0; i < svd.singularValues().size(); ++i) s(i) = svd.singularValues()(i);

  MatX<Scalar> w0 = MatX<Scalar>::Zero(n, n);
  w0.topLeftCorner(m, m) = xf;
  w0.bottomRightCorner(q, q) = yfull;

  MatX<Scalar> mid = MatX<Scalar>::Zero(n, n);
  for (Index i = 0; i < m; ++i) {
    const double d = std::sqrt(1.0 + s(i) * s(i));
    mid(i, i) = Scalar(1.0 / d);
    mid(m + i, m + i) = Scalar(1.0 / d);
    mid(i, m + i) = Scalar(-s(i) / d);
    mid(m + i, i) = Scalar(s(i) / d);
  }
  for (Index i = 2 * m; i < n; ++i) mid(i, i) = Scalar(1);

  GrassPoint<Scalar> out = pt;
  out.apply_update(MatX<Scalar>(w0 * mid * w0.adjoint()));
  return out;
}

// Geodesic retraction: frame <- exp(t(xi P - P xi)) * frame, which satisfies
// P(0) = P and dP/dt(0) = xi.
template <class Scalar>
[[nodiscard]] GrassPoint<Scalar> exp_retract(const GrassPoint<Scalar>& pt, const MatX<Scalar>& z, double t) {
  const MatX<Scalar> xi = tangent_ambient(pt, z);
  const MatX<Scalar> p = pt.projector();
  const MatX<Scalar> omega = t * (xi * p - p * xi);  // skew-Hermitian
  GrassPoint<Scalar> out(expm_skew<Scalar>(omega) * pt.frame(), pt.m(), 1e-6);
  return out;
}

template <class Scalar>
[[nodiscard]] ProductPoint<Scalar> qr_retract(const ProductPoint<Scalar>& p, const TangentCoord<Scalar>& z, double alpha) {
  ProductPoint<Scalar> out;
  for (std::size_t j = 0; j < p.factors.size(); ++j) out.factors.push_back(qr_retract(p.factors[j], z.blocks[j], alpha));
  return out;
}

template <class Scalar>
[[nodiscard]] ProductPoint<Scalar> exp_retract(const ProductPoint<Scalar>& p, const TangentCoord<Scalar>& z, double t) {
  ProductPoint<Scalar> out;
  for (std::size_t j = 0; j < p.factors.size(); ++j) out.factors.push_back(exp_retract(p.factors[j], z.blocks[j], t));
  return out;
}

// First-order transport between nearby points: tangent coordinates are
// carried over verbatim and re-read in the destination frame.
template <class Scalar>
[[nodiscard]] TangentCoord<Scalar> transport(const TangentCoord<Scalar>& z, const ProductPoint<Scalar>& /*from*/, const ProductPoint<Scalar>& /*to*/) {
  return z;
}

}  // namespace gt
