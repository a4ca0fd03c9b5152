#pragma once

#include <Eigen/Dense>

#include <complex>
#include <random>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace gt {

using Index = Eigen::Index;
using cplx = std::complex<double>;

template <class Scalar>
using MatX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using VecX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <class Scalar>
inline constexpr bool is_complex_v = false;
template <class T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

// Number of real parameters carried by one scalar entry.
template <class Scalar>
inline constexpr int real_params_v = is_complex_v<Scalar> ? 2 : 1;

template <class Scalar>
[[nodiscard]] inline double real_part(Scalar x) {
  if constexpr (is_complex_v<Scalar>)
    return x.real();
  else
    return static_cast<double>(x);
}

// Unit-modulus phase of x, or 1 when x is (numerically) zero.
template <class Scalar>
[[nodiscard]] inline Scalar unit_phase(Scalar x) {
  const double a = std::abs(x);
  if (a <= 0.0) return Scalar(1);
  return x / Scalar(a);
}

// QR decomposition with the sign convention that makes it unique:
// diagonal of R real and positive.  Returns the unitary Q factor.
template <class Scalar>
[[nodiscard]] MatX<Scalar> qr_positive(const MatX<Scalar>& a) {
  Eigen::HouseholderQR<MatX<Scalar>> qr(a);
  MatX<Scalar> q = qr.householderQ();
  MatX<Scalar> r = qr.matrixQR().template triangularView<Eigen::Upper>();
  const Index k = std::min(a.rows(), a.cols());
  for (Index i = 0; i < k; ++i) {
    const Scalar ph = unit_phase(r(i, i));
    q.col(i) *= ph;
  }
  return q;
}

template <class Scalar>
[[nodiscard]] MatX<Scalar> kron(const MatX<Scalar>& a, const MatX<Scalar>& b) {
  MatX<Scalar> out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

template <class Scalar>
[[nodiscard]] MatX<Scalar> kron_all(const std::vector<MatX<Scalar>>& mats) {
  if (mats.empty()) throw std::invalid_argument("kron_all: empty factor list");
  MatX<Scalar> out = mats.front();
  for (std::size_t i = 1; i < mats.size(); ++i) out = kron(out, mats[i]);
  return out;
}

// Standard normal entries; complex scalars get independent N(0,1) real and
// imaginary parts.  Fill order is fixed (column major) so results are
// reproducible for a given engine state.
template <class Scalar>
[[nodiscard]] MatX<Scalar> gaussian_matrix(Index rows, Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  MatX<Scalar> out(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) {
      if constexpr (is_complex_v<Scalar>) {
        const double re = normal(rng);
        const double im = normal(rng);
        out(i, j) = Scalar(re, im);
      } else {
        out(i, j) = normal(rng);
      }
    }
  return out;
}

// Haar-distributed unitary (orthogonal in the real case).
template <class Scalar>
[[nodiscard]] MatX<Scalar> haar_unitary(Index n, std::mt19937_64& rng) {
  return qr_positive<Scalar>(gaussian_matrix<Scalar>(n, n, rng));
}

template <class Scalar>
[[nodiscard]] double hermiticity_error(const MatX<Scalar>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

// exp(W) for skew-Hermitian W via the eigendecomposition of iW (Hermitian);
// the result is exactly unitary up to roundoff.
template <class Scalar>
[[nodiscard]] MatX<Scalar> expm_skew(const MatX<Scalar>& w) {
  const MatX<cplx> h = cplx(0, 1) * w.template cast<cplx>();
  Eigen::SelfAdjointEigenSolver<MatX<cplx>> eig(h);
  if (eig.info() != Eigen::Success) throw std::runtime_error("expm_skew: eigensolver failed");
  const Eigen::VectorXd lam = eig.eigenvalues();
  VecX<cplx> phases(lam.size());
  for (Index i = 0; i < lam.size(); ++i) phases(i) = std::exp(cplx(0, -lam(i)));
  MatX<cplx> e = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
  if constexpr (is_complex_v<Scalar>)
    return e;
  else
    return e.real();
}

}  // namespace gt
