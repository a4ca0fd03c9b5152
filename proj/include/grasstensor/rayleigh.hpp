#pragma once

#include <stdexcept>
#include <vector>

#include "grassmann.hpp"
#include "linalg.hpp"
#include "objective.hpp"

namespace gt {

namespace detail {

// tr(out X) = tr(pair (X (x) xi)) for a pair kernel stacked (slow, fast).
template <class Scalar>
MatX<Scalar> pair_contract_fast(const MatX<Scalar>& pair, Index n_slow, Index n_fast, const MatX<Scalar>& xi) {
  MatX<Scalar> out(n_slow, n_slow);
  for (Index s = 0; s < n_slow; ++s)
    for (Index t = 0; t < n_slow; ++t) out(s, t) = (pair.block(s * n_fast, t * n_fast, n_fast, n_fast) * xi).trace();
  return out;
}

// tr(out Y) = tr(pair (xi (x) Y)).
template <class Scalar>
MatX<Scalar> pair_contract_slow(const MatX<Scalar>& pair, Index n_slow, Index n_fast, const MatX<Scalar>& xi) {
  MatX<Scalar> out = MatX<Scalar>::Zero(n_fast, n_fast);
  for (Index s = 0; s < n_slow; ++s)
    for (Index t = 0; t < n_slow; ++t) out += xi(t, s) * pair.block(s * n_fast, t * n_fast, n_fast, n_fast);
  return out;
}

}  // namespace detail

// First- and second-order data of the trace form at one product point.  The
// `sign` folds the optimization sense in, so callers always ascend: grad and
// the Hessian describe sign * rho while `rho` stays the true value.
template <class Scalar>
struct RayleighEval {
  double rho = 0;
  double sign = 1;
  TangentCoord<Scalar> grad;          // sign * U^* A_hat V per mode
  std::vector<MatX<Scalar>> a_hat;    // full partial contractions
  std::vector<MatX<Scalar>> psi_m;    // U^* A_hat U
  std::vector<MatX<Scalar>> psi_c;    // V^* A_hat V
  std::vector<MatX<Scalar>> pairs;    // row-major j*r+k, only j<k filled
  bool has_pairs = false;

  [[nodiscard]] const MatX<Scalar>& pair(Index j, Index k) const {
    return pairs[static_cast<std::size_t>(j * static_cast<Index>(a_hat.size()) + k)];
  }
};

template <class Scalar>
[[nodiscard]] RayleighEval<Scalar> evaluate(const ObjectiveMatrix<Scalar>& obj, const ProductPoint<Scalar>& p,
                                            bool with_pairs = false) {
  const Index r = p.order();
  RayleighEval<Scalar> ev;
  ev.sign = obj.sign();
  for (Index j = 0; j < r; ++j) {
    const auto& f = p.factors[static_cast<std::size_t>(j)];
    MatX<Scalar> hat = obj.psi_hat(p, j);
    ev.psi_m.push_back(MatX<Scalar>(f.basis().adjoint() * hat * f.basis()));
    ev.psi_c.push_back(MatX<Scalar>(f.complement().adjoint() * hat * f.complement()));
    ev.grad.blocks.push_back(MatX<Scalar>(Scalar(ev.sign) * f.basis().adjoint() * hat * f.complement()));
    ev.a_hat.push_back(std::move(hat));
  }
  ev.rho = real_part(Scalar(ev.psi_m.front().trace()));
  if (with_pairs && r > 1) {
    ev.pairs.resize(static_cast<std::size_t>(r * r));
    for (Index j = 0; j < r; ++j)
      for (Index k = j + 1; k < r; ++k) ev.pairs[static_cast<std::size_t>(j * r + k)] = obj.psi_hat_pair(p, j, k);
    ev.has_pairs = true;
  }
  return ev;
}

template <class Scalar>
[[nodiscard]] double relative_gradient(const RayleighEval<Scalar>& ev) {
  return tangent_norm(ev.grad) / std::max(std::abs(ev.rho), 1.0);
}

// max_j || [P_j, A_hat_j] ||_F; zero exactly at critical points.
template <class Scalar>
[[nodiscard]] double critical_residual(const RayleighEval<Scalar>& ev) {
  double out = 0;
  for (const auto& g : ev.grad.blocks) out = std::max(out, std::sqrt(2.0) * g.norm());
  return out;
}

// Riemannian Hessian of sign * rho applied to tangent coordinates: the
// block-diagonal Sylvester part plus the mixed-mode pair contractions.
template <class Scalar>
[[nodiscard]] TangentCoord<Scalar> hessian_apply(const RayleighEval<Scalar>& ev, const ProductPoint<Scalar>& p,
                                                 const TangentCoord<Scalar>& z) {
  const Index r = p.order();
  if (r > 1 && !ev.has_pairs) throw std::logic_error("hessian_apply: evaluate(..., with_pairs=true) required");
  std::vector<MatX<Scalar>> xi;
  xi.reserve(static_cast<std::size_t>(r));
  for (Index k = 0; k < r; ++k) xi.push_back(tangent_ambient(p.factors[static_cast<std::size_t>(k)], z.blocks[static_cast<std::size_t>(k)]));

  TangentCoord<Scalar> out;
  for (Index j = 0; j < r; ++j) {
    const auto& f = p.factors[static_cast<std::size_t>(j)];
    const auto& zj = z.blocks[static_cast<std::size_t>(j)];
    MatX<Scalar> hj = -(ev.psi_m[static_cast<std::size_t>(j)] * zj - zj * ev.psi_c[static_cast<std::size_t>(j)]);
    for (Index k = 0; k < r; ++k) {
      if (k == j) continue;
      const MatX<Scalar> mixed =
          j < k ? detail::pair_contract_fast<Scalar>(ev.pair(j, k), f.n(), p.factors[static_cast<std::size_t>(k)].n(),
                                                     xi[static_cast<std::size_t>(k)])
                : detail::pair_contract_slow<Scalar>(ev.pair(k, j), p.factors[static_cast<std::size_t>(k)].n(), f.n(),
                                                     xi[static_cast<std::size_t>(k)]);
      hj += f.basis().adjoint() * mixed * f.complement();
    }
    out.blocks.push_back(MatX<Scalar>(Scalar(ev.sign) * hj));
  }
  return out;
}

// Exact value, slope, and curvature of sign * rho along the geodesic through
// p with initial velocity z.
template <class Scalar>
struct LineDerivatives {
  double first = 0;
  double second = 0;
};

template <class Scalar>
[[nodiscard]] LineDerivatives<Scalar> line_derivatives(const RayleighEval<Scalar>& ev, const ProductPoint<Scalar>& p,
                                                       const TangentCoord<Scalar>& z) {
  LineDerivatives<Scalar> out;
  out.first = metric(ev.grad, z);
  out.second = metric(hessian_apply(ev, p, z), z);
  return out;
}

// Real coordinates for a tangent vector: mode-major, column-major inside each
// block, real part then imaginary part per entry.
template <class Scalar>
[[nodiscard]] VecX<double> pack_tangent(const TangentCoord<Scalar>& z) {
  Index d = 0;
  for (const auto& b : z.blocks) d += real_params_v<Scalar> * b.size();
  VecX<double> out(d);
  Index q = 0;
  for (const auto& b : z.blocks)
    for (Index c = 0; c < b.cols(); ++c)
      for (Index rr = 0; rr < b.rows(); ++rr) {
        if constexpr (is_complex_v<Scalar>) {
          out(q++) = b(rr, c).real();
          out(q++) = b(rr, c).imag();
        } else {
          out(q++) = b(rr, c);
        }
      }
  return out;
}

template <class Scalar>
[[nodiscard]] TangentCoord<Scalar> unpack_tangent(const VecX<double>& v, const ProductPoint<Scalar>& p) {
  if (v.size() != dimension(p)) throw std::invalid_argument("unpack_tangent: coordinate length mismatch");
  TangentCoord<Scalar> z = TangentCoord<Scalar>::zero_like(p);
  Index q = 0;
  for (auto& b : z.blocks)
    for (Index c = 0; c < b.cols(); ++c)
      for (Index rr = 0; rr < b.rows(); ++rr) {
        if constexpr (is_complex_v<Scalar>) {
          const double re = v(q++);
          const double im = v(q++);
          b(rr, c) = Scalar(re, im);
        } else {
          b(rr, c) = v(q++);
        }
      }
  return z;
}

// Hessian as a dense real matrix in packed coordinates, assembled column by
// column; symmetry is a consequence of self-adjointness, not enforced here.
template <class Scalar>
[[nodiscard]] MatX<double> hessian_reduced(const RayleighEval<Scalar>& ev, const ProductPoint<Scalar>& p) {
  const Index d = dimension(p);
  MatX<double> h(d, d);
  VecX<double> e = VecX<double>::Zero(d);
  for (Index q = 0; q < d; ++q) {
    e(q) = 1;
    h.col(q) = pack_tangent(hessian_apply(ev, p, unpack_tangent<Scalar>(e, p)));
    e(q) = 0;
  }
  return h;
}

struct NondegeneracyReport {
  double spectral_gap = 0;      // min over modes of min |eig(psi_m) - eig(psi_c)|
  double hessian_min_abs = 0;   // smallest |eigenvalue| of the reduced Hessian
  double hessian_max_abs = 0;
  bool nondegenerate = false;
};

// Diagnostics at a (near-)critical point: disjoint psi_m / psi_c spectra per
// mode and an invertible reduced Hessian.
template <class Scalar>
[[nodiscard]] NondegeneracyReport nondegeneracy_check(const RayleighEval<Scalar>& ev, const ProductPoint<Scalar>& p,
                                                      double tol = 1e-8) {
  NondegeneracyReport rep;
  rep.spectral_gap = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < ev.psi_m.size(); ++j) {
    Eigen::SelfAdjointEigenSolver<MatX<Scalar>> em(ev.psi_m[j]);
    Eigen::SelfAdjointEigenSolver<MatX<Scalar>> ec(ev.psi_c[j]);
    for (Index a = 0; a < em.eigenvalues().size(); ++a)
      for (Index b = 0; b < ec.eigenvalues().size(); ++b)
        rep.spectral_gap = std::min(rep.spectral_gap, std::abs(em.eigenvalues()(a) - ec.eigenvalues()(b)));
  }
  const MatX<double> h = hessian_reduced(ev, p);
  Eigen::SelfAdjointEigenSolver<MatX<double>> eh(MatX<double>((h + h.transpose()) / 2.0));
  rep.hessian_min_abs = eh.eigenvalues().cwiseAbs().minCoeff();
  rep.hessian_max_abs = eh.eigenvalues().cwiseAbs().maxCoeff();
  rep.nondegenerate = rep.hessian_min_abs > tol * std::max(1.0, rep.hessian_max_abs);
  return rep;
}

}  // namespace gt
