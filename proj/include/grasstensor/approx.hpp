#pragma once

#include <vector>

#include "dense_tensor.hpp"
#include "solvers.hpp"

namespace gt {

template <class Scalar>
[[nodiscard]] ProductPoint<Scalar> hosvd_point(const DenseTensor<Scalar>& t, const std::vector<Index>& ranks) {
  const auto tk = hosvd_truncate(t, ranks);
  ProductPoint<Scalar> p;
  for (const auto& u : tk.factors) p.factors.push_back(GrassPoint<Scalar>::from_isometry(u));
  return p;
}

template <class Scalar>
struct ApproxResult {
  SolveResult<Scalar> solve;
  double rho_hosvd = 0;    // compressed energy at the spectral start
  double rho_warm = 0;     // after the alternating warm sweeps
  double rho_final = 0;
  double rel_residual = 0; // sqrt(max(||t||^2 - rho_final, 0)) / ||t||
  TuckerFactors<Scalar> tucker;
  DenseTensor<Scalar> approx;
};

// Best multilinear-rank approximation: spectral start, a few alternating
// sweeps to settle the basin, then the requested solver.  The three recorded
// stage values never decrease.
template <class Scalar>
[[nodiscard]] ApproxResult<Scalar> best_rank_approx(const DenseTensor<Scalar>& t, const std::vector<Index>& ranks,
                                                    Method method = Method::rcg, const SolverConfig& cfg = {},
                                                    int warm_sweeps = 20) {
  const auto obj = ObjectiveMatrix<Scalar>::rank_one(t);
  ApproxResult<Scalar> out;
  ProductPoint<Scalar> start = hosvd_point(t, ranks);
  out.rho_hosvd = obj.rho(start);
  out.rho_warm = out.rho_hosvd;
  if (warm_sweeps > 0 && method != Method::hooi) {
    SolverConfig warm = cfg;
    warm.max_iter = warm_sweeps;
    auto warmed = hooi(obj, start, warm);
    start = std::move(warmed.point);
    out.rho_warm = warmed.rho;
  }
  out.solve = run_method(method, obj, start, cfg);
  out.rho_final = out.solve.rho;

  for (const auto& f : out.solve.point.factors) out.tucker.factors.push_back(MatX<Scalar>(f.basis()));
  DenseTensor<Scalar> core = t;
  for (Index j = 0; j < t.order(); ++j)
    core = mode_multiply(core, MatX<Scalar>(out.tucker.factors[static_cast<std::size_t>(j)].adjoint()), j);
  out.tucker.core = std::move(core);
  out.approx = tucker_compose(out.tucker);

  const double nn = norm(t);
  out.rel_residual = nn > 0 ? std::sqrt(std::max(nn * nn - out.rho_final, 0.0)) / nn : 0.0;
  return out;
}

}  // namespace gt
