#pragma once

#include <cstdint>
#include <vector>

#include "approx.hpp"

namespace gt {

struct EntangleResult {
  double rho_star = 0;   // best squared overlap with a product state
  double delta = 0;      // 2 - 2 sqrt(rho_star)
  std::vector<VecX<cplx>> closest_product;
  SolveResult<cplx> solve;
};

// Geometric distance from a unit state to the set of product states.  The
// overlap maximization is the rank-(1,...,1) compression problem; extra
// random restarts guard against shallow local maxima.
[[nodiscard]] inline EntangleResult geometric_entanglement(const DenseTensor<cplx>& psi, Method method = Method::rcg,
                                                           const SolverConfig& cfg = {}, int multi_start = 1,
                                                           std::uint64_t seed = 0, int warm_sweeps = 20) {
  const double nn = norm(psi);
  if (std::abs(nn - 1.0) > 1e-10) throw std::invalid_argument("geometric_entanglement: state must be unit norm");
  const std::vector<Index> ones(static_cast<std::size_t>(psi.order()), 1);
  const auto obj = ObjectiveMatrix<cplx>::rank_one(psi);

  auto pipeline = best_rank_approx(psi, ones, method, cfg, warm_sweeps);
  SolveResult<cplx> best = std::move(pipeline.solve);
  for (int k = 1; k < multi_start; ++k) {
    auto rng = std::mt19937_64(seed + static_cast<std::uint64_t>(k));
    const auto start = random_product<cplx>(psi.shape(), ones, rng);
    auto res = run_method(method == Method::hooi ? Method::hooi : method, obj, start, cfg);
    if (res.rho > best.rho) best = std::move(res);
  }

  EntangleResult out;
  out.rho_star = std::min(std::max(best.rho, 0.0), 1.0);
  out.delta = 2.0 - 2.0 * std::sqrt(out.rho_star);
  for (const auto& f : best.point.factors) out.closest_product.push_back(VecX<cplx>(f.basis().col(0)));
  out.solve = std::move(best);
  return out;
}

}  // namespace gt
