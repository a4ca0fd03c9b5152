#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "solvers.hpp"

namespace gt {

namespace detail {

// Exponent vectors of all degree-`deg` monomials in n variables, lexicographic
// with the leading variable's exponent decreasing first.
inline void monomials_rec(Index n, Index deg, std::vector<Index>& cur, std::vector<std::vector<Index>>& out) {
  if (static_cast<Index>(cur.size()) + 1 == n) {
    cur.push_back(deg);
    out.push_back(cur);
    cur.pop_back();
    return;
  }
  for (Index e = deg; e >= 0; --e) {
    cur.push_back(e);
    monomials_rec(n, deg - e, cur, out);
    cur.pop_back();
  }
}

inline std::vector<std::vector<Index>> monomials(Index n, Index deg) {
  std::vector<std::vector<Index>> out;
  std::vector<Index> cur;
  monomials_rec(n, deg, cur, out);
  return out;
}

inline double monomial_value(const VecX<double>& x, const std::vector<Index>& alpha) {
  double v = 1;
  for (Index k = 0; k < x.size(); ++k)
    for (Index e = 0; e < alpha[static_cast<std::size_t>(k)]; ++e) v *= x(k);
  return v;
}

}  // namespace detail

// Normals of a degree-r vanishing polynomial fitted to the points: the
// coefficient vector is the least right singular vector of the monomial
// matrix, and representatives of its gradient directions seed one normal per
// cluster (greedy farthest-point selection in 1 - |cos| distance).
inline std::vector<VecX<double>> pda_normals(const std::vector<VecX<double>>& points, Index clusters) {
  if (points.empty() || clusters < 1) throw std::invalid_argument("pda_normals: need points and clusters >= 1");
  const Index n = points.front().size();
  const auto mons = detail::monomials(n, clusters);
  const auto m = static_cast<Index>(mons.size());
  const auto count = static_cast<Index>(points.size());

  MatX<double> v(count, m);
  for (Index i = 0; i < count; ++i)
    for (Index q = 0; q < m; ++q) v(i, q) = detail::monomial_value(points[static_cast<std::size_t>(i)], mons[static_cast<std::size_t>(q)]);
  Eigen::JacobiSVD<MatX<double>> svd(v, Eigen::ComputeFullV);
  const VecX<double> coeff = svd.matrixV().col(m - 1);

  std::vector<VecX<double>> grads;
  std::vector<double> weights;
  for (Index i = 0; i < count; ++i) {
    const VecX<double>& x = points[static_cast<std::size_t>(i)];
    VecX<double> g = VecX<double>::Zero(n);
    for (Index q = 0; q < m; ++q) {
      const auto& alpha = mons[static_cast<std::size_t>(q)];
      for (Index k = 0; k < n; ++k) {
        if (alpha[static_cast<std::size_t>(k)] == 0) continue;
        auto shifted = alpha;
        --shifted[static_cast<std::size_t>(k)];
        g(k) += coeff(q) * static_cast<double>(alpha[static_cast<std::size_t>(k)]) * detail::monomial_value(x, shifted);
      }
    }
    const double h = g.norm();
    if (h > 1e-12) {
      grads.push_back(VecX<double>(g / h));
      weights.push_back(h);
    }
  }
  if (static_cast<Index>(grads.size()) < clusters) throw std::runtime_error("pda_normals: too few usable gradients");

  std::vector<std::size_t> chosen;
  chosen.push_back(static_cast<std::size_t>(
      std::max_element(weights.begin(), weights.end()) - weights.begin()));
  while (static_cast<Index>(chosen.size()) < clusters) {
    double best_dist = -1;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < grads.size(); ++i) {
      double d = 2;
      for (std::size_t c : chosen) d = std::min(d, 1.0 - std::abs(grads[i].dot(grads[c])));
      if (d > best_dist) {
        best_dist = d;
        best_i = i;
      }
    }
    chosen.push_back(best_i);
  }
  std::vector<VecX<double>> out;
  for (std::size_t c : chosen) out.push_back(grads[c]);
  return out;
}

enum class ClusterInit { pda, random, given };

struct ClusterOptions {
  Index clusters = 2;
  std::vector<Index> codims;  // normal-space dimension per cluster; empty = all ones
  Method method = Method::rcg;
  SolverConfig solver;
  ClusterInit init = ClusterInit::pda;
  int multi_start = 1;  // extra random restarts (random init only)
  std::uint64_t seed = 0;
};

struct ClusterResult {
  SolveResult<double> solve;
  ProductPoint<double> init_point;
  std::vector<Index> labels;
  double rho = 0;  // residual objective; zero iff every point lies in some subspace
};

// Fit an arrangement of linear subspaces: minimize the product-of-squared-
// residuals objective over the normal-space frames.  Points are normalized
// internally; zero rows are rejected.
inline ClusterResult cluster_points(const std::vector<VecX<double>>& raw, const ClusterOptions& opt,
                                    const ProductPoint<double>* given = nullptr) {
  if (raw.empty()) throw std::invalid_argument("cluster_points: no data");
  const Index n = raw.front().size();
  std::vector<VecX<double>> points;
  for (const auto& x : raw) {
    if (x.size() != n) throw std::invalid_argument("cluster_points: inconsistent point dimensions");
    const double h = x.norm();
    if (h <= 0) throw std::invalid_argument("cluster_points: zero data row");
    points.push_back(VecX<double>(x / h));
  }
  const Index r = opt.clusters;
  if (r < 1) throw std::invalid_argument("cluster_points: clusters must be positive");
  std::vector<Index> codims = opt.codims;
  if (codims.empty()) codims.assign(static_cast<std::size_t>(r), 1);
  if (static_cast<Index>(codims.size()) != r) throw std::invalid_argument("cluster_points: one codim per cluster");
  for (Index c : codims)
    if (c < 1 || c >= n) throw std::invalid_argument("cluster_points: codims must lie strictly between 0 and dim");
  if (opt.method == Method::hooi) throw std::invalid_argument("cluster_points: alternating updates cannot minimize");

  const auto obj = ObjectiveMatrix<double>::sum_kron_powers(points, r, Sense::minimize);
  ClusterResult out;
  if (opt.init == ClusterInit::given) {
    if (given == nullptr) throw std::invalid_argument("cluster_points: init point missing");
    out.init_point = *given;
    out.solve = run_method(opt.method, obj, out.init_point, opt.solver);
  } else if (opt.init == ClusterInit::pda) {
    for (Index c : codims)
      if (c != 1) throw std::invalid_argument("cluster_points: polynomial init needs codims of one");
    const auto normals = pda_normals(points, r);
    for (const auto& b : normals) out.init_point.factors.push_back(GrassPoint<double>::from_isometry(MatX<double>(b)));
    out.solve = run_method(opt.method, obj, out.init_point, opt.solver);
  } else {
    const std::vector<Index> dims(static_cast<std::size_t>(r), n);
    bool have = false;
    for (int k = 0; k < std::max(1, opt.multi_start); ++k) {
      auto rng = std::mt19937_64(opt.seed + static_cast<std::uint64_t>(k));
      const auto start = random_product<double>(dims, codims, rng);
      auto res = run_method(opt.method, obj, start, opt.solver);
      if (!have || res.rho < out.solve.rho) {
        out.init_point = start;
        out.solve = std::move(res);
        have = true;
      }
    }
  }
  out.rho = out.solve.rho;

  out.labels.reserve(points.size());
  for (const auto& x : points) {
    Index best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < r; ++j) {
      const double d = (out.solve.point.factors[static_cast<std::size_t>(j)].basis().adjoint() * x).squaredNorm();
      if (d < best_d - 1e-15) {
        best_d = d;
        best = j;
      }
    }
    out.labels.push_back(best);
  }
  return out;
}

struct ClusterComparison {
  std::vector<Index> permutation;   // found index assigned to each truth slot
  double trace_angle_deg = 0;       // mean arccos of the normalized projector overlap
  double principal_angle_deg = 0;   // mean of per-pair mean principal angles
};

// Best-permutation agreement between a fitted arrangement and a reference one.
inline ClusterComparison compare_arrangements(const ProductPoint<double>& found, const ProductPoint<double>& truth) {
  const Index r = truth.order();
  if (found.order() != r) throw std::invalid_argument("compare_arrangements: cluster counts differ");
  if (r > 8) throw std::invalid_argument("compare_arrangements: too many clusters to permute");
  const double deg = 180.0 / 3.14159265358979323846;

  MatX<double> trace_angle(r, r), principal_angle(r, r);
  for (Index a = 0; a < r; ++a) {
    for (Index b = 0; b < r; ++b) {
      const auto& uf = found.factors[static_cast<std::size_t>(a)];
      const auto& ut = truth.factors[static_cast<std::size_t>(b)];
      if (uf.n() != ut.n()) throw std::invalid_argument("compare_arrangements: ambient dims differ");
      const MatX<double> overlap = uf.basis().adjoint() * ut.basis();
      const Index mm = std::min(uf.m(), ut.m());
      const double fidelity = overlap.squaredNorm() / static_cast<double>(mm);
      trace_angle(a, b) = std::acos(std::clamp(fidelity, 0.0, 1.0)) * deg;
      Eigen::JacobiSVD<MatX<double>> svd(overlap);
      double sum = 0;
      for (Index i = 0; i < mm; ++i) sum += std::acos(std::clamp(svd.singularValues()(i), 0.0, 1.0)) * deg;
      principal_angle(a, b) = sum / static_cast<double>(mm);
    }
  }

  std::vector<Index> perm(static_cast<std::size_t>(r));
  std::iota(perm.begin(), perm.end(), Index(0));
  std::vector<Index> best_perm = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  do {
    double cost = 0;
    for (Index b = 0; b < r; ++b) cost += trace_angle(perm[static_cast<std::size_t>(b)], b);
    if (cost < best_cost - 1e-15) {
      best_cost = cost;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  ClusterComparison out;
  out.permutation = best_perm;
  double tsum = 0, psum = 0;
  for (Index b = 0; b < r; ++b) {
    tsum += trace_angle(best_perm[static_cast<std::size_t>(b)], b);
    psum += principal_angle(best_perm[static_cast<std::size_t>(b)], b);
  }
  out.trace_angle_deg = tsum / static_cast<double>(r);
  out.principal_angle_deg = psum / static_cast<double>(r);
  return out;
}

}  // namespace gt
