// Acceptance battery: one pass/fail line per criterion, all tolerances pinned
// here.  Exits nonzero if any criterion fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "grasstensor/approx.hpp"
#include "grasstensor/cluster.hpp"
#include "grasstensor/csv_io.hpp"
#include "grasstensor/entangle.hpp"
#include "grasstensor/select.hpp"

using gt::cplx;
using gt::DenseTensor;
using gt::GrassPoint;
using gt::Index;
using gt::MatX;
using gt::Method;
using gt::ObjectiveMatrix;
using gt::ProductPoint;
using gt::SolverConfig;
using gt::SolveStatus;
using gt::VecX;

namespace {

struct Criterion {
  std::string label;
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) { return gt::format_double(v); }

// --- shared instance generators -------------------------------------------

template <class Scalar>
MatX<Scalar> random_hermitian(Index n, std::mt19937_64& rng) {
  MatX<Scalar> a = gt::gaussian_matrix<Scalar>(n, n, rng);
  return a + a.adjoint();
}

template <class Scalar>
DenseTensor<Scalar> random_tensor(const std::vector<Index>& dims, std::mt19937_64& rng) {
  Index total = 1;
  for (Index d : dims) total *= d;
  return DenseTensor<Scalar>(dims, gt::gaussian_matrix<Scalar>(total, 1, rng));
}

// Rotates through all five objective variants on random shapes.
template <class Scalar>
ObjectiveMatrix<Scalar> random_objective(int kind_idx, Index max_dim, std::mt19937_64& rng) {
  std::uniform_int_distribution<Index> order_d(2, 3);
  std::uniform_int_distribution<Index> dim_d(2, max_dim);
  const Index r = order_d(rng);
  std::vector<Index> dims;
  for (Index j = 0; j < r; ++j) dims.push_back(dim_d(rng));
  switch (kind_idx % 5) {
    case 0: {
      Index total = 1;
      for (Index d : dims) total *= d;
      return ObjectiveMatrix<Scalar>::dense(dims, random_hermitian<Scalar>(total, rng));
    }
    case 1:
      return ObjectiveMatrix<Scalar>::rank_one(random_tensor<Scalar>(dims, rng));
    case 2: {
      std::vector<MatX<Scalar>> blocks;
      for (Index d : dims) blocks.push_back(random_hermitian<Scalar>(d, rng));
      return ObjectiveMatrix<Scalar>::kron_factors(blocks);
    }
    case 3: {
      const Index n = dims[0];
      std::vector<VecX<Scalar>> pts;
      for (int l = 0; l < 4; ++l) pts.push_back(gt::gaussian_matrix<Scalar>(n, 1, rng));
      return ObjectiveMatrix<Scalar>::sum_kron_powers(pts, r);
    }
    default:
      return ObjectiveMatrix<Scalar>::diagonal(random_tensor<double>(dims, rng));
  }
}

template <class Scalar>
ProductPoint<Scalar> random_point_for(const ObjectiveMatrix<Scalar>& obj, std::mt19937_64& rng) {
  std::vector<Index> ranks;
  for (Index n : obj.dims()) {
    std::uniform_int_distribution<Index> m_d(1, n - 1);
    ranks.push_back(m_d(rng));
  }
  return gt::random_product<Scalar>(obj.dims(), ranks, rng);
}

template <class Scalar>
gt::TangentCoord<Scalar> unit_tangent(const ProductPoint<Scalar>& p, std::mt19937_64& rng) {
  auto z = gt::random_tangent(p, rng);
  const double nrm = gt::tangent_norm(z);
  if (nrm > 0)
    for (auto& b : z.blocks) b /= nrm;
  return z;
}

// --- criteria ---------------------------------------------------------------

template <class Scalar>
double worst_contraction_diff(int kind_idx, std::mt19937_64& rng) {
  const auto obj = random_objective<Scalar>(kind_idx, 4, rng);
  const auto dense = ObjectiveMatrix<Scalar>::dense(obj.dims(), obj.materialize());
  const auto p = random_point_for(obj, rng);
  double worst = std::abs(obj.rho(p) - dense.rho(p));
  for (Index j = 0; j < obj.order(); ++j) {
    worst = std::max(worst, (obj.psi_hat(p, j) - dense.psi_hat(p, j)).cwiseAbs().maxCoeff());
    for (Index k = j + 1; k < obj.order(); ++k)
      worst = std::max(worst, (obj.psi_hat_pair(p, j, k) - dense.psi_hat_pair(p, j, k)).cwiseAbs().maxCoeff());
  }
  return worst;
}

Criterion criterion_partial_traces() {
  constexpr double kTol = 1e-10;
  constexpr double kBudgetSec = 10.0;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto rng = std::mt19937_64(10'000 + seed);
    const int kind = static_cast<int>(seed % 5);
    worst = std::max(worst, seed % 2 == 0 ? worst_contraction_diff<cplx>(kind, rng)
                                          : worst_contraction_diff<double>(kind, rng));
  }
  const double elapsed = seconds_since(t0);
  return {"partial contractions match the dense oracle on 50 instances",
          worst < kTol && elapsed < kBudgetSec,
          "worst " + fmt(worst) + " vs " + fmt(kTol) + ", " + fmt(elapsed) + " s"};
}

template <class Scalar>
double worst_gradient_err(int kind_idx, std::mt19937_64& rng) {
  const auto obj = random_objective<Scalar>(kind_idx, 6, rng);
  const auto p = random_point_for(obj, rng);
  const auto ev = gt::evaluate(obj, p);
  double worst = 0;
  for (int dir = 0; dir < 20; ++dir) {
    const auto z = unit_tangent(p, rng);
    const double slope = gt::metric(ev.grad, z);
    for (const double h : {1e-4, 1e-5}) {
      const double fp = obj.rho(gt::exp_retract(p, z, h));
      const double fm = obj.rho(gt::exp_retract(p, z, -h));
      const double fd = (fp - fm) / (2 * h);
      worst = std::max(worst, std::abs(fd - slope) / std::max(1.0, std::abs(slope)));
    }
  }
  return worst;
}

Criterion criterion_gradient() {
  constexpr double kTol = 1e-6;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = std::mt19937_64(20'000 + seed);
    const int kind = static_cast<int>(seed % 5);
    worst = std::max(worst,
                     seed % 2 == 0 ? worst_gradient_err<cplx>(kind, rng) : worst_gradient_err<double>(kind, rng));
  }
  return {"gradients match central differences (h = 1e-4, 1e-5) on 20 x 20 directions", worst < kTol,
          "worst rel err " + fmt(worst) + " vs " + fmt(kTol)};
}

struct HessianWorst {
  double asym = 0;
  double fd = 0;
  double paths = 0;
};

template <class Scalar>
void hessian_errs(int kind_idx, std::mt19937_64& rng, HessianWorst& w) {
  const auto obj = random_objective<Scalar>(kind_idx, 4, rng);
  const auto p = random_point_for(obj, rng);
  if (gt::dimension(p) == 0) return;
  const auto ev = gt::evaluate(obj, p, true);
  const MatX<double> hm = gt::hessian_reduced(ev, p);
  const double scale = std::max(1.0, hm.cwiseAbs().maxCoeff());
  w.asym = std::max(w.asym, (hm - hm.transpose()).cwiseAbs().maxCoeff() / scale);
  for (int dir = 0; dir < 5; ++dir) {
    const auto z = unit_tangent(p, rng);
    const double quad = gt::metric(gt::hessian_apply(ev, p, z), z);
    const double h = 1e-3;
    const double f0 = obj.sign() * obj.rho(p);
    const double fp = obj.sign() * obj.rho(gt::exp_retract(p, z, h));
    const double fm = obj.sign() * obj.rho(gt::exp_retract(p, z, -h));
    const double fd = (fp - 2 * f0 + fm) / (h * h);
    w.fd = std::max(w.fd, std::abs(fd - quad) / std::max(1.0, std::abs(quad)));
    const VecX<double> packed = gt::pack_tangent(z);
    const VecX<double> via_matrix = hm * packed;
    const VecX<double> via_op = gt::pack_tangent(gt::hessian_apply(ev, p, gt::unpack_tangent<Scalar>(packed, p)));
    w.paths = std::max(w.paths, (via_matrix - via_op).cwiseAbs().maxCoeff());
  }
}

Criterion criterion_hessian() {
  constexpr double kSymTol = 1e-8;
  constexpr double kFdTol = 1e-4;
  constexpr double kPathTol = 1e-9;
  HessianWorst w;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto rng = std::mt19937_64(30'000 + seed);
    const int kind = static_cast<int>(seed % 5);
    if (seed % 2 == 0)
      hessian_errs<cplx>(kind, rng, w);
    else
      hessian_errs<double>(kind, rng, w);
  }
  const bool pass = w.asym < kSymTol && w.fd < kFdTol && w.paths < kPathTol;
  return {"curvature: symmetry, second differences, matrix/operator agreement", pass,
          "asym " + fmt(w.asym) + ", fd " + fmt(w.fd) + ", paths " + fmt(w.paths)};
}

Criterion criterion_eckart_young() {
  constexpr double kTol = 1e-10;
  auto rng = std::mt19937_64(40'001);
  double worst = 0;

  // single factor: top-m eigenvalue sum of a Hermitian matrix
  {
    const Index n = 20, m = 4;
    const MatX<cplx> a = random_hermitian<cplx>(n, rng);
    const auto obj = ObjectiveMatrix<cplx>::dense({n}, a);
    Eigen::SelfAdjointEigenSolver<MatX<cplx>> eig(a);
    const double target = eig.eigenvalues().tail(m).sum();
    double best = -1e300;
    for (std::uint64_t s = 0; s < 3; ++s) {
      auto srng = std::mt19937_64(41'000 + s);
      best = std::max(best, gt::run_method(Method::rcg, obj, gt::random_product<cplx>({n}, {m}, srng), {}).rho);
    }
    worst = std::max(worst, std::abs(best - target));
  }
  {
    const Index n = 15, m = 3;
    const MatX<double> a = random_hermitian<double>(n, rng);
    const auto obj = ObjectiveMatrix<double>::dense({n}, a);
    Eigen::SelfAdjointEigenSolver<MatX<double>> eig(a);
    const double target = eig.eigenvalues().tail(m).sum();
    double best = -1e300;
    for (std::uint64_t s = 0; s < 3; ++s) {
      auto srng = std::mt19937_64(42'000 + s);
      best = std::max(best, gt::run_method(Method::rcg, obj, gt::random_product<double>({n}, {m}, srng), {}).rho);
    }
    worst = std::max(worst, std::abs(best - target));
  }

  // order-2 tensor: residual equals the discarded singular mass
  double resid_diff = 0;
  {
    const auto t = random_tensor<cplx>({12, 9}, rng);
    Eigen::JacobiSVD<MatX<cplx>> svd(gt::unfold_mode(t, 0));
    double tail = 0;
    for (Index i = 3; i < svd.singularValues().size(); ++i) tail += std::pow(svd.singularValues()(i), 2);
    const auto res = gt::best_rank_approx(t, {3, 3});
    resid_diff = std::abs(res.rel_residual - std::sqrt(tail) / gt::norm(t));
  }
  const bool pass = worst < kTol && resid_diff < kTol;
  return {"single-factor values equal top-m eigenvalue sums; matrix residual is the SVD tail", pass,
          "eig diff " + fmt(worst) + ", residual diff " + fmt(resid_diff) + " vs " + fmt(kTol)};
}

Criterion criterion_two_mode() {
  constexpr double kTol = 1e-8;
  double worst = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = std::mt19937_64(50'000 + seed);
    const Index n1 = 5 + static_cast<Index>(seed % 4);  // up to 8
    const Index n2 = 4 + static_cast<Index>(seed % 3);
    const Index m = 2 + static_cast<Index>(seed % 2);
    const auto y = random_tensor<cplx>({n1, n2}, rng);
    Eigen::JacobiSVD<MatX<cplx>> svd(gt::unfold_mode(y, 0));
    double target = 0;
    for (Index i = 0; i < m; ++i) target += std::pow(svd.singularValues()(i), 2);
    const auto res = gt::best_rank_approx(y, {m, m});
    if (res.solve.status != SolveStatus::converged) return {"two-factor values equal singular-value sums", false,
                                                            "seed " + std::to_string(seed) + " did not converge"};
    worst = std::max(worst, std::abs(res.rho_final - target));
  }
  return {"two-factor values equal singular-value sums on 20 random matrices", worst < kTol,
          "worst " + fmt(worst) + " vs " + fmt(kTol)};
}

Criterion criterion_table_example() {
  constexpr double kValueTol = 1e-10;
  constexpr double kBasinTol = 1e-12;
  constexpr double kEigTol = 1e-10;
  DenseTensor<double> table({2, 2});
  table.at({0, 0}) = 0;
  table.at({0, 1}) = 3;
  table.at({1, 0}) = 2;
  table.at({1, 1}) = 1;
  const auto obj = ObjectiveMatrix<cplx>::diagonal(table);

  double best = -1e300;
  for (std::uint64_t s = 0; s < 10; ++s) {
    auto rng = std::mt19937_64(60'000 + s);
    best = std::max(best, gt::run_method(Method::rcg, obj, gt::random_product<cplx>({2, 2}, {1, 1}, rng), {}).rho);
  }
  const double global_err = std::abs(best - 3.0);

  MatX<cplx> e1(2, 1), e2(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  ProductPoint<cplx> second;
  second.factors = {GrassPoint<cplx>::from_isometry(e2), GrassPoint<cplx>::from_isometry(e1)};
  auto rng = std::mt19937_64(61'000);
  auto z = gt::random_tangent(second, rng);
  const double nrm = gt::tangent_norm(z);
  for (auto& b : z.blocks) b *= 1e-2 / nrm;
  const auto newton = gt::run_method(Method::newton, obj, gt::qr_retract(second, z, 1.0), {});
  const double basin_err = std::abs(newton.rho - 2.0);

  const auto ev = gt::evaluate(obj, newton.point, true);
  const MatX<double> hm = gt::hessian_reduced(ev, newton.point);
  const double max_eig =
      Eigen::SelfAdjointEigenSolver<MatX<double>>(0.5 * (hm + hm.transpose())).eigenvalues().maxCoeff();

  const bool pass = global_err < kValueTol && basin_err < kBasinTol && max_eig <= kEigTol;
  return {"diagonal table: global value 3 from multi-start, basin value 2, concave curvature", pass,
          "global err " + fmt(global_err) + ", basin err " + fmt(basin_err) + ", max eig " + fmt(max_eig)};
}

Criterion criterion_newton_tail() {
  constexpr double kEnter = 1e-3;
  constexpr double kFloor = 1e-13;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto rng = std::mt19937_64(70'000 + seed);
    const auto amps = random_tensor<cplx>({6, 6, 6}, rng);
    const auto obj = ObjectiveMatrix<cplx>::rank_one(amps);
    SolverConfig warm_cfg;
    warm_cfg.max_iter = 6;
    const auto warm = gt::run_method(Method::hooi, obj, gt::hosvd_point(amps, {2, 2, 2}), warm_cfg);
    const auto res = gt::run_method(Method::newton, obj, warm.point, {});
    if (res.status != SolveStatus::converged)
      return {"Newton tail", false, "seed " + std::to_string(seed) + ": " + gt::to_string(res.status)};
    bool entered = false;
    for (std::size_t i = 1; i < res.trace.size(); ++i) {
      const double prev = res.trace[i - 1].relgrad;
      const double next = res.trace[i].relgrad;
      if (prev < kEnter) {
        entered = true;
        if (next > std::max(std::pow(prev, 1.5), kFloor))
          return {"Newton tail", false,
                  "seed " + std::to_string(seed) + ": " + fmt(prev) + " -> " + fmt(next)};
      }
    }
    if (!entered) return {"Newton tail", false, "seed " + std::to_string(seed) + " never reached the tail"};
  }
  return {"Newton contracts supergeometrically below 1e-3 down to the 1e-13 floor (10 seeds)", true,
          "g(k+1) <= max(g(k)^1.5, 1e-13) on every tail step"};
}

Criterion criterion_cg_vs_alternating() {
  constexpr double kMargin = 1e-8;
  constexpr double kEps = 1e-10;
  constexpr int kIterCap = 500;
  double worst_gap = -1e300;
  int worst_iters = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = std::mt19937_64(80'000 + seed);
    const auto t = random_tensor<cplx>({10, 10, 10}, rng);
    const auto obj = ObjectiveMatrix<cplx>::rank_one(t);
    SolverConfig warm_cfg;
    warm_cfg.max_iter = 3;
    const auto warm = gt::run_method(Method::hooi, obj, gt::hosvd_point(t, {2, 2, 2}), warm_cfg);
    SolverConfig cfg;
    cfg.epsilon = kEps;
    const auto cg = gt::run_method(Method::rcg, obj, warm.point, cfg);
    const auto alt = gt::run_method(Method::hooi, obj, warm.point, cfg);
    worst_gap = std::max(worst_gap, alt.rho - cg.rho);
    worst_iters = std::max(worst_iters, cg.iters);
    if (cg.rho < alt.rho - kMargin || cg.status != SolveStatus::converged || cg.iters > kIterCap)
      return {"conjugate gradient vs alternating updates", false,
              "seed " + std::to_string(seed) + ": gap " + fmt(alt.rho - cg.rho) + ", " +
                  std::to_string(cg.iters) + " iters (" + gt::to_string(cg.status) + ")"};
  }
  return {"conjugate gradient matches or beats alternating updates on 20/20 shared starts", true,
          "worst value gap " + fmt(worst_gap) + ", max iters " + std::to_string(worst_iters)};
}

std::vector<VecX<double>> make_plane_data(const std::vector<VecX<double>>& normals, int per_plane,
                                          std::mt19937_64& rng, double noise_sigma) {
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::normal_distribution<double> noise(0.0, noise_sigma);
  std::vector<VecX<double>> out;
  const Index n = normals.front().size();
  for (const auto& b : normals) {
    MatX<double> frame(n, n);
    frame.col(0) = b;
    for (Index c = 1; c < n; ++c) frame.col(c) = gt::gaussian_matrix<double>(n, 1, rng);
    const MatX<double> q = gt::qr_positive<double>(frame);
    for (int i = 0; i < per_plane; ++i) {
      VecX<double> x = VecX<double>::Zero(n);
      for (Index c = 1; c < n; ++c) x += coord(rng) * q.col(c);
      if (noise_sigma > 0)
        for (Index k = 0; k < n; ++k) x(k) += noise(rng);
      out.push_back(x);
    }
  }
  return out;
}

std::vector<VecX<double>> random_normals(std::mt19937_64& rng) {
  while (true) {
    VecX<double> a = gt::gaussian_matrix<double>(3, 1, rng);
    VecX<double> b = gt::gaussian_matrix<double>(3, 1, rng);
    a /= a.norm();
    b /= b.norm();
    if (std::abs(a.dot(b)) < 0.9) return {a, b};
  }
}

Criterion criterion_clustering() {
  constexpr double kNoiselessAngle = 1e-4;
  constexpr double kNoiselessRho = 1e-10;
  constexpr double kNoisyMeanDeg = 5.0;
  constexpr double kNoiseSigma = 0.25;  // 5% of the [-5, 5] coordinate range

  {  // noiseless: 200 + 200 points
    auto rng = std::mt19937_64(90'000);
    const auto normals = random_normals(rng);
    const auto data = make_plane_data(normals, 200, rng, 0.0);
    gt::ClusterOptions opt;
    opt.clusters = 2;
    const auto res = gt::cluster_points(data, opt);
    ProductPoint<double> truth;
    for (const auto& b : normals) truth.factors.push_back(GrassPoint<double>::from_isometry(MatX<double>(b)));
    const auto cmp = gt::compare_arrangements(res.solve.point, truth);
    if (!(cmp.trace_angle_deg < kNoiselessAngle && res.rho < kNoiselessRho))
      return {"subspace clustering", false,
              "noiseless angle " + fmt(cmp.trace_angle_deg) + " deg, rho " + fmt(res.rho)};
  }

  double sum_final = 0, sum_init = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto rng = std::mt19937_64(91'000 + seed);
    const auto normals = random_normals(rng);
    const auto data = make_plane_data(normals, 200, rng, kNoiseSigma);
    gt::ClusterOptions opt;
    opt.clusters = 2;
    const auto res = gt::cluster_points(data, opt);
    ProductPoint<double> truth;
    for (const auto& b : normals) truth.factors.push_back(GrassPoint<double>::from_isometry(MatX<double>(b)));
    sum_final += gt::compare_arrangements(res.solve.point, truth).trace_angle_deg;
    sum_init += gt::compare_arrangements(res.init_point, truth).trace_angle_deg;
  }
  const double mean_final = sum_final / 20, mean_init = sum_init / 20;
  const bool pass = mean_final <= kNoisyMeanDeg && mean_final < mean_init;
  return {"subspace clustering: exact noiseless recovery; refined beats polynomial-only under noise", pass,
          "noisy mean " + fmt(mean_final) + " deg vs init " + fmt(mean_init) + " deg"};
}

Criterion criterion_selection() {
  constexpr int kSeeds = 100;
  constexpr int kNeed = 95;
  int worst_hits = kSeeds;
  std::string worst_combo = "-";
  for (Index m1 = 1; m1 <= 4; ++m1)
    for (Index m2 = 1; m2 <= 4; ++m2) {
      int hits = 0;
      for (int seed = 0; seed < kSeeds; ++seed) {
        auto rng = std::mt19937_64(static_cast<std::uint64_t>(100'000 + seed));
        std::uniform_real_distribution<double> uni(0.05, 1.0);
        MatX<double> lambda(5, 5);
        for (Index i = 0; i < 5; ++i)
          for (Index j = 0; j < 5; ++j) lambda(i, j) = uni(rng);
        const auto got = gt::select_rows_cols(lambda, m1, m2, Method::rcg, {}, 16,
                                              static_cast<std::uint64_t>(seed * 16 + m1 * 4 + m2));
        if (got.value != gt::submatrix_sum(lambda, got.rows, got.cols))
          return {"combinatorial selection", false, "inexact rescoring at seed " + std::to_string(seed)};
        if (got.value == gt::select_exhaustive(lambda, m1, m2).value) ++hits;
      }
      if (hits < worst_hits) {
        worst_hits = hits;
        worst_combo = std::to_string(m1) + "x" + std::to_string(m2);
      }
      if (hits < kNeed)
        return {"combinatorial selection", false,
                "(" + std::to_string(m1) + "," + std::to_string(m2) + "): only " + std::to_string(hits) + "/100"};
    }
  return {"selection: exact rescoring always; >= 95/100 global optima for every (m1,m2) in {1..4}^2", true,
          "worst combo " + worst_combo + " with " + std::to_string(worst_hits) + "/100"};
}

Criterion criterion_entanglement() {
  constexpr double kProductTol = 1e-10;
  constexpr double kPairTol = 1e-8;
  constexpr double kLuTol = 1e-8;

  auto rng = std::mt19937_64(110'000);
  DenseTensor<cplx> product({3, 2, 4});
  {
    std::vector<VecX<cplx>> parts;
    for (Index n : {3, 2, 4}) {
      VecX<cplx> v = gt::gaussian_matrix<cplx>(n, 1, rng);
      parts.push_back(VecX<cplx>(v / v.norm()));
    }
    std::vector<Index> idx = {0, 0, 0};
    for (Index f = 0; f < product.size(); ++f) {
      product.at(idx) = parts[0](idx[0]) * parts[1](idx[1]) * parts[2](idx[2]);
      for (Index d = 3; d-- > 0;) {
        if (++idx[static_cast<std::size_t>(d)] < product.dim(d)) break;
        idx[static_cast<std::size_t>(d)] = 0;
      }
    }
  }
  const double product_delta = gt::geometric_entanglement(product).delta;
  if (product_delta >= kProductTol)
    return {"geometric entanglement", false, "product state delta " + fmt(product_delta)};

  DenseTensor<cplx> bell({2, 2});
  bell.at({0, 0}) = cplx(1 / std::sqrt(2.0), 0);
  bell.at({1, 1}) = cplx(1 / std::sqrt(2.0), 0);
  const double bell_err = std::abs(gt::geometric_entanglement(bell).delta - (2.0 - std::sqrt(2.0)));
  if (bell_err >= kPairTol) return {"geometric entanglement", false, "paired-state err " + fmt(bell_err)};

  auto psi = random_tensor<cplx>({2, 3, 2}, rng);
  psi.flat() /= gt::norm(psi);
  const double base = gt::geometric_entanglement(psi, Method::rcg, {}, 3, 7).delta;
  double worst = 0;
  for (int trial = 0; trial < 20; ++trial) {
    DenseTensor<cplx> rotated = psi;
    for (Index j = 0; j < 3; ++j)
      rotated = gt::mode_multiply(rotated, gt::haar_unitary<cplx>(rotated.dim(j), rng), j);
    worst = std::max(worst, std::abs(gt::geometric_entanglement(rotated, Method::rcg, {}, 3, 7).delta - base));
  }
  const bool pass = worst < kLuTol;
  return {"entanglement: zero at product states, 2 - sqrt(2) for the paired state, unitary invariant", pass,
          "product " + fmt(product_delta) + ", pair err " + fmt(bell_err) + ", LU drift " + fmt(worst)};
}

Criterion criterion_harness() {
  constexpr double kCheckBudgetSec = 120.0;
  namespace fs = std::filesystem;
  const fs::path base = fs::temp_directory_path() / "grasstensor_acceptance";
  fs::remove_all(base);
  fs::create_directories(base);
  const std::string cli = GT_CLI_PATH;

  const auto run = [&](const std::string& args) {
    const std::string cmd = cli + " " + args + " > " + (base / "out.txt").string() + " 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };

  const std::string bench_args = "bench --dims 6,6,6 --ranks 2,2,2 --seed 11 --out ";
  if (run(bench_args + (base / "a").string()) != 0 || run(bench_args + (base / "b").string()) != 0)
    return {"harness", false, "bench run failed"};
  for (const std::string m : {"newton", "rcg", "hooi"}) {
    const std::string a = gt::read_file((base / "a" / ("trace_" + m + ".csv")).string());
    const std::string b = gt::read_file((base / "b" / ("trace_" + m + ".csv")).string());
    if (a != b) return {"harness", false, m + " traces differ between identical runs"};
    if (a.empty()) return {"harness", false, m + " trace is empty"};
  }

  const auto t0 = std::chrono::steady_clock::now();
  const int check_rc = run("check");
  const double elapsed = seconds_since(t0);
  const bool pass = check_rc == 0 && elapsed < kCheckBudgetSec;
  return {"harness: same seed gives byte-identical traces; check battery passes in budget", pass,
          "check exit " + std::to_string(check_rc) + " in " + fmt(elapsed) + " s"};
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<Criterion> results;
  results.push_back(criterion_partial_traces());
  results.push_back(criterion_gradient());
  results.push_back(criterion_hessian());
  results.push_back(criterion_eckart_young());
  results.push_back(criterion_two_mode());
  results.push_back(criterion_table_example());
  results.push_back(criterion_newton_tail());
  results.push_back(criterion_cg_vs_alternating());
  results.push_back(criterion_clustering());
  results.push_back(criterion_selection());
  results.push_back(criterion_entanglement());
  results.push_back(criterion_harness());

  int failed = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& c = results[i];
    if (!c.pass) ++failed;
    std::printf("criterion %02zu: %s — %s (%s)\n", i + 1, c.pass ? "PASS" : "FAIL", c.label.c_str(),
                c.detail.c_str());
  }
  std::printf("%zu/%zu criteria passed in %.1f s\n", results.size() - failed, results.size(), seconds_since(t0));
  return failed == 0 ? 0 : 1;
}
