#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "solvers.hpp"

namespace gt {

namespace detail {

inline bool next_combination(std::vector<Index>& c, Index n) {
  const auto k = static_cast<Index>(c.size());
  for (Index i = k; i-- > 0;) {
    if (c[static_cast<std::size_t>(i)] < n - (k - i)) {
      ++c[static_cast<std::size_t>(i)];
      for (Index j = i + 1; j < k; ++j) c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
      return true;
    }
  }
  return false;
}

inline MatX<double> coordinate_isometry(Index n, const std::vector<Index>& picks) {
  MatX<double> u = MatX<double>::Zero(n, static_cast<Index>(picks.size()));
  for (std::size_t q = 0; q < picks.size(); ++q) u(picks[q], static_cast<Index>(q)) = 1.0;
  return u;
}

}  // namespace detail

// Indices of the m largest projector diagonal entries; equal values resolve
// toward the lower index.  Output sorted ascending.
inline std::vector<Index> round_projector_diagonal(const GrassPoint<double>& f) {
  std::vector<Index> idx(static_cast<std::size_t>(f.n()));
  std::iota(idx.begin(), idx.end(), Index(0));
  const MatX<double> p = f.projector();
  std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return p(a, a) > p(b, b); });
  idx.resize(static_cast<std::size_t>(f.m()));
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline double submatrix_sum(const MatX<double>& lambda, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  double s = 0;
  for (Index i : rows)
    for (Index j : cols) s += lambda(i, j);
  return s;
}

struct SelectResult {
  std::vector<Index> rows, cols;
  double value = 0;        // exact sum over the picked rows x cols
  double rho_relaxed = 0;  // value the continuous solver reached
  SolveResult<double> solve;
};

// Pick rows and columns whose submatrix has maximal entry sum by relaxing the
// 0/1 choice to a pair of subspaces, then rounding each solution back to
// coordinates and rescoring it exactly.  Run 0 starts from the greedy
// row/column sums; the rest restart randomly.  The landscape splinters into
// many shallow basins at small pick counts, hence the generous start count.
inline SelectResult select_rows_cols(const MatX<double>& lambda, Index m_rows, Index m_cols,
                                     Method method = Method::rcg, const SolverConfig& cfg = {}, int multi_start = 16,
                                     std::uint64_t seed = 0) {
  const Index s = lambda.rows(), t = lambda.cols();
  if (m_rows < 1 || m_rows >= s || m_cols < 1 || m_cols >= t)
    throw std::invalid_argument("select_rows_cols: pick counts must lie strictly between 0 and the matrix size");

  DenseTensor<double> d({s, t});
  for (Index i = 0; i < s; ++i)
    for (Index j = 0; j < t; ++j) d.at({i, j}) = lambda(i, j);
  const auto obj = ObjectiveMatrix<double>::diagonal(std::move(d));

  auto greedy_axis = [](const VecX<double>& score, Index m) {
    std::vector<Index> idx(static_cast<std::size_t>(score.size()));
    std::iota(idx.begin(), idx.end(), Index(0));
    std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index b) { return score(a) > score(b); });
    idx.resize(static_cast<std::size_t>(m));
    std::sort(idx.begin(), idx.end());
    return idx;
  };

  SelectResult out;
  bool have = false;
  for (int run = 0; run < std::max(1, multi_start); ++run) {
    ProductPoint<double> start;
    if (run == 0) {
      start.factors.push_back(GrassPoint<double>::from_isometry(
          detail::coordinate_isometry(s, greedy_axis(lambda.rowwise().sum(), m_rows))));
      start.factors.push_back(GrassPoint<double>::from_isometry(
          detail::coordinate_isometry(t, greedy_axis(lambda.colwise().sum().transpose(), m_cols))));
    } else {
      auto rng = std::mt19937_64(seed + static_cast<std::uint64_t>(run));
      start = random_product<double>({s, t}, {m_rows, m_cols}, rng);
    }
    auto res = run_method(method == Method::hooi ? Method::rcg : method, obj, start, cfg);
    std::vector<Index> rows = round_projector_diagonal(res.point.factors[0]);
    std::vector<Index> cols = round_projector_diagonal(res.point.factors[1]);
    const double value = submatrix_sum(lambda, rows, cols);
    if (!have || value > out.value) {
      out.rows = std::move(rows);
      out.cols = std::move(cols);
      out.value = value;
      out.rho_relaxed = res.rho;
      out.solve = std::move(res);
      have = true;
    }
  }
  return out;
}

// Certified optimum by enumeration; ties resolve to the lexicographically
// smallest row set, then column set.
inline SelectResult select_exhaustive(const MatX<double>& lambda, Index m_rows, Index m_cols) {
  const Index s = lambda.rows(), t = lambda.cols();
  if (m_rows < 1 || m_rows > s || m_cols < 1 || m_cols > t)
    throw std::invalid_argument("select_exhaustive: pick counts out of range");
  auto choose = [](Index n, Index k) {
    double c = 1;
    for (Index i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return c;
  };
  if (choose(s, m_rows) * choose(t, m_cols) > 1e6) throw std::invalid_argument("select_exhaustive: instance too large");

  SelectResult out;
  bool have = false;
  std::vector<Index> rows(static_cast<std::size_t>(m_rows));
  std::iota(rows.begin(), rows.end(), Index(0));
  do {
    std::vector<Index> cols(static_cast<std::size_t>(m_cols));
    std::iota(cols.begin(), cols.end(), Index(0));
    do {
      const double value = submatrix_sum(lambda, rows, cols);
      if (!have || value > out.value) {
        out.rows = rows;
        out.cols = cols;
        out.value = value;
        have = true;
      }
    } while (detail::next_combination(cols, t));
  } while (detail::next_combination(rows, s));
  out.rho_relaxed = out.value;
  return out;
}

}  // namespace gt
