#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

namespace marinetrack {

using CostMatrix = Eigen::MatrixXd;

struct AssignmentResult {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (row, col), ascending rows
  std::vector<std::size_t> unmatched_rows;
  std::vector<std::size_t> unmatched_cols;
  double total_cost{0.0};  // sum of matched costs
};

namespace detail {

struct GatedSolution {
  std::vector<long> row_to_col;  // -1 when unmatched
  std::size_t cardinality{0};
  double cost{0.0};
};

// Shortest augmenting path Hungarian method (potentials form), rows <= cols.
// Returns the column assigned to each row.
inline std::vector<std::size_t> hungarian_rows_le_cols(const CostMatrix& a) {
  const std::size_t n = static_cast<std::size_t>(a.rows());
  const std::size_t m = static_cast<std::size_t>(a.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<std::size_t> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (std::size_t i = 1; i <= n; ++i) {
    p[0] = i;
    std::size_t j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const std::size_t i0 = p[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = a(static_cast<Eigen::Index>(i0 - 1), static_cast<Eigen::Index>(j - 1)) -
                           u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<std::size_t> row_to_col(n, 0);
  for (std::size_t j = 1; j <= m; ++j) {
    if (p[j] != 0) row_to_col[p[j] - 1] = j - 1;
  }
  return row_to_col;
}

// Maximum-cardinality matching over pairs with cost <= max_cost, minimum total
// cost among those. Forbidden pairs are priced so that giving one up always
// beats any saving on feasible pairs.
inline GatedSolution solve_gated(const CostMatrix& cost, double max_cost) {
  const Eigen::Index n = cost.rows();
  const Eigen::Index m = cost.cols();
  GatedSolution out;
  out.row_to_col.assign(static_cast<std::size_t>(n), -1);
  if (n == 0 || m == 0) return out;

  double span = 1.0;
  bool any_feasible = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      if (cost(i, j) <= max_cost) {
        span = std::max(span, std::abs(cost(i, j)) + 1.0);
        any_feasible = true;
      }
    }
  }
  if (!any_feasible) return out;
  const double big = 4.0 * span * static_cast<double>(std::min(n, m) + 1);

  const bool transpose = n > m;
  const Eigen::Index rows = transpose ? m : n;
  const Eigen::Index cols = transpose ? n : m;
  CostMatrix work(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) {
      const double c = transpose ? cost(j, i) : cost(i, j);
      work(i, j) = c <= max_cost ? c : big;
    }
  }
  const auto assigned = hungarian_rows_le_cols(work);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto j = static_cast<Eigen::Index>(assigned[static_cast<std::size_t>(i)]);
    const Eigen::Index r = transpose ? j : i;
    const Eigen::Index c = transpose ? i : j;
    if (cost(r, c) <= max_cost) {
      out.row_to_col[static_cast<std::size_t>(r)] = static_cast<long>(c);
    }
  }
  for (Eigen::Index r = 0; r < n; ++r) {
    const long c = out.row_to_col[static_cast<std::size_t>(r)];
    if (c >= 0) {
      ++out.cardinality;
      out.cost += cost(r, c);
    }
  }
  return out;
}

}  // namespace detail

/// Thresholded linear assignment. Among matchings that use only pairs with
/// cost <= max_cost, returns one of maximum cardinality and, among those, of
/// minimum total cost. Ties between optimal matchings resolve to the
/// lexicographically lowest (row, column) pairs.
inline AssignmentResult linear_assignment(const CostMatrix& cost, double max_cost) {
  AssignmentResult result;
  const auto n = static_cast<std::size_t>(cost.rows());
  const auto m = static_cast<std::size_t>(cost.cols());
  const detail::GatedSolution best = detail::solve_gated(cost, max_cost);
  const double tol = 1e-9 * std::max(1.0, std::abs(best.cost));

  std::vector<long> chosen(n, -1);
  std::vector<char> col_used(m, 0);
  std::size_t fixed_card = 0;
  double fixed_cost = 0.0;

  // Optimum over rows [from, n) and unused columns, given earlier choices.
  auto completion = [&](std::size_t from) {
    std::vector<Eigen::Index> free_cols;
    for (std::size_t j = 0; j < m; ++j) {
      if (!col_used[j]) free_cols.push_back(static_cast<Eigen::Index>(j));
    }
    CostMatrix sub(static_cast<Eigen::Index>(n - from), static_cast<Eigen::Index>(free_cols.size()));
    for (std::size_t i = from; i < n; ++i) {
      for (std::size_t k = 0; k < free_cols.size(); ++k) {
        sub(static_cast<Eigen::Index>(i - from), static_cast<Eigen::Index>(k)) =
            cost(static_cast<Eigen::Index>(i), free_cols[k]);
      }
    }
    return detail::solve_gated(sub, max_cost);
  };

  for (std::size_t i = 0; i < n; ++i) {
    bool placed = false;
    for (std::size_t j = 0; j < m && !placed; ++j) {
      const double c = cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (col_used[j] || !(c <= max_cost)) continue;
      col_used[j] = 1;
      const auto rest = completion(i + 1);
      const std::size_t card = fixed_card + 1 + rest.cardinality;
      const double total = fixed_cost + c + rest.cost;
      if (card == best.cardinality && std::abs(total - best.cost) <= tol) {
        chosen[i] = static_cast<long>(j);
        ++fixed_card;
        fixed_cost += c;
        placed = true;
      } else {
        col_used[j] = 0;
      }
    }
    // Otherwise leaving row i unmatched is consistent with the optimum.
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (chosen[i] >= 0) {
      const auto j = static_cast<std::size_t>(chosen[i]);
      result.matches.emplace_back(i, j);
      result.total_cost += cost(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    } else {
      result.unmatched_rows.push_back(i);
    }
  }
  for (std::size_t j = 0; j < m; ++j) {
    if (!col_used[j]) result.unmatched_cols.push_back(j);
  }
  return result;
}

}  // namespace marinetrack
