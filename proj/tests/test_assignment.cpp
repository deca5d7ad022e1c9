#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "marinetrack/assignment.hpp"
#include "oracles/assignment_oracle.hpp"

using namespace marinetrack;

namespace {

CostMatrix to_matrix(const std::vector<std::vector<double>>& c) {
  const auto n = static_cast<Eigen::Index>(c.size());
  const auto m = static_cast<Eigen::Index>(n ? c[0].size() : 0);
  CostMatrix out(n, m);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < m; ++j) out(i, j) = c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  return out;
}

std::vector<long> row_to_col(const AssignmentResult& a, std::size_t rows) {
  std::vector<long> out(rows, -1);
  for (auto [r, c] : a.matches) out[r] = static_cast<long>(c);
  return out;
}

}  // namespace

TEST_CASE("single feasible pair") {
  CostMatrix c(1, 1);
  c << 5.0;
  const auto a = linear_assignment(c, 30.0);
  REQUIRE(a.matches.size() == 1);
  CHECK(a.matches[0] == std::pair<std::size_t, std::size_t>{0, 0});
  CHECK(a.total_cost == 5.0);
}

TEST_CASE("single pair over the gate") {
  CostMatrix c(1, 1);
  c << 45.0;
  const auto a = linear_assignment(c, 30.0);
  CHECK(a.matches.empty());
  CHECK(a.unmatched_rows == std::vector<std::size_t>{0});
  CHECK(a.unmatched_cols == std::vector<std::size_t>{0});
}

TEST_CASE("empty matrices") {
  CHECK(linear_assignment(CostMatrix(0, 3), 1.0).unmatched_cols.size() == 3);
  CHECK(linear_assignment(CostMatrix(2, 0), 1.0).unmatched_rows.size() == 2);
}

TEST_CASE("more pairs beat a cheaper single pair") {
  // Greedy would take (0,0) at cost 1 and strand row 1.
  CostMatrix c(2, 2);
  c << 1, 20, 25, 99;
  const auto a = linear_assignment(c, 30.0);
  CHECK(a.matches.size() == 2);
  CHECK(a.total_cost == 45.0);
}

TEST_CASE("ties resolve to the lowest row and column") {
  CostMatrix c(2, 2);
  c << 3, 3, 3, 3;
  const auto a = linear_assignment(c, 10.0);
  CHECK(row_to_col(a, 2) == std::vector<long>{0, 1});
  CostMatrix d(1, 3);
  d << 7, 7, 7;
  CHECK(row_to_col(linear_assignment(d, 10.0), 1) == std::vector<long>{0});
}

TEST_CASE("matches the exhaustive search on random integer matrices") {
  std::mt19937_64 gen(17);
  std::uniform_int_distribution<int> dim(1, 6), val(0, 50);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = dim(gen), m = dim(gen);
    std::vector<std::vector<double>> c(n, std::vector<double>(m));
    for (auto& row : c)
      for (double& v : row) v = val(gen);
    const auto ref = oracle::brute_force_assignment(c, 30.0);
    const auto a = linear_assignment(to_matrix(c), 30.0);
    CHECK(a.matches.size() == ref.cardinality);
    CHECK(a.total_cost == ref.cost);
    CHECK(row_to_col(a, static_cast<std::size_t>(n)) == ref.row_to_col);
  }
}

TEST_CASE("output bookkeeping is consistent") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> val(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    CostMatrix c = CostMatrix::NullaryExpr(4, 5, [&] { return val(gen); });
    const auto a = linear_assignment(c, 0.5);
    CHECK(a.matches.size() + a.unmatched_rows.size() == 4);
    CHECK(a.matches.size() + a.unmatched_cols.size() == 5);
    for (auto [r, col] : a.matches) CHECK(c(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) <= 0.5);
  }
}
