#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>
#include <random>

#include "egotrack/assignment.hpp"

using namespace egotrack;

namespace {

// Exhaustive minimum over all injections of rows into columns (or the
// transpose when rows outnumber columns).
double brute_force_cost(const CostMatrix& cost) {
  const int n = static_cast<int>(cost.size());
  const int m = n ? static_cast<int>(cost[0].size()) : 0;
  if (n == 0 || m == 0) return 0.0;
  if (n <= m) {
    std::vector<int> cols(m);
    std::iota(cols.begin(), cols.end(), 0);
    double best = std::numeric_limits<double>::infinity();
    // permutations of columns; first n entries define the matching
    std::sort(cols.begin(), cols.end());
    do {
      double total = 0.0;
      for (int i = 0; i < n; ++i) total += cost[i][cols[i]];
      best = std::min(best, total);
    } while (std::next_permutation(cols.begin(), cols.end()));
    return best;
  }
  CostMatrix t(m, std::vector<double>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) t[j][i] = cost[i][j];
  return brute_force_cost(t);
}

CostMatrix random_matrix(int n, int m, std::mt19937& rng, double lo = -10.0,
                         double hi = 10.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  CostMatrix c(n, std::vector<double>(m));
  for (auto& row : c)
    for (auto& v : row) v = dist(rng);
  return c;
}

}  // namespace

TEST_CASE("trivial shapes") {
  CHECK(assign({}).empty());
  CHECK(assign({{3.5}}) == Assignment{{0, 0}});
}

TEST_CASE("forced diagonal optimum") {
  const CostMatrix c = {{0, 100, 100}, {100, 0, 100}, {100, 100, 0}};
  CHECK(assign(c) == Assignment{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("matches brute force on random square matrices") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const CostMatrix c = random_matrix(5, 5, rng);
    const Assignment a = assign(c);
    REQUIRE(a.size() == 5);
    CHECK_THAT(assignment_cost(c, a),
               Catch::Matchers::WithinAbs(brute_force_cost(c), 1e-9));
  }
}

TEST_CASE("matches brute force on rectangular matrices") {
  std::mt19937 rng(13);
  std::uniform_int_distribution<int> dim(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = dim(rng), m = dim(rng);
    const CostMatrix c = random_matrix(n, m, rng);
    const Assignment a = assign(c);
    REQUIRE(a.size() == static_cast<size_t>(std::min(n, m)));
    CHECK_THAT(assignment_cost(c, a),
               Catch::Matchers::WithinAbs(brute_force_cost(c), 1e-9));
    // no duplicate rows or columns
    std::vector<int> rows, cols;
    for (auto [r, cc] : a) {
      rows.push_back(r);
      cols.push_back(cc);
    }
    std::sort(rows.begin(), rows.end());
    std::sort(cols.begin(), cols.end());
    CHECK(std::adjacent_find(rows.begin(), rows.end()) == rows.end());
    CHECK(std::adjacent_find(cols.begin(), cols.end()) == cols.end());
  }
}

TEST_CASE("lexicographic tie-break") {
  // every matching has the same total cost; the lex-smallest pairing wins
  const CostMatrix flat = {{1, 1, 1}, {1, 1, 1}, {1, 1, 1}};
  CHECK(assign(flat) == Assignment{{0, 0}, {1, 1}, {2, 2}});
}

TEST_CASE("matching is invariant under affine cost shift") {
  std::mt19937 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const CostMatrix c = random_matrix(4, 6, rng, 0.0, 1.0);
    CostMatrix shifted = c;
    for (auto& row : shifted)
      for (auto& v : row) v -= 1.0;  // 1-IoU -> -IoU
    CHECK(assign(c) == assign(shifted));
  }
}

TEST_CASE("non-finite entries are rejected") {
  CHECK_THROWS_AS(assign({{std::numeric_limits<double>::infinity()}}),
                  std::invalid_argument);
}
