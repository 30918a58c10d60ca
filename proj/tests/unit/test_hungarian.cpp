#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hoikit/hungarian.hpp"

using namespace hoikit;

namespace {

// Exhaustive minimum over injective assignments of the smaller side.
double brute_force_min(const CostMatrix& c) {
  const bool by_row = c.rows() <= c.cols();
  const std::size_t small = by_row ? c.rows() : c.cols();
  const std::size_t large = by_row ? c.cols() : c.rows();
  std::vector<std::size_t> perm(large);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t i = 0; i < small; ++i) s += by_row ? c(i, perm[i]) : c(perm[i], i);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Lexicographically first optimal permutation of the padded square problem,
// restricted to real cells.
std::vector<std::pair<std::size_t, std::size_t>> brute_force_lex(const CostMatrix& c) {
  const std::size_t n = std::max(c.rows(), c.cols());
  auto at = [&](std::size_t r, std::size_t k) { return r < c.rows() && k < c.cols() ? c(r, k) : kPaddingCost; };
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::size_t> best_perm;
  do {
    double s = 0.0;
    for (std::size_t r = 0; r < n; ++r) s += at(r, perm[r]);
    if (s < best) {
      best = s;
      best_perm = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t r = 0; r < c.rows(); ++r) {
    if (best_perm[r] < c.cols()) out.emplace_back(r, best_perm[r]);
  }
  return out;
}

double assigned_cost(const CostMatrix& c, const Assignment& a) {
  double s = 0.0;
  for (const auto& [r, k] : a.pairs) s += c(r, k);
  return s;
}

void check_structure(const CostMatrix& c, const Assignment& a) {
  CHECK(a.pairs.size() == std::min(c.rows(), c.cols()));
  std::vector<bool> col_used(c.cols(), false);
  for (std::size_t i = 0; i < a.pairs.size(); ++i) {
    if (i) CHECK(a.pairs[i - 1].first < a.pairs[i].first);
    CHECK(a.pairs[i].first < c.rows());
    REQUIRE(a.pairs[i].second < c.cols());
    CHECK_FALSE(col_used[a.pairs[i].second]);
    col_used[a.pairs[i].second] = true;
  }
  CHECK(a.cost == doctest::Approx(assigned_cost(c, a)).epsilon(1e-12));
}

}  // namespace

TEST_CASE("small examples") {
  const CostMatrix a{{0, 1}, {1, 0}};
  const auto r = hungarian_match(a);
  CHECK(r.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
  CHECK(r.cost == 0.0);

  const CostMatrix b{{0.9, 0.1, 0.5}};
  CHECK(hungarian_match(b).pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}});

  const CostMatrix tall{{0.9}, {0.2}, {0.4}};
  CHECK(hungarian_match(tall).pairs == std::vector<std::pair<std::size_t, std::size_t>>{{1, 0}});
}

TEST_CASE("empty matrices") {
  CHECK(hungarian_match(CostMatrix(0, 0)).pairs.empty());
  CHECK(hungarian_match(CostMatrix(0, 3)).pairs.empty());
  CHECK(hungarian_match(CostMatrix(3, 0)).pairs.empty());
}

TEST_CASE("non-finite entries are rejected") {
  CostMatrix c(2, 2, 0.5);
  c(1, 0) = std::nan("");
  CHECK_THROWS_AS(hungarian_match(c), std::invalid_argument);
  c(1, 0) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(hungarian_match(c), std::invalid_argument);
}

TEST_CASE("ties resolve to the lexicographically smallest assignment") {
  CHECK(hungarian_match(CostMatrix(3, 3, 0.0)).pairs ==
        std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}, {2, 2}});
  const CostMatrix c{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  CHECK(hungarian_match(c).pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {2, 0}});
}

TEST_CASE("ties match a brute-force lexicographic oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 1 + rng() % 6, m = 1 + rng() % 6;
    CostMatrix c(n, m);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < m; ++k) c(r, k) = static_cast<double>(rng() % 3) * 0.5;
    const auto got = hungarian_match(c);
    check_structure(c, got);
    CHECK(got.pairs == brute_force_lex(c));
  }
}

TEST_CASE("1000 random matrices match the exhaustive minimum") {
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto start = std::chrono::steady_clock::now();
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 7, m = 1 + rng() % 7;
    CostMatrix c(n, m);
    const double scale = trial % 3 == 0 ? 100.0 : 1.0;
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t k = 0; k < m; ++k) c(r, k) = u(rng) * scale;
    const auto got = hungarian_match(c);
    check_structure(c, got);
    CHECK(std::abs(assigned_cost(c, got) - brute_force_min(c)) <= 1e-9);
  }
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::seconds(10));
}

TEST_CASE("larger instance stays consistent") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  CostMatrix c(60, 45);
  for (std::size_t r = 0; r < 60; ++r)
    for (std::size_t k = 0; k < 45; ++k) c(r, k) = u(rng);
  const auto got = hungarian_match(c);
  check_structure(c, got);
  // Any single swap of two assigned rows cannot improve the cost.
  for (std::size_t i = 0; i < got.pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < got.pairs.size(); ++j) {
      const auto [ri, ci] = got.pairs[i];
      const auto [rj, cj] = got.pairs[j];
      CHECK(c(ri, ci) + c(rj, cj) <= c(ri, cj) + c(rj, ci) + 1e-12);
    }
  }
}
