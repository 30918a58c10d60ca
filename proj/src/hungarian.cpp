#include "hoikit/hungarian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hoikit {

CostMatrix::CostMatrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ ? rows.begin()->size() : 0;
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("CostMatrix: ragged rows");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

namespace {

struct Solution {
  std::vector<std::size_t> col_of_row;
  std::vector<double> u;  // row potentials
  std::vector<double> v;  // column potentials
};

// Shortest augmenting path Hungarian method on a square matrix, O(n^3).
// Leaves an optimal dual: a(i,j) - u[i] - v[j] >= 0, zero on assigned cells.
Solution solve_square(const std::vector<double>& a, std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<std::size_t> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
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
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = a[(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
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
  Solution s;
  s.col_of_row.assign(n, 0);
  for (std::size_t j = 1; j <= n; ++j) s.col_of_row[p[j] - 1] = j - 1;
  s.u.assign(u.begin() + 1, u.end());
  s.v.assign(v.begin() + 1, v.end());
  return s;
}

// Optimal assignments are exactly the perfect matchings on zero-reduced-cost
// cells. Walk rows in order and move each to its smallest feasible column.
class LexRefiner {
 public:
  LexRefiner(std::vector<std::vector<char>> tight, std::vector<std::size_t> col_of_row)
      : n_(col_of_row.size()), tight_(std::move(tight)), col_of_row_(std::move(col_of_row)), row_of_col_(n_) {
    for (std::size_t r = 0; r < n_; ++r) row_of_col_[col_of_row_[r]] = r;
  }

  std::vector<std::size_t> run() {
    std::vector<char> fixed_col(n_, 0);
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t c = 0; c < n_; ++c) {
        if (!tight_[r][c] || fixed_col[c]) continue;
        if (c == col_of_row_[r] || try_move(r, c, fixed_col)) {
          fixed_col[col_of_row_[r]] = 1;
          break;
        }
      }
    }
    return col_of_row_;
  }

 private:
  // Reassign row r to column c; the displaced row must reach r's old column
  // through an alternating path that avoids fixed columns and c.
  bool try_move(std::size_t r, std::size_t c, const std::vector<char>& fixed_col) {
    const std::size_t displaced = row_of_col_[c];
    const std::size_t freed = col_of_row_[r];
    std::vector<char> seen(n_, 0);
    seen[c] = 1;
    path_.clear();
    if (!augment(displaced, freed, fixed_col, seen)) return false;
    // path_ holds (row, new column) steps for the displaced chain.
    for (const auto& [row, col] : path_) {
      col_of_row_[row] = col;
      row_of_col_[col] = row;
    }
    col_of_row_[r] = c;
    row_of_col_[c] = r;
    return true;
  }

  bool augment(std::size_t row, std::size_t target, const std::vector<char>& fixed_col, std::vector<char>& seen) {
    for (std::size_t c = 0; c < n_; ++c) {
      if (!tight_[row][c] || fixed_col[c] || seen[c]) continue;
      seen[c] = 1;
      if (c == target || augment(row_of_col_[c], target, fixed_col, seen)) {
        path_.emplace_back(row, c);
        return true;
      }
    }
    return false;
  }

  std::size_t n_;
  std::vector<std::vector<char>> tight_;
  std::vector<std::size_t> col_of_row_;
  std::vector<std::size_t> row_of_col_;
  std::vector<std::pair<std::size_t, std::size_t>> path_;
};

}  // namespace

Assignment hungarian_match(const CostMatrix& cost) {
  const std::size_t rows = cost.rows();
  const std::size_t cols = cost.cols();
  Assignment result;
  if (rows == 0 || cols == 0) return result;

  const std::size_t n = std::max(rows, cols);
  std::vector<double> a(n * n, kPaddingCost);
  double scale = kPaddingCost;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const double x = cost(r, c);
      if (!std::isfinite(x)) {
        throw std::invalid_argument("hungarian_match: non-finite cost at (" + std::to_string(r) + "," +
                                    std::to_string(c) + ")");
      }
      a[r * n + c] = x;
      scale = std::max(scale, std::abs(x));
    }
  }

  const Solution sol = solve_square(a, n);
  const double tol = 1e-9 * scale;
  std::vector<std::vector<char>> tight(n, std::vector<char>(n, 0));
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) tight[r][c] = (a[r * n + c] - sol.u[r] - sol.v[c]) <= tol;
    tight[r][sol.col_of_row[r]] = 1;
  }
  const auto col_of_row = LexRefiner(std::move(tight), sol.col_of_row).run();

  for (std::size_t r = 0; r < rows; ++r) {
    const std::size_t c = col_of_row[r];
    if (c < cols) {
      result.pairs.emplace_back(r, c);
      result.cost += cost(r, c);
    }
  }
  return result;
}

}  // namespace hoikit
