#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace hoikit {

/// Dense row-major cost matrix.
class CostMatrix {
 public:
  CostMatrix() = default;
  CostMatrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  CostMatrix(std::initializer_list<std::initializer_list<double>> rows);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct Assignment {
  /// (row, col) pairs sorted by row.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double cost = 0.0;
};

/// Cost of padded cells when a rectangular matrix is squared up.
inline constexpr double kPaddingCost = 1.0;

/// Minimum-cost one-to-one assignment of min(rows, cols) pairs.
///
/// Rectangular inputs are padded to square with kPaddingCost and padded pairs
/// are dropped from the result. Among all optimal assignments of the padded
/// problem, the one whose row->column sequence is lexicographically smallest
/// is returned. Throws std::invalid_argument on non-finite entries.
Assignment hungarian_match(const CostMatrix& cost);

}  // namespace hoikit
