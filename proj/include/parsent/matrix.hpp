#pragma once

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace parsent {

/// Dense row-major matrix.
template <typename Real = double>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, Real fill = Real(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  bool empty() const noexcept { return data_.empty(); }

  Real& operator()(std::size_t r, std::size_t c) {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }
  const Real& operator()(std::size_t r, std::size_t c) const {
    assert(r < rows_ && c < cols_);
    return data_[r * cols_ + c];
  }

  std::span<Real> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const Real> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  std::vector<Real>& data() noexcept { return data_; }
  const std::vector<Real>& data() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Real> data_;
};

/// Index of the largest entry; the lowest index wins exact ties.
template <typename Range>
std::size_t argmax(const Range& values) {
  std::size_t best = 0;
  std::size_t i = 0;
  for (const auto& v : values) {
    if (v > values[best]) best = i;
    ++i;
  }
  return best;
}

}  // namespace parsent
