#pragma once

#include <stdexcept>
#include <vector>

namespace psatz {

/// Minimal dense matrix used for exact (rational) linear algebra. Float-mode
/// work goes through Eigen instead.
template <class T>
class DenseMat {
 public:
  DenseMat() = default;
  DenseMat(std::size_t rows, std::size_t cols, T init = T(0))
      : rows_(rows), cols_(cols), a_(rows * cols, init) {}

  static DenseMat identity(std::size_t n) {
    DenseMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_symmetric() const {
    if (rows_ != cols_) return false;
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = i + 1; j < cols_; ++j)
        if (!((*this)(i, j) == (*this)(j, i))) return false;
    return true;
  }

  friend bool operator==(const DenseMat& a, const DenseMat& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<T> a_;
};

}  // namespace psatz
