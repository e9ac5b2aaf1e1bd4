#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <vector>

#include "relu/rational.hpp"

namespace relu {

// Dense rational matrix, row-major. Value type; all operations are pure.
class Mat {
 public:
  Mat() = default;
  Mat(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), entries_(rows * cols, Rat(0)) {}
  Mat(std::initializer_list<std::initializer_list<long>> rows);

  static Mat identity(std::size_t n);
  static Mat ones(std::size_t rows, std::size_t cols);
  static Mat scalar(std::size_t n, const Rat& value);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  Rat& operator()(std::size_t i, std::size_t j) { return entries_[i * cols_ + j]; }
  const Rat& operator()(std::size_t i, std::size_t j) const {
    return entries_[i * cols_ + j];
  }

  std::vector<Rat> column(std::size_t j) const;
  Mat columns(const std::vector<std::size_t>& subset) const;
  bool is_zero() const;

  friend bool operator==(const Mat& a, const Mat& b) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Rat> entries_;
};

Mat operator+(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);
Mat operator*(const Mat& a, const Mat& b);
Mat operator*(const Rat& scale, const Mat& m);
Mat transpose(const Mat& m);
Mat hconcat(const Mat& a, const Mat& b);
Mat vconcat(const Mat& a, const Mat& b);
std::vector<Rat> operator*(const Mat& m, const std::vector<Rat>& v);

// Exact rank over the rationals via fraction-free (Bareiss) elimination on the
// denominator-cleared integer matrix.
std::size_t rank_exact(const Mat& m);

// Exact determinant (square input), same elimination.
Rat det_exact(const Mat& m);

// Basis of the right null space, one vector per free column. Vectors are
// normalized to primitive integer form with positive leading entry, so the
// output is deterministic. Size equals cols - rank.
std::vector<std::vector<Rat>> kernel_basis(const Mat& m);

// Exact inverse. Throws std::domain_error on singular input.
Mat invert(const Mat& m);

// Row/column index pair selecting a square submatrix.
struct MinorIndex {
  std::vector<std::size_t> row_subset;
  std::vector<std::size_t> col_subset;

  friend bool operator==(const MinorIndex& a, const MinorIndex& b) = default;
};

struct MinorEnumeration {
  Int total;  // C(rows, size) * C(cols, size), exact even when truncated
  std::vector<MinorIndex> minors;
  bool truncated = false;
};

inline constexpr std::size_t kDefaultMinorCap = 10000;

// Enumerates size x size minor index pairs in lexicographic order, stopping at
// `cap` materialized entries. The total count is always exact.
MinorEnumeration enumerate_minors(std::size_t rows, std::size_t cols,
                                  std::size_t size,
                                  std::size_t cap = kDefaultMinorCap);

// Value of one minor: cofactor expansion up to 4x4, elimination above.
Rat minor_value(const Mat& m, const MinorIndex& index);

Int binomial(std::size_t n, std::size_t k);

}  // namespace relu
