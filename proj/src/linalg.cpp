#include "relu/linalg.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace relu {

Mat::Mat(std::initializer_list<std::initializer_list<long>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  entries_.reserve(rows_ * cols_);
  for (const auto& row : rows) {
    if (row.size() != cols_) throw std::invalid_argument("ragged matrix literal");
    for (long v : row) entries_.emplace_back(v);
  }
}

Mat Mat::identity(std::size_t n) { return scalar(n, Rat(1)); }

Mat Mat::scalar(std::size_t n, const Rat& value) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = value;
  return m;
}

Mat Mat::ones(std::size_t rows, std::size_t cols) {
  Mat m(rows, cols);
  for (auto& e : m.entries_) e = 1;
  return m;
}

std::vector<Rat> Mat::column(std::size_t j) const {
  std::vector<Rat> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
  return out;
}

Mat Mat::columns(const std::vector<std::size_t>& subset) const {
  Mat out(rows_, subset.size());
  for (std::size_t j = 0; j < subset.size(); ++j) {
    for (std::size_t i = 0; i < rows_; ++i) out(i, j) = (*this)(i, subset[j]);
  }
  return out;
}

bool Mat::is_zero() const {
  return std::all_of(entries_.begin(), entries_.end(),
                     [](const Rat& r) { return r == 0; });
}

namespace {

void require_same_shape(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("matrix shape mismatch");
  }
}

}  // namespace

Mat operator+(const Mat& a, const Mat& b) {
  require_same_shape(a, b);
  Mat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) + b(i, j);
  return out;
}

Mat operator-(const Mat& a, const Mat& b) {
  require_same_shape(a, b);
  Mat out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j) - b(i, j);
  return out;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product shape mismatch");
  Mat out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const Rat& aik = a(i, k);
      if (aik == 0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) out(i, j) += aik * b(k, j);
    }
  }
  return out;
}

Mat operator*(const Rat& scale, const Mat& m) {
  Mat out(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(i, j) = scale * m(i, j);
  return out;
}

Mat transpose(const Mat& m) {
  Mat out(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out(j, i) = m(i, j);
  return out;
}

Mat hconcat(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows()) throw std::invalid_argument("hconcat row mismatch");
  Mat out(a.rows(), a.cols() + b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
    for (std::size_t j = 0; j < b.cols(); ++j) out(i, a.cols() + j) = b(i, j);
  }
  return out;
}

Mat vconcat(const Mat& a, const Mat& b) {
  if (a.cols() != b.cols()) throw std::invalid_argument("vconcat column mismatch");
  Mat out(a.rows() + b.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  for (std::size_t i = 0; i < b.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(a.rows() + i, j) = b(i, j);
  return out;
}

std::vector<Rat> operator*(const Mat& m, const std::vector<Rat>& v) {
  if (m.cols() != v.size()) throw std::invalid_argument("matrix-vector shape mismatch");
  std::vector<Rat> out(m.rows(), Rat(0));
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) out[i] += m(i, j) * v[j];
  return out;
}

namespace {

// Denominator-cleared copy; row scaling preserves rank and kernel-freeness of
// the elimination below.
std::vector<Int> integer_rows(const Mat& m) {
  std::vector<Int> a(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Int scale = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      mpz_lcm(scale.get_mpz_t(), scale.get_mpz_t(),
              m(i, j).get_den().get_mpz_t());
    }
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rat& r = m(i, j);
      a[i * m.cols() + j] = r.get_num() * (scale / r.get_den());
    }
  }
  return a;
}

struct BareissResult {
  std::size_t rank = 0;
  Int last_pivot = 1;  // plus-minus the determinant of the pivot submatrix
  int sign = 1;
};

BareissResult bareiss(std::vector<Int>& a, std::size_t rows, std::size_t cols) {
  BareissResult res;
  Int prev = 1;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && a[pivot * cols + col] == 0) ++pivot;
    if (pivot == rows) continue;
    if (pivot != row) {
      for (std::size_t j = col; j < cols; ++j)
        std::swap(a[pivot * cols + j], a[row * cols + j]);
      res.sign = -res.sign;
    }
    for (std::size_t r = row + 1; r < rows; ++r) {
      for (std::size_t c = col + 1; c < cols; ++c) {
        Int value = a[row * cols + col] * a[r * cols + c] -
                    a[r * cols + col] * a[row * cols + c];
        mpz_divexact(a[r * cols + c].get_mpz_t(), value.get_mpz_t(),
                     prev.get_mpz_t());
      }
      a[r * cols + col] = 0;
    }
    prev = a[row * cols + col];
    ++row;
  }
  res.rank = row;
  res.last_pivot = prev;
  return res;
}

}  // namespace

std::size_t rank_exact(const Mat& m) {
  if (m.empty()) return 0;
  auto a = integer_rows(m);
  return bareiss(a, m.rows(), m.cols()).rank;
}

Rat det_exact(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("determinant of non-square matrix");
  if (m.empty()) return Rat(1);
  // Row scalings multiply the determinant; divide them back out at the end.
  Rat scale = 1;
  std::vector<Int> a(m.rows() * m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Int lcm = 1;
    for (std::size_t j = 0; j < m.cols(); ++j) {
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), m(i, j).get_den().get_mpz_t());
    }
    scale *= Rat(lcm);
    for (std::size_t j = 0; j < m.cols(); ++j) {
      const Rat& r = m(i, j);
      a[i * m.cols() + j] = r.get_num() * (lcm / r.get_den());
    }
  }
  BareissResult res = bareiss(a, m.rows(), m.cols());
  if (res.rank < m.rows()) return Rat(0);
  Rat det = Rat(res.last_pivot) * res.sign;
  return det / scale;
}

std::vector<std::vector<Rat>> kernel_basis(const Mat& m) {
  const std::size_t rows = m.rows(), cols = m.cols();
  // Reduced row echelon form over the rationals.
  Mat r = m;
  std::vector<std::size_t> pivot_cols;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < rows; ++col) {
    std::size_t pivot = row;
    while (pivot < rows && r(pivot, col) == 0) ++pivot;
    if (pivot == rows) continue;
    for (std::size_t j = 0; j < cols; ++j) std::swap(r(pivot, j), r(row, j));
    const Rat inv = 1 / r(row, col);
    for (std::size_t j = col; j < cols; ++j) r(row, j) *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == row || r(i, col) == 0) continue;
      const Rat factor = r(i, col);
      for (std::size_t j = col; j < cols; ++j) r(i, j) -= factor * r(row, j);
    }
    pivot_cols.push_back(col);
    ++row;
  }

  std::vector<bool> is_pivot(cols, false);
  for (std::size_t c : pivot_cols) is_pivot[c] = true;

  std::vector<std::vector<Rat>> basis;
  for (std::size_t free_col = 0; free_col < cols; ++free_col) {
    if (is_pivot[free_col]) continue;
    std::vector<Rat> v(cols, Rat(0));
    v[free_col] = 1;
    for (std::size_t i = 0; i < pivot_cols.size(); ++i) {
      v[pivot_cols[i]] = -r(i, free_col);
    }
    // Primitive integer form with positive leading entry.
    Int lcm = 1;
    for (const Rat& x : v)
      mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), x.get_den().get_mpz_t());
    Int gcd = 0;
    for (Rat& x : v) {
      x *= Rat(lcm);
      mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), x.get_num().get_mpz_t());
    }
    if (gcd > 1) {
      for (Rat& x : v) x /= Rat(gcd);
    }
    for (const Rat& x : v) {
      if (x == 0) continue;
      if (x < 0)
        for (Rat& y : v) y = -y;
      break;
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

Mat invert(const Mat& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  const std::size_t n = m.rows();
  Mat work = hconcat(m, Mat::identity(n));
  std::size_t row = 0;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = row;
    while (pivot < n && work(pivot, col) == 0) ++pivot;
    if (pivot == n) throw std::domain_error("matrix is singular");
    for (std::size_t j = 0; j < 2 * n; ++j) std::swap(work(pivot, j), work(row, j));
    const Rat inv = 1 / work(row, col);
    for (std::size_t j = col; j < 2 * n; ++j) work(row, j) *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == row || work(i, col) == 0) continue;
      const Rat factor = work(i, col);
      for (std::size_t j = col; j < 2 * n; ++j) work(i, j) -= factor * work(row, j);
    }
    ++row;
  }
  Mat out(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) out(i, j) = work(i, n + j);
  return out;
}

Int binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  Int out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

MinorEnumeration enumerate_minors(std::size_t rows, std::size_t cols,
                                  std::size_t size, std::size_t cap) {
  if (size == 0) throw std::invalid_argument("minor size must be positive");
  MinorEnumeration out;
  out.total = binomial(rows, size) * binomial(cols, size);
  if (out.total == 0) return out;

  auto first_subset = [size] {
    std::vector<std::size_t> s(size);
    for (std::size_t i = 0; i < size; ++i) s[i] = i;
    return s;
  };
  auto next_subset = [size](std::vector<std::size_t>& s, std::size_t limit) {
    std::size_t i = size;
    while (i-- > 0) {
      if (s[i] + (size - i) <= limit) {
        ++s[i];
        for (std::size_t j = i + 1; j < size; ++j) s[j] = s[j - 1] + 1;
        return true;
      }
    }
    return false;
  };

  std::vector<std::size_t> row_subset = first_subset();
  do {
    std::vector<std::size_t> col_subset = first_subset();
    do {
      if (out.minors.size() >= cap) {
        out.truncated = true;
        return out;
      }
      out.minors.push_back(MinorIndex{row_subset, col_subset});
    } while (next_subset(col_subset, cols - 1));
  } while (next_subset(row_subset, rows - 1));
  return out;
}

namespace {

Rat det_cofactor(const Mat& m, std::vector<std::size_t> rows,
                 const std::vector<std::size_t>& cols) {
  const std::size_t n = rows.size();
  if (n == 1) return m(rows[0], cols[0]);
  if (n == 2) {
    return m(rows[0], cols[0]) * m(rows[1], cols[1]) -
           m(rows[0], cols[1]) * m(rows[1], cols[0]);
  }
  Rat acc = 0;
  std::vector<std::size_t> sub(rows.begin() + 1, rows.end());
  for (std::size_t j = 0; j < n; ++j) {
    if (m(rows[0], cols[j]) == 0) continue;
    std::vector<std::size_t> sub_cols;
    sub_cols.reserve(n - 1);
    for (std::size_t c = 0; c < n; ++c)
      if (c != j) sub_cols.push_back(cols[c]);
    Rat term = m(rows[0], cols[j]) * det_cofactor(m, sub, sub_cols);
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc;
}

}  // namespace

Rat minor_value(const Mat& m, const MinorIndex& index) {
  if (index.row_subset.size() != index.col_subset.size()) {
    throw std::invalid_argument("minor index is not square");
  }
  const std::size_t n = index.row_subset.size();
  if (n == 0) return Rat(1);
  for (std::size_t r : index.row_subset)
    if (r >= m.rows()) throw std::invalid_argument("minor row out of bounds");
  for (std::size_t c : index.col_subset)
    if (c >= m.cols()) throw std::invalid_argument("minor column out of bounds");
  if (n <= 4) return det_cofactor(m, index.row_subset, index.col_subset);
  Mat sub(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      sub(i, j) = m(index.row_subset[i], index.col_subset[j]);
  return det_exact(sub);
}

}  // namespace relu
