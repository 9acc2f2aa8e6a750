#pragma once

// Dense matrices over Q_p at tracked precision, with Gaussian elimination that
// pivots on the entry of least valuation.

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "mwzeta/error.hpp"
#include "mwzeta/padic.hpp"

namespace mwzeta {

class PadicMatrix {
 public:
  PadicMatrix() = default;
  PadicMatrix(PadicContext ctx, int rows, int cols)
      : ctx_(ctx), rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols), ctx.zero()) {}

  static PadicMatrix identity(PadicContext ctx, int n) {
    PadicMatrix m(ctx, n, n);
    for (int i = 0; i < n; ++i) m(i, i) = ctx.one();
    return m;
  }

  static PadicMatrix from_integers(PadicContext ctx, const std::vector<std::vector<long>>& rows) {
    const int r = static_cast<int>(rows.size());
    const int c = r ? static_cast<int>(rows[0].size()) : 0;
    PadicMatrix m(ctx, r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = ctx.integer(rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    return m;
  }

  const PadicContext& context() const noexcept { return ctx_; }
  int rows() const noexcept { return rows_; }
  int cols() const noexcept { return cols_; }
  bool square() const noexcept { return rows_ == cols_; }

  PadicScalar& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
  const PadicScalar& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

  /// Lowest absolute precision of any entry (context precision when empty).
  int precision() const {
    int m = ctx_.precision;
    for (const auto& x : a_) m = std::min(m, x.absolute_precision());
    return m;
  }

  int min_valuation() const {
    int m = precision();
    for (const auto& x : a_)
      if (!x.is_zero()) m = std::min(m, x.valuation().value);
    return m;
  }

  PadicMatrix with_precision(int absprec) const {
    PadicMatrix r = *this;
    for (auto& x : r.a_) x = x.with_precision(absprec);
    return r;
  }

  bool is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](const PadicScalar& x) { return x.is_zero(); });
  }

  PadicMatrix column(int j) const {
    PadicMatrix c(ctx_, rows_, 1);
    for (int i = 0; i < rows_; ++i) c(i, 0) = (*this)(i, j);
    return c;
  }

  PadicMatrix transpose() const {
    PadicMatrix t(ctx_, cols_, rows_);
    for (int i = 0; i < rows_; ++i)
      for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  /// Columns side by side.
  static PadicMatrix hconcat(const PadicMatrix& a, const PadicMatrix& b) {
    if (a.cols_ == 0) return b;
    if (b.cols_ == 0) return a;
    if (a.rows_ != b.rows_) detail::fail("linalg", "ShapeMismatch", "hconcat of different heights");
    PadicMatrix r(a.ctx_, a.rows_, a.cols_ + b.cols_);
    for (int i = 0; i < a.rows_; ++i) {
      for (int j = 0; j < a.cols_; ++j) r(i, j) = a(i, j);
      for (int j = 0; j < b.cols_; ++j) r(i, a.cols_ + j) = b(i, j);
    }
    return r;
  }

  /// Submatrix of rows [r0, r1) and columns [c0, c1).
  PadicMatrix block(int r0, int r1, int c0, int c1) const {
    PadicMatrix r(ctx_, r1 - r0, c1 - c0);
    for (int i = r0; i < r1; ++i)
      for (int j = c0; j < c1; ++j) r(i - r0, j - c0) = (*this)(i, j);
    return r;
  }

  friend PadicMatrix operator+(const PadicMatrix& a, const PadicMatrix& b) {
    check_shape(a, b);
    PadicMatrix r = a;
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] += b.a_[k];
    return r;
  }

  friend PadicMatrix operator-(const PadicMatrix& a, const PadicMatrix& b) {
    check_shape(a, b);
    PadicMatrix r = a;
    for (std::size_t k = 0; k < r.a_.size(); ++k) r.a_[k] -= b.a_[k];
    return r;
  }

  friend PadicMatrix operator*(const PadicMatrix& a, const PadicMatrix& b) {
    if (a.cols_ != b.rows_) detail::fail("linalg", "ShapeMismatch", "inner dimensions differ");
    PadicMatrix r(a.ctx_, a.rows_, b.cols_);
    for (int i = 0; i < a.rows_; ++i)
      for (int j = 0; j < b.cols_; ++j) {
        if (a.cols_ == 0) continue;
        PadicScalar s = a(i, 0) * b(0, j);
        for (int k = 1; k < a.cols_; ++k) s += a(i, k) * b(k, j);
        r(i, j) = s;
      }
    return r;
  }

  friend PadicMatrix operator*(const PadicScalar& s, const PadicMatrix& a) {
    PadicMatrix r = a;
    for (auto& x : r.a_) x = s * x;
    return r;
  }

  PadicScalar trace() const {
    PadicScalar t = ctx_.zero();
    for (int i = 0; i < std::min(rows_, cols_); ++i) t += (*this)(i, i);
    return t;
  }

  PadicMatrix pow(int s) const {
    PadicMatrix r = identity(ctx_, rows_);
    PadicMatrix b = *this;
    while (s > 0) {
      if (s & 1) r = r * b;
      s >>= 1;
      if (s) b = b * b;
    }
    return r;
  }

  friend bool operator==(const PadicMatrix& a, const PadicMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && (a - b).is_zero();
  }

  std::string to_string() const {
    std::string s = "[";
    for (int i = 0; i < rows_; ++i) {
      s += i ? "; " : "";
      for (int j = 0; j < cols_; ++j) s += (j ? ", " : "") + (*this)(i, j).to_string();
    }
    return s + "]";
  }

 private:
  static void check_shape(const PadicMatrix& a, const PadicMatrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) detail::fail("linalg", "ShapeMismatch", "matrix shapes differ");
  }

  PadicContext ctx_;
  int rows_ = 0;
  int cols_ = 0;
  std::vector<PadicScalar> a_;
};

struct Echelon {
  PadicMatrix reduced;     // reduced row echelon form
  std::vector<int> pivots; // pivot column of each nonzero row
};

/// Reduced row echelon form over the first `ncols` columns (all by default).
/// Entries that are zero at precision count as zero.
inline Echelon row_reduce(PadicMatrix m, int ncols = -1) {
  if (ncols < 0) ncols = m.cols();
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < ncols && row < m.rows(); ++col) {
    int best = -1;
    for (int i = row; i < m.rows(); ++i) {
      if (m(i, col).is_zero()) continue;
      if (best < 0 || m(i, col).valuation().value < m(best, col).valuation().value) best = i;
    }
    if (best < 0) continue;
    if (best != row)
      for (int j = 0; j < m.cols(); ++j) std::swap(m(best, j), m(row, j));
    const PadicScalar inv = m(row, col).inverse();
    for (int j = 0; j < m.cols(); ++j) m(row, j) = m(row, j) * inv;
    for (int i = 0; i < m.rows(); ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      const PadicScalar factor = m(i, col);
      for (int j = 0; j < m.cols(); ++j) m(i, j) -= factor * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(pivots)};
}

inline int rank(const PadicMatrix& m) { return static_cast<int>(row_reduce(m).pivots.size()); }

/// Basis of the null space as the columns of the result.
inline PadicMatrix kernel(const PadicMatrix& m) {
  const Echelon e = row_reduce(m);
  std::vector<int> free;
  for (int j = 0, k = 0; j < m.cols(); ++j) {
    if (k < static_cast<int>(e.pivots.size()) && e.pivots[static_cast<std::size_t>(k)] == j)
      ++k;
    else
      free.push_back(j);
  }
  PadicMatrix K(m.context(), m.cols(), static_cast<int>(free.size()));
  for (std::size_t f = 0; f < free.size(); ++f) {
    K(free[f], static_cast<int>(f)) = m.context().one();
    for (std::size_t r = 0; r < e.pivots.size(); ++r) K(e.pivots[r], static_cast<int>(f)) = -e.reduced(static_cast<int>(r), free[f]);
  }
  return K;
}

/// Some X with A X = B, or nothing when the system is inconsistent at precision.
inline std::optional<PadicMatrix> solve(const PadicMatrix& A, const PadicMatrix& B) {
  if (A.rows() != B.rows()) detail::fail("linalg", "ShapeMismatch", "right-hand side height differs");
  const Echelon e = row_reduce(PadicMatrix::hconcat(A, B), A.cols());
  const int r = static_cast<int>(e.pivots.size());
  for (int i = r; i < A.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j)
      if (!e.reduced(i, A.cols() + j).is_zero()) return std::nullopt;
  PadicMatrix X(A.context(), A.cols(), B.cols());
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < B.cols(); ++j) X(e.pivots[static_cast<std::size_t>(i)], j) = e.reduced(i, A.cols() + j);
  return X;
}

inline PadicMatrix inverse(const PadicMatrix& A) {
  if (!A.square()) detail::fail("linalg", "ShapeMismatch", "inverse of a non-square matrix");
  const Echelon e = row_reduce(PadicMatrix::hconcat(A, PadicMatrix::identity(A.context(), A.rows())), A.cols());
  if (static_cast<int>(e.pivots.size()) < A.rows())
    detail::fail("linalg", "Singular", "matrix is singular at precision");
  return e.reduced.block(0, A.rows(), A.cols(), 2 * A.cols());
}

/// Basis of the column space (a subset of the columns of m).
inline PadicMatrix column_space(const PadicMatrix& m) {
  const Echelon e = row_reduce(m);
  PadicMatrix r(m.context(), m.rows(), 0);
  for (int c : e.pivots) r = PadicMatrix::hconcat(r, m.column(c));
  if (r.cols() == 0) return PadicMatrix(m.context(), m.rows(), 0);
  return r;
}

/// Standard basis vectors completing the independent columns of B to a basis.
inline PadicMatrix complement(const PadicMatrix& B) {
  const Echelon e = row_reduce(B.transpose());
  std::vector<bool> used(static_cast<std::size_t>(B.rows()), false);
  for (int c : e.pivots) used[static_cast<std::size_t>(c)] = true;
  PadicMatrix C(B.context(), B.rows(), 0);
  for (int i = 0; i < B.rows(); ++i) {
    if (used[static_cast<std::size_t>(i)]) continue;
    PadicMatrix v(B.context(), B.rows(), 1);
    v(i, 0) = B.context().one();
    C = PadicMatrix::hconcat(C, v);
  }
  return C;
}

}  // namespace mwzeta
