#pragma once

// Small dense matrices over an exact field (Rat or CRat) with the linear
// algebra the rest of the library leans on: RREF, nullspace, solve, rank.
// Everything is deterministic; echelon forms double as canonical forms.

#include "flagquiver/rational.hpp"

#include <cassert>
#include <cstddef>
#include <optional>
#include <vector>

namespace flagquiver {

template <typename F>
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t r, std::size_t c) : rows_(r), cols_(c), a_(r * c, F(0)) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = F(1);
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  F& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  const F& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

  bool is_zero() const {
    for (const auto& x : a_) if (!(x == F(0))) return false;
    return true;
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix operator-() const {
    Matrix m = *this;
    for (auto& x : m.a_) x = -x;
    return m;
  }

  Matrix& operator+=(const Matrix& o) {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += o.a_[k];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    assert(rows_ == o.rows_ && cols_ == o.cols_);
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= o.a_[k];
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    assert(a.cols_ == b.rows_);
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const F& aik = a(i, k);
        if (aik == F(0)) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) {
          const F& bkj = b(k, j);
          if (!(bkj == F(0))) c(i, j) += aik * bkj;
        }
      }
    return c;
  }

  Matrix& operator*=(const F& s) {
    for (auto& x : a_) x = x * s;
    return *this;
  }
  friend Matrix operator*(const F& s, Matrix m) { return m *= s; }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.a_ == b.a_;
  }
  friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }
  friend bool operator<(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_) return a.rows_ < b.rows_;
    if (a.cols_ != b.cols_) return a.cols_ < b.cols_;
    return a.a_ < b.a_;
  }

  F trace() const {
    assert(rows_ == cols_);
    F t(0);
    for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
    return t;
  }

  std::vector<F> col(std::size_t j) const {
    std::vector<F> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }

  /// Row-major flattening, used when treating a matrix equation as a vector
  /// equation.
  std::vector<F> vec() const { return a_; }

  static Matrix from_vec(std::size_t r, std::size_t c, const std::vector<F>& v) {
    assert(v.size() == r * c);
    Matrix m(r, c);
    m.a_ = v;
    return m;
  }

  /// In-place reduced row echelon form. Returns pivot column indices.
  std::vector<std::size_t> rref() {
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols_ && r < rows_; ++c) {
      std::size_t p = r;
      while (p < rows_ && (*this)(p, c) == F(0)) ++p;
      if (p == rows_) continue;
      if (p != r)
        for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(p, j), (*this)(r, j));
      F inv = F(1) / (*this)(r, c);
      for (std::size_t j = c; j < cols_; ++j) (*this)(r, j) = (*this)(r, j) * inv;
      for (std::size_t i = 0; i < rows_; ++i) {
        if (i == r) continue;
        F f = (*this)(i, c);
        if (f == F(0)) continue;
        for (std::size_t j = c; j < cols_; ++j) (*this)(i, j) -= f * (*this)(r, j);
      }
      pivots.push_back(c);
      ++r;
    }
    return pivots;
  }

  std::size_t rank() const {
    Matrix m = *this;
    return m.rref().size();
  }

  /// Basis of the right nullspace, one column per free variable, in the
  /// canonical RREF parametrization (free variable set to 1, ordered by
  /// increasing column index).
  Matrix nullspace() const {
    Matrix m = *this;
    auto piv = m.rref();
    std::vector<bool> is_pivot(cols_, false);
    for (auto c : piv) is_pivot[c] = true;
    std::vector<std::size_t> free_cols;
    for (std::size_t c = 0; c < cols_; ++c)
      if (!is_pivot[c]) free_cols.push_back(c);
    Matrix ns(cols_, free_cols.size());
    for (std::size_t k = 0; k < free_cols.size(); ++k) {
      std::size_t fc = free_cols[k];
      ns(fc, k) = F(1);
      for (std::size_t i = 0; i < piv.size(); ++i) ns(piv[i], k) = -m(i, fc);
    }
    return ns;
  }

  /// Solve A x = b exactly. Empty optional when inconsistent. Free variables
  /// are set to zero (deterministic particular solution).
  std::optional<std::vector<F>> solve(const std::vector<F>& b) const {
    assert(b.size() == rows_);
    Matrix aug(rows_, cols_ + 1);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_) = b[i];
    }
    auto piv = aug.rref();
    if (!piv.empty() && piv.back() == cols_) return std::nullopt;
    std::vector<F> x(cols_, F(0));
    for (std::size_t i = 0; i < piv.size(); ++i) x[piv[i]] = aug(i, cols_);
    return x;
  }

  /// Inverse of a square matrix; throws if singular.
  Matrix inverse() const {
    assert(rows_ == cols_);
    Matrix aug(rows_, 2 * cols_);
    for (std::size_t i = 0; i < rows_; ++i) {
      for (std::size_t j = 0; j < cols_; ++j) aug(i, j) = (*this)(i, j);
      aug(i, cols_ + i) = F(1);
    }
    auto piv = aug.rref();
    if (piv.size() != rows_) throw std::domain_error("singular matrix");
    Matrix inv(rows_, cols_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) inv(i, j) = aug(i, cols_ + j);
    return inv;
  }

  friend Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix k(a.rows_ * b.rows_, a.cols_ * b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t j = 0; j < a.cols_; ++j) {
        if (a(i, j) == F(0)) continue;
        for (std::size_t p = 0; p < b.rows_; ++p)
          for (std::size_t q = 0; q < b.cols_; ++q)
            k(i * b.rows_ + p, j * b.cols_ + q) = a(i, j) * b(p, q);
      }
    return k;
  }

 private:
  std::size_t rows_, cols_;
  std::vector<F> a_;
};

using QMat = Matrix<Rat>;
using CMat = Matrix<CRat>;

inline CMat conj_transpose(const CMat& m) {
  CMat t(m.cols(), m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j).conj();
  return t;
}

template <typename F>
Matrix<F> matmul_commutator(const Matrix<F>& a, const Matrix<F>& b) {
  return a * b - b * a;
}

/// Column span as a canonical matrix: columns are the (transposed back)
/// nonzero rows of the RREF of the transpose. Two matrices have equal span
/// iff their canonical forms are equal.
template <typename F>
Matrix<F> column_span_canonical(const Matrix<F>& m) {
  Matrix<F> t = m.transpose();
  auto piv = t.rref();
  Matrix<F> out(m.rows(), piv.size());
  for (std::size_t k = 0; k < piv.size(); ++k)
    for (std::size_t i = 0; i < m.rows(); ++i) out(i, k) = t(k, i);
  return out;
}

}  // namespace flagquiver
