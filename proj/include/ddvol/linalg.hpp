#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "ddvol/field.hpp"

namespace ddvol {

struct LinConfig {
  double eps_lin = 1e-8;
};

template <class T>
struct Mat {
  int r = 0, c = 0;
  std::vector<T> v;

  Mat() = default;
  Mat(int rows, int cols) : r(rows), c(cols), v(static_cast<size_t>(rows) * cols, T(0)) {}

  T& operator()(int i, int j) { return v[static_cast<size_t>(i) * c + j]; }
  const T& operator()(int i, int j) const { return v[static_cast<size_t>(i) * c + j]; }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  Mat col(int j) const {
    Mat m(r, 1);
    for (int i = 0; i < r; ++i) m(i, 0) = (*this)(i, j);
    return m;
  }
  Mat cols(const std::vector<int>& idx) const {
    Mat m(r, static_cast<int>(idx.size()));
    for (int i = 0; i < r; ++i)
      for (size_t j = 0; j < idx.size(); ++j) m(i, static_cast<int>(j)) = (*this)(i, idx[j]);
    return m;
  }
  Mat rows(const std::vector<int>& idx) const {
    Mat m(static_cast<int>(idx.size()), c);
    for (size_t i = 0; i < idx.size(); ++i)
      for (int j = 0; j < c; ++j) m(static_cast<int>(i), j) = (*this)(idx[i], j);
    return m;
  }
  Mat transpose() const {
    Mat m(c, r);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(j, i) = (*this)(i, j);
    return m;
  }
};

inline Cyc conj_of(const Cyc& x) { return x.conj(); }
inline cd conj_of(cd x) { return std::conj(x); }
inline bool exact_zero(const Cyc& x) { return x.is_zero(); }
inline bool exact_zero(cd x) { return x == cd(0.0); }
inline cd to_complex(const Cyc& x) { return x.to_cd(); }
inline cd to_complex(cd x) { return x; }

template <class T>
Mat<T> conj(const Mat<T>& a) {
  Mat<T> m = a;
  for (auto& x : m.v) x = conj_of(x);
  return m;
}

template <class T>
Mat<T> operator*(const Mat<T>& a, const Mat<T>& b) {
  if (a.c != b.r) throw std::logic_error("Mat: dimension mismatch in product");
  Mat<T> m(a.r, b.c);
  for (int i = 0; i < a.r; ++i)
    for (int k = 0; k < a.c; ++k) {
      const T& x = a(i, k);
      if (exact_zero(x)) continue;
      for (int j = 0; j < b.c; ++j)
        if (!exact_zero(b(k, j))) m(i, j) += x * b(k, j);
    }
  return m;
}

template <class T>
Mat<T> operator+(const Mat<T>& a, const Mat<T>& b) {
  Mat<T> m = a;
  for (size_t i = 0; i < m.v.size(); ++i) m.v[i] += b.v[i];
  return m;
}

template <class T>
Mat<T> hstack(const Mat<T>& a, const Mat<T>& b) {
  if (a.r != b.r && a.c && b.c) throw std::logic_error("Mat: hstack row mismatch");
  int rows = a.c ? a.r : b.r;
  Mat<T> m(rows, a.c + b.c);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < a.c; ++j) m(i, j) = a(i, j);
    for (int j = 0; j < b.c; ++j) m(i, a.c + j) = b(i, j);
  }
  return m;
}

template <class T>
Mat<T> vstack(const Mat<T>& a, const Mat<T>& b) {
  if (a.c != b.c && a.r && b.r) throw std::logic_error("Mat: vstack column mismatch");
  int cols = a.r ? a.c : b.c;
  Mat<T> m(a.r + b.r, cols);
  for (int i = 0; i < a.r; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = a(i, j);
  for (int i = 0; i < b.r; ++i)
    for (int j = 0; j < cols; ++j) m(a.r + i, j) = b(i, j);
  return m;
}

template <class T>
Mat<cd> to_complex(const Mat<T>& a) {
  Mat<cd> m(a.r, a.c);
  for (size_t i = 0; i < a.v.size(); ++i) m.v[i] = to_complex(a.v[i]);
  return m;
}

// ---- exact elimination over Q(zeta) ----

struct Rref {
  Mat<Cyc> R;
  std::vector<int> pivots;
};

inline Rref rref(Mat<Cyc> m) {
  std::vector<int> piv;
  int row = 0;
  std::vector<int> nz;
  for (int col = 0; col < m.c && row < m.r; ++col) {
    int p = -1;
    for (int i = row; i < m.r; ++i)
      if (!m(i, col).is_zero()) {
        p = i;
        break;
      }
    if (p < 0) continue;
    if (p != row)
      for (int j = 0; j < m.c; ++j) std::swap(m(p, j), m(row, j));
    Cyc inv = m(row, col).inverse();
    nz.clear();
    for (int j = col; j < m.c; ++j)
      if (!m(row, j).is_zero()) {
        if (j != col) m(row, j) *= inv;
        nz.push_back(j);
      }
    m(row, col) = Cyc(1);
    for (int i = 0; i < m.r; ++i) {
      if (i == row || m(i, col).is_zero()) continue;
      Cyc f = m(i, col);
      for (int j : nz) m(i, j) -= f * m(row, j);
    }
    piv.push_back(col);
    ++row;
  }
  return {std::move(m), std::move(piv)};
}

inline int rank(const Mat<Cyc>& m, const LinConfig& = {}) { return static_cast<int>(rref(m).pivots.size()); }

// Columns form a basis of {x : m x = 0}.
inline Mat<Cyc> kernel(const Mat<Cyc>& m, const LinConfig& = {}) {
  Rref rr = rref(m);
  std::vector<bool> is_piv(m.c, false);
  for (int p : rr.pivots) is_piv[p] = true;
  std::vector<int> free_cols;
  for (int j = 0; j < m.c; ++j)
    if (!is_piv[j]) free_cols.push_back(j);
  Mat<Cyc> k(m.c, static_cast<int>(free_cols.size()));
  for (size_t t = 0; t < free_cols.size(); ++t) {
    int f = free_cols[t];
    k(f, static_cast<int>(t)) = Cyc(1);
    for (size_t i = 0; i < rr.pivots.size(); ++i) {
      const Cyc& x = rr.R(static_cast<int>(i), f);
      if (!x.is_zero()) k(rr.pivots[i], static_cast<int>(t)) = -x;
    }
  }
  return k;
}

inline Cyc det(Mat<Cyc> m) {
  if (m.r != m.c) throw std::logic_error("det: non-square");
  Cyc d(1);
  int n = m.r;
  for (int col = 0; col < n; ++col) {
    int p = -1;
    for (int i = col; i < n; ++i)
      if (!m(i, col).is_zero()) {
        p = i;
        break;
      }
    if (p < 0) return Cyc(0);
    if (p != col) {
      for (int j = 0; j < n; ++j) std::swap(m(p, j), m(col, j));
      d = -d;
    }
    d *= m(col, col);
    Cyc inv = m(col, col).inverse();
    for (int i = col + 1; i < n; ++i) {
      if (m(i, col).is_zero()) continue;
      Cyc f = m(i, col) * inv;
      for (int j = col + 1; j < n; ++j)
        if (!m(col, j).is_zero()) m(i, j) -= f * m(col, j);
    }
  }
  return d;
}

// Solves a x = b for square invertible a; throws std::domain_error if singular.
inline Mat<Cyc> solve(const Mat<Cyc>& a, const Mat<Cyc>& b, const LinConfig& = {}) {
  if (a.r != a.c || a.r != b.r) throw std::logic_error("solve: shape");
  Rref rr = rref(hstack(a, b));
  if (static_cast<int>(rr.pivots.size()) < a.r || (a.r > 0 && rr.pivots[a.r - 1] >= a.c))
    throw std::domain_error("solve: singular matrix");
  Mat<Cyc> x(a.c, b.c);
  for (int i = 0; i < a.r; ++i)
    for (int j = 0; j < b.c; ++j) x(i, j) = rr.R(i, a.c + j);
  return x;
}

inline Mat<Cyc> inverse(const Mat<Cyc>& a, const LinConfig& cfg = {}) {
  return solve(a, Mat<Cyc>::identity(a.r), cfg);
}

// Greedy maximal independent subset of rows, in order.
inline std::vector<int> independent_rows(const Mat<Cyc>& m, const LinConfig& = {}) {
  Rref rr = rref(m.transpose());
  return rr.pivots;
}

// ---- floating point via Eigen ----

inline Eigen::MatrixXcd to_eigen(const Mat<cd>& m) {
  Eigen::MatrixXcd e(m.r, m.c);
  for (int i = 0; i < m.r; ++i)
    for (int j = 0; j < m.c; ++j) e(i, j) = m(i, j);
  return e;
}

inline Mat<cd> from_eigen(const Eigen::MatrixXcd& e) {
  Mat<cd> m(static_cast<int>(e.rows()), static_cast<int>(e.cols()));
  for (int i = 0; i < m.r; ++i)
    for (int j = 0; j < m.c; ++j) m(i, j) = e(i, j);
  return m;
}

inline int rank(const Mat<cd>& m, const LinConfig& cfg = {}) {
  if (m.r == 0 || m.c == 0) return 0;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(to_eigen(m));
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int k = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cfg.eps_lin * s(0)) ++k;
  return k;
}

// Orthonormal basis of the numerical kernel (singular values below eps_lin relative to the largest).
inline Mat<cd> kernel(const Mat<cd>& m, const LinConfig& cfg = {}) {
  if (m.c == 0) return Mat<cd>(0, 0);
  if (m.r == 0) return Mat<cd>::identity(m.c);
  Eigen::MatrixXcd a = to_eigen(m);
  if (a.rows() < a.cols()) {
    Eigen::MatrixXcd pad = Eigen::MatrixXcd::Zero(a.cols(), a.cols());
    pad.topRows(a.rows()) = a;
    a = pad;
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  double top = s.size() ? s(0) : 0.0;
  int rk = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (top > 0 && s(i) > cfg.eps_lin * top) ++rk;
  Eigen::MatrixXcd v = svd.matrixV().rightCols(m.c - rk);
  return from_eigen(v);
}

inline cd det(const Mat<cd>& m) {
  if (m.r != m.c) throw std::logic_error("det: non-square");
  if (m.r == 0) return 1.0;
  return to_eigen(m).partialPivLu().determinant();
}

inline Mat<cd> solve(const Mat<cd>& a, const Mat<cd>& b, const LinConfig& cfg = {}) {
  if (a.r != a.c || a.r != b.r) throw std::logic_error("solve: shape");
  if (rank(a, cfg) < a.r) throw std::domain_error("solve: singular matrix");
  return from_eigen(to_eigen(a).fullPivLu().solve(to_eigen(b)));
}

inline Mat<cd> inverse(const Mat<cd>& a, const LinConfig& cfg = {}) {
  return solve(a, Mat<cd>::identity(a.r), cfg);
}

inline std::vector<int> independent_rows(const Mat<cd>& m, const LinConfig& cfg = {}) {
  std::vector<Eigen::VectorXcd> basis;
  std::vector<int> out;
  double scale = 0.0;
  for (int i = 0; i < m.r; ++i) {
    double n = 0.0;
    for (int j = 0; j < m.c; ++j) n += std::norm(m(i, j));
    scale = std::max(scale, std::sqrt(n));
  }
  if (scale == 0.0) return out;
  for (int i = 0; i < m.r; ++i) {
    Eigen::VectorXcd x(m.c);
    for (int j = 0; j < m.c; ++j) x(j) = m(i, j);
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) x -= b * b.dot(x);
    double n = x.norm();
    if (n > 1e3 * cfg.eps_lin * scale) {
      basis.push_back(x / n);
      out.push_back(i);
    }
  }
  return out;
}

}  // namespace ddvol
