#pragma once

// Minimal direct solvers for the oracle: dense LU with partial pivoting
// (real or complex) and a LAPACK-layout banded LU for the block-tridiagonal
// stationarity system.

#include <cmath>
#include <complex>
#include <vector>

#include "salq/errors.hpp"

namespace salq::detail {

template <class T>
struct DenseMatrix {
  int n = 0;
  std::vector<T> a;  // row-major
  explicit DenseMatrix(int n_) : n(n_), a(static_cast<std::size_t>(n_) * n_) {}
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

// Solves A x = b in place (A destroyed, b holds x on return).
template <class T>
void dense_lu_solve(DenseMatrix<T>& A, std::vector<T>& b) {
  const int n = A.n;
  std::vector<int> piv(n);
  for (int k = 0; k < n; ++k) {
    int p = k;
    double best = std::abs(A(k, k));
    for (int i = k + 1; i < n; ++i) {
      const double m = std::abs(A(i, k));
      if (m > best) {
        best = m;
        p = i;
      }
    }
    if (best == 0.0) throw numerical_error("dense_lu_solve: singular matrix");
    piv[k] = p;
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(A(k, j), A(p, j));
      std::swap(b[k], b[p]);
    }
    const T inv = T(1.0) / A(k, k);
    for (int i = k + 1; i < n; ++i) {
      const T m = A(i, k) * inv;
      if (m == T(0.0)) continue;
      A(i, k) = m;
      for (int j = k + 1; j < n; ++j) A(i, j) -= m * A(k, j);
      b[i] -= m * b[k];
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    T s = b[i];
    for (int j = i + 1; j < n; ++j) s -= A(i, j) * b[j];
    b[i] = s / A(i, i);
  }
}

// Banded matrix, LAPACK dgbtrf storage: entry (i,j) lives at
// ab[kl+ku + i-j][j], with kl extra rows on top for pivoting fill.
struct BandedMatrix {
  int n = 0, kl = 0, ku = 0;
  std::vector<double> ab;  // (2kl+ku+1) rows, n columns, column-major
  std::vector<int> ipiv;
  bool factored = false;

  BandedMatrix(int n_, int kl_, int ku_)
      : n(n_), kl(kl_), ku(ku_),
        ab(static_cast<std::size_t>(2 * kl_ + ku_ + 1) * n_, 0.0), ipiv(n_) {}

  int ldab() const { return 2 * kl + ku + 1; }

  double& at(int i, int j) {
    const int r = kl + ku + i - j;
    return ab[static_cast<std::size_t>(j) * ldab() + r];
  }

  void add(int i, int j, double v) {
    if (i - j > kl || j - i > ku) throw numerical_error("BandedMatrix::add: outside band");
    at(i, j) += v;
  }

  // dgbtf2-style factorization with partial pivoting.
  void factor() {
    const int kv = kl + ku;
    int ju = 0;
    for (int j = 0; j < n; ++j) {
      const int km = std::min(kl, n - 1 - j);
      int jp = 0;
      double best = std::abs(at(j, j));
      for (int i = 1; i <= km; ++i) {
        const double m = std::abs(at(j + i, j));
        if (m > best) {
          best = m;
          jp = i;
        }
      }
      ipiv[j] = j + jp;
      if (best == 0.0) throw numerical_error("BandedMatrix::factor: singular matrix");
      ju = std::max(ju, std::min(j + ku + jp, n - 1));
      if (jp != 0)
        for (int c = j; c <= ju; ++c) std::swap(at(j, c), at(j + jp, c));
      if (km > 0) {
        const double inv = 1.0 / at(j, j);
        for (int i = 1; i <= km; ++i) at(j + i, j) *= inv;
        for (int c = j + 1; c <= ju; ++c) {
          const double ujc = at(j, c);
          if (ujc == 0.0) continue;
          for (int i = 1; i <= km; ++i) at(j + i, c) -= at(j + i, j) * ujc;
        }
      }
      (void)kv;
    }
    factored = true;
  }

  // Solves with the factored matrix; b holds x on return.
  void solve(std::vector<double>& b) const {
    if (!factored) throw numerical_error("BandedMatrix::solve: not factored");
    auto entry = [&](int i, int j) -> double {
      return ab[static_cast<std::size_t>(j) * ldab() + (kl + ku + i - j)];
    };
    for (int j = 0; j < n; ++j) {
      const int p = ipiv[j];
      if (p != j) std::swap(b[j], b[p]);
      const int km = std::min(kl, n - 1 - j);
      for (int i = 1; i <= km; ++i) b[j + i] -= entry(j + i, j) * b[j];
    }
    for (int j = n - 1; j >= 0; --j) {
      const int top = std::max(0, j - kl - ku);
      b[j] /= entry(j, j);
      for (int i = top; i < j; ++i) b[i] -= entry(i, j) * b[j];
    }
  }
};

}  // namespace salq::detail
