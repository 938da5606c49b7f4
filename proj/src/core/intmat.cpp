#include "intmat.hpp"

#include <utility>

namespace toric {

namespace {

void row_combine(IntMatrix& m, std::size_t target, std::size_t source, const Int& factor) {
  // row[target] -= factor * row[source]
  for (std::size_t c = 0; c < m.cols(); ++c) m(target, c) -= factor * m(source, c);
}

void col_combine(IntMatrix& m, std::size_t target, std::size_t source, const Int& factor) {
  for (std::size_t r = 0; r < m.rows(); ++r) m(r, target) -= factor * m(r, source);
}

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

} // namespace

SmithForm smith_normal_form(const IntMatrix& a) {
  const std::size_t m = a.rows(), n = a.cols();
  SmithForm s{a, IntMatrix::identity(m), IntMatrix::identity(n)};
  IntMatrix& d = s.diag;
  IntMatrix& u = s.left;
  IntMatrix& v = s.right;

  for (std::size_t t = 0; t < std::min(m, n); ++t) {
    // Pivot: smallest nonzero absolute value in the trailing block.
    for (;;) {
      std::size_t pr = m, pc = n;
      for (std::size_t r = t; r < m; ++r)
        for (std::size_t c = t; c < n; ++c)
          if (d(r, c) != 0 && (pr == m || abs(d(r, c)) < abs(d(pr, pc)))) {
            pr = r;
            pc = c;
          }
      if (pr == m) return s; // trailing block is zero
      d.swap_rows(t, pr);
      u.swap_rows(t, pr);
      d.swap_cols(t, pc);
      v.swap_cols(t, pc);

      bool clean = true;
      for (std::size_t r = t + 1; r < m; ++r) {
        if (d(r, t) == 0) continue;
        Int q = floor_div(d(r, t), d(t, t));
        row_combine(d, r, t, q);
        row_combine(u, r, t, q);
        if (d(r, t) != 0) clean = false;
      }
      for (std::size_t c = t + 1; c < n; ++c) {
        if (d(t, c) == 0) continue;
        Int q = floor_div(d(t, c), d(t, t));
        col_combine(d, c, t, q);
        col_combine(v, c, t, q);
        if (d(t, c) != 0) clean = false;
      }
      if (!clean) continue;

      // Divisibility condition: the pivot must divide the whole trailing block.
      std::size_t bad_r = m;
      for (std::size_t r = t + 1; r < m && bad_r == m; ++r)
        for (std::size_t c = t + 1; c < n; ++c) {
          Int rem;
          mpz_tdiv_r(rem.get_mpz_t(), d(r, c).get_mpz_t(), d(t, t).get_mpz_t());
          if (rem != 0) {
            bad_r = r;
            break;
          }
        }
      if (bad_r == m) break;
      // Fold the offending row into row t and iterate.
      for (std::size_t c = 0; c < n; ++c) d(t, c) += d(bad_r, c);
      for (std::size_t c = 0; c < m; ++c) u(t, c) += u(bad_r, c);
    }
    if (d(t, t) < 0) {
      for (std::size_t c = 0; c < n; ++c) d(t, c) = -d(t, c);
      for (std::size_t c = 0; c < m; ++c) u(t, c) = -u(t, c);
    }
  }
  return s;
}

Int determinant(const IntMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) fail(Error::Kind::Internal, "determinant of non-square matrix");
  if (n == 0) return 1;
  IntMatrix m = a;
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t p = k + 1;
      while (p < n && m(p, k) == 0) ++p;
      if (p == n) return 0;
      m.swap_rows(k, p);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int num = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(m(i, j).get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

Rat determinant(const RatMatrix& a) {
  const std::size_t n = a.rows();
  if (n != a.cols()) fail(Error::Kind::Internal, "determinant of non-square matrix");
  RatMatrix m = a;
  Rat det = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      m.swap_rows(k, p);
      det = -det;
    }
    det *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rat f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return det;
}

std::optional<std::vector<Rat>> solve(const RatMatrix& a, const std::vector<Rat>& b) {
  const std::size_t n = a.rows();
  if (n != a.cols() || b.size() != n) fail(Error::Kind::Internal, "solve: shape mismatch");
  RatMatrix m(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) m(i, j) = a(i, j);
    m(i, n) = b[i];
  }
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) return std::nullopt;
    m.swap_rows(k, p);
    for (std::size_t i = 0; i < n; ++i) {
      if (i == k || m(i, k) == 0) continue;
      Rat f = m(i, k) / m(k, k);
      for (std::size_t j = k; j <= n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  std::vector<Rat> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = m(i, n) / m(i, i);
  return x;
}

IntMatrix unimodular_inverse(const IntMatrix& a) {
  const std::size_t n = a.rows();
  RatMatrix r = to_rational(a);
  IntMatrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<Rat> e(n, Rat(0));
    e[c] = 1;
    auto col = solve(r, e);
    if (!col) fail(Error::Kind::Internal, "unimodular_inverse: singular matrix");
    for (std::size_t i = 0; i < n; ++i) {
      if ((*col)[i].get_den() != 1) fail(Error::Kind::Internal, "unimodular_inverse: matrix is not unimodular");
      inv(i, c) = (*col)[i].get_num();
    }
  }
  return inv;
}

std::size_t rank(const RatMatrix& a) {
  RatMatrix m = a;
  std::size_t rk = 0;
  for (std::size_t c = 0; c < m.cols() && rk < m.rows(); ++c) {
    std::size_t p = rk;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(rk, p);
    for (std::size_t i = rk + 1; i < m.rows(); ++i) {
      if (m(i, c) == 0) continue;
      Rat f = m(i, c) / m(rk, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(rk, j);
    }
    ++rk;
  }
  return rk;
}

RatMatrix to_rational(const IntMatrix& a) {
  RatMatrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j);
  return r;
}

} // namespace toric
