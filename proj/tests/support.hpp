#pragma once

// Independent reference computations used as test oracles. Nothing here calls
// into the library's algorithms; only plain integers and GMP rationals.

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace oracle {

inline long mod(long a, long p) { return ((a % p) + p) % p; }

inline long eval_mod(const std::vector<long>& f, long x, long p) {
  long r = 0;
  for (auto it = f.rbegin(); it != f.rend(); ++it) r = mod(r * x + *it, p);
  return r;
}

/// Arithmetic in F_p[i] / (i^2 - n) for a fixed non-residue n: the field with p^2 elements.
struct Fp2 {
  long p, n;
  struct E {
    long a, b;  // a + b i
  };
  E mul(E x, E y) const { return {mod(x.a * y.a + n * mod(x.b * y.b, p), p), mod(x.a * y.b + x.b * y.a, p)}; }
  E add(E x, E y) const { return {mod(x.a + y.a, p), mod(x.b + y.b, p)}; }
  E from(long c) const { return {mod(c, p), 0}; }
  bool is_zero(E x) const { return x.a == 0 && x.b == 0; }
};

inline long non_residue(long p) {
  for (long n = 2; n < p; ++n) {
    bool square = false;
    for (long x = 1; x < p && !square; ++x) square = x * x % p == n;
    if (!square) return n;
  }
  return -1;
}

/// #{(x, y) in F_q^2 : y^2 = f(x), y != 0} for q = p or p^2, by brute force over pairs.
inline std::uint64_t curve_points_with_y_unit(const std::vector<long>& f, long p, int s) {
  std::uint64_t count = 0;
  if (s == 1) {
    for (long x = 0; x < p; ++x)
      for (long y = 1; y < p; ++y) count += y * y % p == eval_mod(f, x, p);
    return count;
  }
  const Fp2 F{p, non_residue(p)};
  std::vector<Fp2::E> all;
  for (long a = 0; a < p; ++a)
    for (long b = 0; b < p; ++b) all.push_back({a, b});
  for (auto x : all) {
    Fp2::E fx = F.from(0);
    for (auto it = f.rbegin(); it != f.rend(); ++it) fx = F.add(F.mul(fx, x), F.from(*it));
    for (auto y : all) {
      if (F.is_zero(y)) continue;
      const auto yy = F.mul(y, y);
      count += yy.a == fx.a && yy.b == fx.b;
    }
  }
  return count;
}

/// det(I - tM) over Q by cofactor expansion of the polynomial matrix; ascending coefficients.
using QPoly = std::vector<mpq_class>;

inline QPoly qmul(const QPoly& a, const QPoly& b) {
  QPoly r(a.size() + b.size() - 1);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

inline QPoly qadd(QPoly a, const QPoly& b, int sign) {
  if (a.size() < b.size()) a.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) a[i] += sign * b[i];
  return a;
}

inline QPoly det_poly(const std::vector<std::vector<QPoly>>& m) {
  const std::size_t n = m.size();
  if (n == 0) return {1};
  if (n == 1) return m[0][0];
  QPoly total{0};
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<std::vector<QPoly>> minor;
    for (std::size_t r = 1; r < n; ++r) {
      std::vector<QPoly> row;
      for (std::size_t k = 0; k < n; ++k)
        if (k != c) row.push_back(m[r][k]);
      minor.push_back(row);
    }
    total = qadd(total, qmul(m[0][c], det_poly(minor)), c % 2 ? -1 : 1);
  }
  return total;
}

inline QPoly det_one_minus_t(const std::vector<std::vector<long>>& M) {
  const std::size_t n = M.size();
  std::vector<std::vector<QPoly>> m(n, std::vector<QPoly>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m[i][j] = {i == j ? 1 : 0, -M[i][j]};
  QPoly r = det_poly(m);
  r.resize(n + 1);
  return r;
}

/// Coefficients of exp(sum_s N_s t^s / s) up to t^order, by the recurrence
/// k z_k = sum_{s=1..k} N_s z_{k-s}.
inline QPoly zeta_from_counts(const std::vector<mpz_class>& counts, std::size_t order) {
  QPoly z(order + 1);
  z[0] = 1;
  for (std::size_t k = 1; k <= order; ++k) {
    mpq_class acc = 0;
    for (std::size_t s = 1; s <= k && s <= counts.size(); ++s) acc += mpq_class(counts[s - 1]) * z[k - s];
    z[k] = acc / static_cast<long>(k);
  }
  return z;
}

}  // namespace oracle
