#pragma once

// Exact rational power series and polynomials in one variable t.

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "mwzeta/error.hpp"

namespace mwzeta {

/// Coefficients in ascending powers of t; truncated series when used as such.
using RationalPoly = std::vector<mpq_class>;

inline void trim(RationalPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

inline RationalPoly poly_mul(const RationalPoly& a, const RationalPoly& b) {
  if (a.empty() || b.empty()) return {};
  RationalPoly r(a.size() + b.size() - 1, mpq_class(0));
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  trim(r);
  return r;
}

/// Truncated product modulo t^(order + 1).
inline RationalPoly series_mul(const RationalPoly& a, const RationalPoly& b, std::size_t order) {
  RationalPoly r(order + 1, mpq_class(0));
  for (std::size_t i = 0; i < a.size() && i <= order; ++i)
    for (std::size_t j = 0; j < b.size() && i + j <= order; ++j) r[i + j] += a[i] * b[j];
  return r;
}

/// Inverse of a series with nonzero constant term, modulo t^(order + 1).
inline RationalPoly series_inverse(const RationalPoly& a, std::size_t order) {
  if (a.empty() || a[0] == 0) detail::fail("rational", "NotInvertible", "series has zero constant term");
  RationalPoly r(order + 1, mpq_class(0));
  r[0] = 1 / a[0];
  for (std::size_t n = 1; n <= order; ++n) {
    mpq_class s = 0;
    for (std::size_t k = 1; k <= n && k < a.size(); ++k) s += a[k] * r[n - k];
    r[n] = -s / a[0];
  }
  return r;
}

inline RationalPoly series_derivative(const RationalPoly& a) {
  if (a.size() <= 1) return {};
  RationalPoly r(a.size() - 1);
  for (std::size_t i = 1; i < a.size(); ++i) r[i - 1] = a[i] * static_cast<unsigned long>(i);
  return r;
}

/// t * d/dt log(a), modulo t^(order + 1); requires a[0] = 1.
inline RationalPoly log_derivative_series(const RationalPoly& a, std::size_t order) {
  if (a.empty() || a[0] != 1) detail::fail("rational", "NotUnitConstant", "log needs constant term 1");
  RationalPoly num = series_mul(series_derivative(a), series_inverse(a, order), order);
  RationalPoly r(order + 1, mpq_class(0));
  for (std::size_t i = 0; i + 1 <= order && i < num.size(); ++i) r[i + 1] = num[i];
  return r;
}

/// exp of a series with zero constant term, modulo t^(order + 1).
inline RationalPoly series_exp(const RationalPoly& a, std::size_t order) {
  if (!a.empty() && a[0] != 0) detail::fail("rational", "NonzeroConstant", "exp needs zero constant term");
  RationalPoly r(order + 1, mpq_class(0));
  r[0] = 1;
  // n z_n = sum_{k=1..n} k a_k z_{n-k}
  for (std::size_t n = 1; n <= order; ++n) {
    mpq_class s = 0;
    for (std::size_t k = 1; k <= n && k < a.size(); ++k) s += a[k] * static_cast<unsigned long>(k) * r[n - k];
    r[n] = s / static_cast<unsigned long>(n);
  }
  return r;
}

/// Quotient and remainder over Q; b must be nonzero.
inline std::pair<RationalPoly, RationalPoly> poly_divmod(RationalPoly a, RationalPoly b) {
  trim(a);
  trim(b);
  if (b.empty()) detail::fail("rational", "DivisionByZero", "polynomial division by zero");
  RationalPoly q;
  if (a.size() >= b.size()) q.assign(a.size() - b.size() + 1, mpq_class(0));
  while (a.size() >= b.size() && !a.empty()) {
    const std::size_t shift = a.size() - b.size();
    mpq_class c = a.back() / b.back();
    q[shift] = c;
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
    trim(a);
  }
  trim(q);
  return {q, a};
}

/// Monic gcd over Q (empty for gcd(0, 0)).
inline RationalPoly poly_gcd(RationalPoly a, RationalPoly b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    RationalPoly r = poly_divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (!a.empty()) {
    mpq_class lead = a.back();
    for (auto& c : a) c /= lead;
  }
  return a;
}

struct BezoutResult {
  RationalPoly gcd;
  RationalPoly s;
  RationalPoly t;
};

/// Monic gcd with cofactors: s*a + t*b = gcd.
inline BezoutResult poly_xgcd(RationalPoly a, RationalPoly b) {
  trim(a);
  trim(b);
  RationalPoly s0{mpq_class(1)}, s1, t0, t1{mpq_class(1)};
  while (!b.empty()) {
    auto [q, r] = poly_divmod(a, b);
    RationalPoly s2 = s0, t2 = t0;
    RationalPoly qs = poly_mul(q, s1), qt = poly_mul(q, t1);
    s2.resize(std::max(s2.size(), qs.size()), mpq_class(0));
    t2.resize(std::max(t2.size(), qt.size()), mpq_class(0));
    for (std::size_t i = 0; i < qs.size(); ++i) s2[i] -= qs[i];
    for (std::size_t i = 0; i < qt.size(); ++i) t2[i] -= qt[i];
    trim(s2);
    trim(t2);
    a = std::move(b);
    b = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s2);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (!a.empty()) {
    const mpq_class lead = a.back();
    for (auto& c : a) c /= lead;
    for (auto& c : s0) c /= lead;
    for (auto& c : t0) c /= lead;
  }
  return {a, s0, t0};
}

inline std::vector<mpz_class> to_integers(const RationalPoly& a) {
  std::vector<mpz_class> r;
  r.reserve(a.size());
  for (const auto& c : a) {
    if (c.get_den() != 1) detail::fail("rational", "NotIntegral", "coefficient " + c.get_str() + " is not an integer");
    r.push_back(c.get_num());
  }
  return r;
}

inline RationalPoly from_integers(const std::vector<mpz_class>& a) {
  RationalPoly r;
  r.reserve(a.size());
  for (const auto& c : a) r.emplace_back(c);
  return r;
}

}  // namespace mwzeta
