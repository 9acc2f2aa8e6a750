#pragma once

// Fixed-precision arithmetic in Z_p and Q_p.
//
// A PadicScalar is p^v * u with u a unit known modulo p^(N - v), where N is the
// absolute precision: the value is known modulo p^N. A scalar whose value is
// known only to be divisible by p^N is "zero at precision N" and carries no
// unit part. Every operation propagates the worst-case absolute precision.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_map>
#include <vector>

#include "mwzeta/error.hpp"

namespace mwzeta {

/// p^k as an mpz, cached per thread.
inline const mpz_class& prime_power(long p, int k) {
  thread_local std::unordered_map<long, std::vector<mpz_class>> cache;
  auto& powers = cache[p];
  if (powers.empty()) powers.emplace_back(1);
  while (static_cast<int>(powers.size()) <= k) powers.push_back(powers.back() * p);
  return powers[static_cast<std::size_t>(k)];
}

/// Valuation of a scalar: exact, or only a lower bound for zero-at-precision.
struct Valuation {
  int value = 0;
  bool at_least = false;

  friend bool operator==(const Valuation&, const Valuation&) = default;
};

inline bool is_prime(long n) {
  if (n < 2) return false;
  for (long d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

/// v_p of a nonzero integer.
inline int int_valuation(long p, mpz_class n) {
  if (n == 0) return std::numeric_limits<int>::max();
  mpz_class pp(p);
  return static_cast<int>(mpz_remove(n.get_mpz_t(), n.get_mpz_t(), pp.get_mpz_t()));
}

class PadicScalar {
 public:
  PadicScalar() = default;

  static PadicScalar zero(long p, int absprec) {
    PadicScalar z;
    z.p_ = p;
    z.abs_ = absprec;
    z.val_ = absprec;
    return z;
  }

  static PadicScalar from_int(long p, const mpz_class& n, int absprec) {
    PadicScalar r = zero(p, absprec);
    if (n == 0) return r;
    mpz_class u = n;
    mpz_class pp(p);
    int v = static_cast<int>(mpz_remove(u.get_mpz_t(), u.get_mpz_t(), pp.get_mpz_t()));
    r.set_unit(v, u);
    return r;
  }

  static PadicScalar from_int(long p, long n, int absprec) { return from_int(p, mpz_class(n), absprec); }

  static PadicScalar from_rational(long p, const mpq_class& q, int absprec) {
    PadicScalar r = zero(p, absprec);
    if (q == 0) return r;
    mpz_class num = q.get_num();
    mpz_class den = q.get_den();
    mpz_class pp(p);
    int vn = static_cast<int>(mpz_remove(num.get_mpz_t(), num.get_mpz_t(), pp.get_mpz_t()));
    int vd = static_cast<int>(mpz_remove(den.get_mpz_t(), den.get_mpz_t(), pp.get_mpz_t()));
    int v = vn - vd;
    if (v >= absprec) return r;
    const mpz_class& mod = prime_power(p, absprec - v);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
    r.set_unit(v, num * inv);
    return r;
  }

  long prime() const noexcept { return p_; }
  int absolute_precision() const noexcept { return abs_; }
  int relative_precision() const noexcept { return abs_ - val_; }
  bool is_zero() const noexcept { return val_ >= abs_; }
  const mpz_class& unit() const noexcept { return unit_; }

  Valuation valuation() const noexcept { return {val_, is_zero()}; }

  /// Value as a rational number p^v * u, with u the canonical residue in [0, p^(N-v)).
  mpq_class to_rational() const {
    if (is_zero()) return 0;
    mpq_class r(unit_);
    if (val_ >= 0) return r * prime_power(p_, val_);
    return r / prime_power(p_, -val_);
  }

  /// Integer representative in the symmetric range (-p^N/2, p^N/2]; requires v >= 0.
  mpz_class symmetric_lift() const {
    if (is_zero()) return 0;
    if (val_ < 0) detail::fail("padic", "NotIntegral", "symmetric_lift of a non-integral scalar");
    const mpz_class& mod = prime_power(p_, abs_);
    mpz_class x = unit_ * prime_power(p_, val_);
    x %= mod;
    if (2 * x > mod) x -= mod;
    return x;
  }

  /// Same value with absolute precision lowered to at most `absprec`.
  PadicScalar with_precision(int absprec) const {
    if (absprec >= abs_) return *this;
    if (is_zero() || absprec <= val_) return zero(p_, absprec);
    PadicScalar r = *this;
    r.abs_ = absprec;
    r.unit_ %= prime_power(p_, absprec - val_);
    return r;
  }

  PadicScalar operator-() const {
    PadicScalar r = *this;
    if (!is_zero()) {
      const mpz_class& mod = prime_power(p_, abs_ - val_);
      r.unit_ = mod - unit_;
    }
    return r;
  }

  friend PadicScalar operator+(const PadicScalar& a, const PadicScalar& b) {
    check_same_prime(a, b);
    const int abs = std::min(a.abs_, b.abs_);
    if (a.is_zero() && b.is_zero()) return zero(a.p_, abs);
    const long p = a.p_;
    if (a.is_zero()) return b.with_precision(abs);
    if (b.is_zero()) return a.with_precision(abs);
    const int v = std::min(a.val_, b.val_);
    if (abs <= v) return zero(p, abs);
    mpz_class s = a.unit_ * prime_power(p, a.val_ - v) + b.unit_ * prime_power(p, b.val_ - v);
    s %= prime_power(p, abs - v);
    PadicScalar r = zero(p, abs);
    if (s == 0) return r;
    mpz_class pp(p);
    int k = static_cast<int>(mpz_remove(s.get_mpz_t(), s.get_mpz_t(), pp.get_mpz_t()));
    r.set_unit(v + k, s);
    return r;
  }

  friend PadicScalar operator-(const PadicScalar& a, const PadicScalar& b) { return a + (-b); }

  friend PadicScalar operator*(const PadicScalar& a, const PadicScalar& b) {
    check_same_prime(a, b);
    const long p = a.p_;
    if (a.is_zero() && b.is_zero()) return zero(p, a.abs_ + b.abs_);
    if (a.is_zero()) return zero(p, a.abs_ + b.val_);
    if (b.is_zero()) return zero(p, b.abs_ + a.val_);
    const int rel = std::min(a.relative_precision(), b.relative_precision());
    PadicScalar r = zero(p, a.val_ + b.val_ + rel);
    r.set_unit(a.val_ + b.val_, a.unit_ * b.unit_);
    return r;
  }

  PadicScalar inverse() const {
    if (is_zero())
      detail::fail("padic", "DivisionByZeroAtPrecision",
                   "cannot invert a scalar that is zero modulo p^" + std::to_string(abs_));
    const int rel = relative_precision();
    PadicScalar r = zero(p_, -val_ + rel);
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), unit_.get_mpz_t(), prime_power(p_, rel).get_mpz_t());
    r.val_ = -val_;
    r.unit_ = inv;
    return r;
  }

  friend PadicScalar operator/(const PadicScalar& a, const PadicScalar& b) { return a * b.inverse(); }

  PadicScalar& operator+=(const PadicScalar& o) { return *this = *this + o; }
  PadicScalar& operator-=(const PadicScalar& o) { return *this = *this - o; }
  PadicScalar& operator*=(const PadicScalar& o) { return *this = *this * o; }

  /// Equality at the joint precision: the difference is zero at precision.
  friend bool operator==(const PadicScalar& a, const PadicScalar& b) { return (a - b).is_zero(); }

  /// Canonical rendering p^v*(u mod p^r); zero-at-precision renders as O(p^N).
  std::string to_string() const {
    if (is_zero()) return "O(" + std::to_string(p_) + "^" + std::to_string(abs_) + ")";
    return std::to_string(p_) + "^" + std::to_string(val_) + "*(" + unit_.get_str() + " mod " +
           std::to_string(p_) + "^" + std::to_string(relative_precision()) + ")";
  }

 private:
  static void check_same_prime(const PadicScalar& a, const PadicScalar& b) {
    if (a.p_ != b.p_)
      detail::fail("padic", "PrimeMismatch",
                   "operands over p=" + std::to_string(a.p_) + " and p=" + std::to_string(b.p_));
  }

  // u must be prime to p; it is reduced into [0, p^(abs - v)).
  void set_unit(int v, mpz_class u) {
    if (v >= abs_) {
      val_ = abs_;
      unit_ = 0;
      return;
    }
    val_ = v;
    const mpz_class& mod = prime_power(p_, abs_ - v);
    u %= mod;
    if (u < 0) u += mod;
    unit_ = std::move(u);
  }

  long p_ = 2;
  int abs_ = 0;
  int val_ = 0;
  mpz_class unit_ = 0;
};

/// Scalar context: prime plus the absolute precision used for fresh constants.
struct PadicContext {
  long p = 2;
  int precision = 10;

  PadicScalar zero() const { return PadicScalar::zero(p, precision); }
  PadicScalar one() const { return PadicScalar::from_int(p, 1, precision); }
  PadicScalar integer(const mpz_class& n) const { return PadicScalar::from_int(p, n, precision); }
  PadicScalar integer(long n) const { return PadicScalar::from_int(p, n, precision); }
  PadicScalar rational(const mpq_class& q) const { return PadicScalar::from_rational(p, q, precision); }
};

}  // namespace mwzeta
