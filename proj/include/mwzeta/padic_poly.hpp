#pragma once

// Dense univariate polynomials over Q_p known modulo a single absolute
// precision p^N shared by all coefficients (and by the implicit zeros above the
// degree). Used as the x-part of hyperelliptic elements.

#include <gmpxx.h>

#include <algorithm>
#include <string>
#include <vector>

#include "mwzeta/error.hpp"
#include "mwzeta/padic.hpp"

namespace mwzeta {

class PadicPoly {
 public:
  PadicPoly() = default;
  explicit PadicPoly(PadicContext ctx) : ctx_(ctx), prec_(ctx.precision) {}
  PadicPoly(PadicContext ctx, std::vector<PadicScalar> coeffs) : ctx_(ctx), prec_(ctx.precision), c_(std::move(coeffs)) {
    normalize();
  }

  static PadicPoly from_integers(PadicContext ctx, const std::vector<mpz_class>& a) {
    std::vector<PadicScalar> c;
    c.reserve(a.size());
    for (const auto& x : a) c.push_back(ctx.integer(x));
    return {ctx, std::move(c)};
  }

  static PadicPoly monomial(PadicContext ctx, int k, const PadicScalar& c) {
    std::vector<PadicScalar> v(static_cast<std::size_t>(k + 1), ctx.zero());
    v.back() = c;
    return {ctx, std::move(v)};
  }

  const PadicContext& context() const noexcept { return ctx_; }
  const std::vector<PadicScalar>& coeffs() const noexcept { return c_; }
  int degree() const noexcept { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const noexcept { return c_.empty(); }

  PadicScalar operator[](int i) const {
    if (i < 0 || i > degree()) return PadicScalar::zero(ctx_.p, prec_);
    return c_[static_cast<std::size_t>(i)];
  }

  int precision() const noexcept { return prec_; }

  int min_valuation() const {
    int m = prec_;
    for (const auto& c : c_)
      if (!c.is_zero()) m = std::min(m, c.valuation().value);
    return m;
  }

  void add_coeff(int i, const PadicScalar& a) {
    if (static_cast<int>(c_.size()) <= i) c_.resize(static_cast<std::size_t>(i + 1), ctx_.zero());
    c_[static_cast<std::size_t>(i)] += a;
    normalize();
  }

  friend PadicPoly operator+(const PadicPoly& a, const PadicPoly& b) {
    const PadicContext ctx = a.c_.empty() ? b.ctx_ : a.ctx_;
    std::vector<PadicScalar> r(std::max(a.c_.size(), b.c_.size()), ctx.zero());
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] = a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] = i < a.c_.size() ? r[i] + b.c_[i] : b.c_[i];
    PadicPoly out(ctx);
    out.prec_ = std::min(a.prec_, b.prec_);
    out.c_ = std::move(r);
    out.normalize();
    return out;
  }

  PadicPoly operator-() const {
    PadicPoly r = *this;
    for (auto& c : r.c_) c = -c;
    return r;
  }

  friend PadicPoly operator-(const PadicPoly& a, const PadicPoly& b) { return a + (-b); }

  // Products are formed on integer representatives: with common floor N and
  // minimal valuations va, vb the product is known modulo p^min(N + vb, N + va).
  friend PadicPoly operator*(const PadicPoly& a, const PadicPoly& b) {
    PadicPoly out(a.ctx_);
    out.prec_ = std::min(a.prec_ + b.min_valuation(), b.prec_ + a.min_valuation());
    if (a.c_.empty() || b.c_.empty()) return out;
    const long p = a.ctx_.p;
    const int sa = std::min(0, a.min_valuation()), sb = std::min(0, b.min_valuation());
    const int shift = sa + sb;
    std::vector<mpz_class> ia = scaled(a, -sa), ib = scaled(b, -sb);
    std::vector<mpz_class> r(a.c_.size() + b.c_.size() - 1, mpz_class(0));
    for (std::size_t i = 0; i < ia.size(); ++i) {
      if (ia[i] == 0) continue;
      for (std::size_t j = 0; j < ib.size(); ++j)
        if (ib[j] != 0) mpz_addmul(r[i + j].get_mpz_t(), ia[i].get_mpz_t(), ib[j].get_mpz_t());
    }
    out.c_.reserve(r.size());
    for (auto& x : r) {
      if (shift == 0)
        out.c_.push_back(PadicScalar::from_int(p, x, out.prec_));
      else
        out.c_.push_back(PadicScalar::from_rational(p, mpq_class(x) / prime_power(p, -shift), out.prec_));
    }
    out.normalize();
    return out;
  }

  friend PadicPoly operator*(const PadicScalar& s, const PadicPoly& a) {
    PadicPoly r = a;
    if (s.is_zero()) {
      r.prec_ = s.absolute_precision() + a.min_valuation();
      r.c_.clear();
      return r;
    }
    r.prec_ = a.prec_ + s.valuation().value;
    for (auto& c : r.c_) c = s * c;
    r.normalize();
    return r;
  }

  PadicPoly& operator+=(const PadicPoly& o) { return *this = *this + o; }
  PadicPoly& operator-=(const PadicPoly& o) { return *this = *this - o; }

  PadicPoly derivative() const {
    if (c_.size() <= 1) return PadicPoly(ctx_);
    std::vector<PadicScalar> r(c_.size() - 1, ctx_.zero());
    for (std::size_t i = 1; i < c_.size(); ++i) r[i - 1] = ctx_.integer(static_cast<long>(i)) * c_[i];
    PadicPoly out = *this;
    out.c_ = std::move(r);
    out.normalize();
    return out;
  }

  PadicPoly pow(unsigned e) const {
    PadicPoly r = PadicPoly::monomial(ctx_, 0, ctx_.one());
    PadicPoly b = *this;
    while (e) {
      if (e & 1u) r = r * b;
      e >>= 1u;
      if (e) b = b * b;
    }
    return r;
  }

  /// Composition a(b(x)) by Horner's rule.
  PadicPoly compose(const PadicPoly& b) const {
    PadicPoly r(ctx_);
    r.prec_ = prec_;
    for (std::size_t i = c_.size(); i-- > 0;) {
      PadicPoly c(ctx_, {c_[i]});
      c.prec_ = std::min(c.prec_, prec_);
      r = r * b + c;
    }
    return r;
  }

  /// a = q*m + r with deg r < deg m; the leading coefficient of m must be a unit.
  friend std::pair<PadicPoly, PadicPoly> divmod(const PadicPoly& a, const PadicPoly& m) {
    if (m.is_zero()) detail::fail("padic_poly", "DivisionByZero", "division by the zero polynomial");
    const PadicScalar lc = m.c_.back();
    if (lc.valuation().value != 0)
      detail::fail("padic_poly", "NonUnitLeading", "divisor must have unit leading coefficient");
    const PadicScalar inv = lc.inverse();
    std::vector<PadicScalar> r = a.c_;
    const int dm = m.degree();
    if (a.degree() < dm) return {PadicPoly(a.ctx_), a};
    std::vector<PadicScalar> q(static_cast<std::size_t>(a.degree() - dm + 1), a.ctx_.zero());
    for (int i = a.degree(); i >= dm; --i) {
      const PadicScalar c = r[static_cast<std::size_t>(i)] * inv;
      q[static_cast<std::size_t>(i - dm)] = c;
      if (c.is_zero()) continue;
      for (int j = 0; j <= dm; ++j) r[static_cast<std::size_t>(i - dm + j)] -= c * m.c_[static_cast<std::size_t>(j)];
    }
    r.resize(static_cast<std::size_t>(dm));
    PadicPoly qq(a.ctx_), rr(a.ctx_);
    qq.prec_ = rr.prec_ = std::min(a.prec_, m.prec_ + a.min_valuation() - m.min_valuation());
    qq.c_ = std::move(q);
    rr.c_ = std::move(r);
    qq.normalize();
    rr.normalize();
    return {qq, rr};
  }

  PadicPoly with_precision(int absprec) const {
    PadicPoly r = *this;
    r.prec_ = std::min(prec_, absprec);
    r.normalize();
    return r;
  }

  /// Keeps coefficients of x^(p*m + shift) as coefficients of x^m.
  PadicPoly section(long p, int shift) const {
    std::vector<PadicScalar> r;
    for (int i = shift; i <= degree(); i += static_cast<int>(p)) r.push_back(c_[static_cast<std::size_t>(i)]);
    PadicPoly out = *this;
    out.c_ = std::move(r);
    out.normalize();
    return out;
  }

  /// Substitutes x -> x^p.
  PadicPoly inflate(long p) const {
    if (c_.empty()) return *this;
    std::vector<PadicScalar> r(static_cast<std::size_t>(degree() * p + 1), ctx_.zero());
    for (std::size_t i = 0; i < c_.size(); ++i) r[i * static_cast<std::size_t>(p)] = c_[i];
    PadicPoly out = *this;
    out.c_ = std::move(r);
    out.normalize();
    return out;
  }

  friend bool operator==(const PadicPoly& a, const PadicPoly& b) { return (a - b).is_zero(); }

  std::string to_string() const {
    std::string s;
    for (std::size_t i = 0; i < c_.size(); ++i) {
      if (c_[i].is_zero()) continue;
      if (!s.empty()) s += " + ";
      s += c_[i].to_string() + "*x^" + std::to_string(i);
    }
    return s.empty() ? "0" : s;
  }

 private:
  static std::vector<mpz_class> scaled(const PadicPoly& a, int e) {
    std::vector<mpz_class> r;
    r.reserve(a.c_.size());
    for (const auto& c : a.c_) {
      if (c.is_zero()) {
        r.emplace_back(0);
        continue;
      }
      r.push_back(c.unit() * prime_power(a.ctx_.p, c.valuation().value + e));
    }
    return r;
  }

  // Shared floor: every coefficient is capped at the lowest precision present,
  // and trailing zeros are dropped.
  void normalize() {
    for (const auto& c : c_) prec_ = std::min(prec_, c.absolute_precision());
    for (auto& c : c_) c = c.with_precision(prec_);
    while (!c_.empty() && c_.back().is_zero()) c_.pop_back();
  }

  PadicContext ctx_;
  int prec_ = 0;
  std::vector<PadicScalar> c_;
};

}  // namespace mwzeta
