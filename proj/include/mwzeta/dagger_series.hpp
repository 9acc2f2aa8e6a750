#pragma once

// Truncated model of the overconvergent ring T_n^dagger and its Laurent
// localizations. A series keeps every monomial of total degree |v| <= D
// (|v| sums absolute values, so Laurent exponents count too) and is known
// modulo p^N coefficient-wise.

#include <gmpxx.h>

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mwzeta/error.hpp"
#include "mwzeta/padic.hpp"

namespace mwzeta {

using Exponent = std::vector<int>;

inline int total_degree(const Exponent& v) {
  int d = 0;
  for (int e : v) d += std::abs(e);
  return d;
}

/// Graded lexicographic order: lower total degree first, then larger leading exponents first.
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const {
    const int da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    return std::lexicographical_compare(b.begin(), b.end(), a.begin(), a.end());
  }
};

inline constexpr int kNoDegreeCap = std::numeric_limits<int>::max();

/// Evidence that |c_v| <= C p^(-eps |v|) on the retained support.
struct DecayWitness {
  mpq_class eps;
  mpq_class bound;
};

class DaggerSeries {
 public:
  using TermMap = std::map<Exponent, PadicScalar, GradedLex>;

  DaggerSeries() = default;

  DaggerSeries(PadicContext ctx, int nvars, std::vector<bool> inverted = {}, int degree_cap = kNoDegreeCap)
      : p_(ctx.p), nvars_(nvars), prec_(ctx.precision), cap_(degree_cap), inverted_(std::move(inverted)) {
    if (inverted_.empty()) inverted_.assign(static_cast<std::size_t>(nvars), false);
    if (static_cast<int>(inverted_.size()) != nvars)
      detail::fail("dagger_series", "ShapeMismatch", "inverted flags do not match the variable count");
  }

  static DaggerSeries constant(const PadicContext& ctx, int nvars, const PadicScalar& c,
                               std::vector<bool> inverted = {}, int degree_cap = kNoDegreeCap) {
    DaggerSeries s(ctx, nvars, std::move(inverted), degree_cap);
    s.add_term(Exponent(static_cast<std::size_t>(nvars), 0), c);
    return s;
  }

  static DaggerSeries monomial(const PadicContext& ctx, Exponent v, const PadicScalar& c,
                               std::vector<bool> inverted = {}, int degree_cap = kNoDegreeCap) {
    const int n = static_cast<int>(v.size());
    DaggerSeries s(ctx, n, std::move(inverted), degree_cap);
    s.add_term(std::move(v), c);
    return s;
  }

  /// Same shape (variables, inversion flags, cap, precision) with no terms.
  DaggerSeries zero_like() const {
    DaggerSeries z = *this;
    z.terms_.clear();
    return z;
  }

  DaggerSeries one_like() const {
    DaggerSeries z = zero_like();
    z.add_term(Exponent(static_cast<std::size_t>(nvars_), 0), PadicScalar::from_int(p_, 1, prec_));
    return z;
  }

  long prime() const noexcept { return p_; }
  int nvars() const noexcept { return nvars_; }
  int precision() const noexcept { return prec_; }
  int degree_cap() const noexcept { return cap_; }
  const std::vector<bool>& inverted() const noexcept { return inverted_; }
  const TermMap& terms() const noexcept { return terms_; }
  PadicContext context() const { return {p_, prec_}; }
  bool is_zero() const noexcept { return terms_.empty(); }

  PadicScalar coeff(const Exponent& v) const {
    auto it = terms_.find(v);
    return it == terms_.end() ? PadicScalar::zero(p_, prec_) : it->second;
  }

  PadicScalar constant_term() const { return coeff(Exponent(static_cast<std::size_t>(nvars_), 0)); }

  /// Adds c * xi^v, dropping monomials beyond the degree cap and zero-at-precision sums.
  void add_term(Exponent v, const PadicScalar& c) {
    if (static_cast<int>(v.size()) != nvars_)
      detail::fail("dagger_series", "ShapeMismatch", "exponent length differs from variable count");
    for (int i = 0; i < nvars_; ++i)
      if (v[static_cast<std::size_t>(i)] < 0 && !inverted_[static_cast<std::size_t>(i)])
        detail::fail("dagger_series", "ShapeMismatch", "negative exponent at a non-inverted variable");
    if (c.prime() != p_) detail::fail("dagger_series", "PrimeMismatch", "coefficient over a different prime");
    if (total_degree(v) > cap_) return;
    auto it = terms_.find(v);
    PadicScalar sum = it == terms_.end() ? c.with_precision(prec_) : (it->second + c).with_precision(prec_);
    if (sum.is_zero()) {
      prec_ = std::min(prec_, sum.absolute_precision());
      if (it != terms_.end()) terms_.erase(it);
      return;
    }
    if (it == terms_.end())
      terms_.emplace(std::move(v), std::move(sum));
    else
      it->second = std::move(sum);
  }

  /// Smallest coefficient valuation; the precision for the zero series.
  int min_valuation() const {
    int m = prec_;
    for (const auto& [v, c] : terms_) m = std::min(m, c.valuation().value);
    return m;
  }

  /// Largest total degree in the support (0 for the zero series).
  int degree() const {
    int d = 0;
    for (const auto& [v, c] : terms_) d = std::max(d, total_degree(v));
    return d;
  }

  DaggerSeries with_precision(int absprec) const {
    DaggerSeries r = zero_like();
    r.prec_ = std::min(prec_, absprec);
    for (const auto& [v, c] : terms_) r.add_term(v, c);
    return r;
  }

  DaggerSeries truncated(int degree_cap) const {
    DaggerSeries r = zero_like();
    r.cap_ = std::min(cap_, degree_cap);
    for (const auto& [v, c] : terms_) r.add_term(v, c);
    return r;
  }

  DaggerSeries operator-() const {
    DaggerSeries r = *this;
    for (auto& [v, c] : r.terms_) c = -c;
    return r;
  }

  friend DaggerSeries operator+(const DaggerSeries& a, const DaggerSeries& b) {
    check_compatible(a, b);
    DaggerSeries r = a.zero_like();
    r.prec_ = std::min(a.prec_, b.prec_);
    r.cap_ = std::min(a.cap_, b.cap_);
    for (const auto& [v, c] : a.terms_) r.add_term(v, c);
    for (const auto& [v, c] : b.terms_) r.add_term(v, c);
    return r;
  }

  friend DaggerSeries operator-(const DaggerSeries& a, const DaggerSeries& b) { return a + (-b); }

  friend DaggerSeries operator*(const DaggerSeries& a, const DaggerSeries& b) {
    check_compatible(a, b);
    DaggerSeries r = a.zero_like();
    r.cap_ = std::min(a.cap_, b.cap_);
    r.prec_ = std::min(a.prec_ + b.min_valuation(), b.prec_ + a.min_valuation());
    for (const auto& [va, ca] : a.terms_) {
      for (const auto& [vb, cb] : b.terms_) {
        Exponent v(va.size());
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = va[i] + vb[i];
        r.add_term(std::move(v), ca * cb);
      }
    }
    return r;
  }

  friend DaggerSeries operator*(const PadicScalar& s, const DaggerSeries& a) {
    DaggerSeries r = a.zero_like();
    if (s.is_zero()) {
      r.prec_ = std::min(r.prec_, s.absolute_precision() + a.min_valuation());
      return r;
    }
    r.prec_ = a.prec_ + s.valuation().value;
    for (const auto& [v, c] : a.terms_) r.add_term(v, s * c);
    return r;
  }

  DaggerSeries& operator+=(const DaggerSeries& o) { return *this = *this + o; }
  DaggerSeries& operator-=(const DaggerSeries& o) { return *this = *this - o; }
  DaggerSeries& operator*=(const DaggerSeries& o) { return *this = *this * o; }

  DaggerSeries pow(unsigned e) const {
    DaggerSeries r = one_like();
    DaggerSeries b = *this;
    while (e > 0) {
      if (e & 1u) r *= b;
      e >>= 1u;
      if (e) b *= b;
    }
    return r;
  }

  /// Partial derivative in variable i.
  DaggerSeries derivative(int i) const {
    DaggerSeries r = zero_like();
    for (const auto& [v, c] : terms_) {
      const int e = v[static_cast<std::size_t>(i)];
      if (e == 0) continue;
      Exponent w = v;
      w[static_cast<std::size_t>(i)] -= 1;
      r.add_term(std::move(w), PadicScalar::from_int(p_, e, prec_) * c);
    }
    return r;
  }

  /// Equality of the difference to zero at the joint precision.
  friend bool operator==(const DaggerSeries& a, const DaggerSeries& b) { return (a - b).is_zero(); }

  /// Canonical serialization: graded-lex monomials, exponent vector then scalar.
  std::string serialize() const {
    std::ostringstream os;
    os << "{";
    bool first = true;
    for (const auto& [v, c] : terms_) {
      if (!first) os << "; ";
      first = false;
      os << "[";
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
      os << "]:" << c.to_string();
    }
    os << "} + O(" << p_ << "^" << prec_ << ")";
    return os.str();
  }

 private:
  static void check_compatible(const DaggerSeries& a, const DaggerSeries& b) {
    if (a.p_ != b.p_) detail::fail("dagger_series", "PrimeMismatch", "series over different primes");
    if (a.nvars_ != b.nvars_ || a.inverted_ != b.inverted_)
      detail::fail("dagger_series", "ShapeMismatch", "series over different ambient rings");
  }

  long p_ = 2;
  int nvars_ = 0;
  int prec_ = 0;
  int cap_ = kNoDegreeCap;
  std::vector<bool> inverted_;
  TermMap terms_;
};

/// Gauss norm max |c_v|_p as an exact rational (0 for the zero series).
inline mpq_class gauss_norm(const DaggerSeries& f) {
  if (f.is_zero()) return 0;
  const int v = f.min_valuation();
  mpq_class r = 1;
  if (v > 0) r /= prime_power(f.prime(), v);
  if (v < 0) r *= prime_power(f.prime(), -v);
  return r;
}

/// Inverse of a series whose constant term is a unit.
///
/// Writing f = c (1 - h) with h of zero constant term, the inverse is
/// c^{-1} sum_k h^k; the sum is finite at truncation because every power of h
/// either gains a p-adic digit or pushes its support past the degree cap.
inline DaggerSeries invert_unit(const DaggerSeries& f) {
  const PadicScalar c = f.constant_term();
  if (c.is_zero() || c.valuation().value != 0)
    detail::fail("dagger_series", "NotAUnit", "constant term is not a p-adic unit");
  for (const auto& [v, a] : f.terms())
    if (a.valuation().value < 0) detail::fail("dagger_series", "NotAUnit", "non-integral coefficient");
  const PadicScalar cinv = c.inverse();
  const DaggerSeries h = f.one_like() - cinv * f;
  DaggerSeries sum = f.one_like();
  DaggerSeries term = f.one_like();
  const long limit = f.degree_cap() == kNoDegreeCap
                         ? 64L * (f.precision() + 1) * (f.degree() + 1)
                         : static_cast<long>(f.degree_cap() + 1) * (f.precision() + 1) + 1;
  for (long k = 0; k < limit; ++k) {
    term = term * h;
    if (term.is_zero()) return cinv * sum;
    sum += term;
  }
  detail::fail("dagger_series", "NotAUnit", "geometric series does not terminate at truncation");
}

/// Decay witness for sum_n (p f)^n given a witness for integral f: with N0 the
/// first degree past which C p^(-eps|v|) < p^(-eps|v|/2), the inverse decays
/// with eps' = min(eps/2, 1/N0) and bound 1.
inline DecayWitness inverse_decay_witness(long p, const DecayWitness& wf) {
  if (wf.eps <= 0) detail::fail("dagger_series", "BadWitness", "eps must be positive");
  const mpq_class half = wf.eps / 2;
  // smallest N0 >= 1 with C <= p^(eps N0 / 2), i.e. C^(2b) <= p^(a N0) for eps = a/b
  const mpz_class a = wf.eps.get_num(), b = wf.eps.get_den();
  mpq_class lhs = 1;
  for (unsigned long i = 0; i < 2 * b.get_ui(); ++i) lhs *= wf.bound;
  unsigned long n0 = 1;
  while (true) {
    mpz_class rhs;
    mpz_pow_ui(rhs.get_mpz_t(), mpz_class(p).get_mpz_t(), a.get_ui() * n0);
    if (lhs <= rhs) break;
    ++n0;
  }
  mpq_class inv(1, n0);
  inv.canonicalize();
  return {std::min(half, inv), mpq_class(1)};
}

/// True iff every retained coefficient satisfies |c_v| <= C p^(-eps |v|).
inline bool overconvergence_check(const DaggerSeries& f, const DecayWitness& w) {
  if (w.eps <= 0) detail::fail("dagger_series", "BadWitness", "eps must be positive");
  const mpz_class a = w.eps.get_num(), b = w.eps.get_den();
  mpq_class cb = 1;
  for (unsigned long i = 0; i < b.get_ui(); ++i) cb *= w.bound;
  for (const auto& [v, c] : f.terms()) {
    // p^(eps|v| - v(c)) <= C  <=>  p^(a|v| - b v(c)) <= C^b
    mpz_class e = a * total_degree(v) - b * c.valuation().value;
    mpq_class lhs = 1;
    mpz_class pe;
    if (e >= 0) {
      mpz_pow_ui(pe.get_mpz_t(), mpz_class(f.prime()).get_mpz_t(), e.get_ui());
      lhs = pe;
    } else {
      mpz_class ne = -e;
      mpz_pow_ui(pe.get_mpz_t(), mpz_class(f.prime()).get_mpz_t(), ne.get_ui());
      lhs = mpq_class(1) / pe;
    }
    if (lhs > cb) return false;
  }
  return true;
}

struct WeierstrassResult {
  DaggerSeries quotient;
  DaggerSeries remainder;
};

/// Division f = q g + r with deg r < d, for g distinguished of degree d
/// (g ≡ unit * xi^d mod p). Univariate, no inverted variable.
inline WeierstrassResult weierstrass_divide(const DaggerSeries& f, const DaggerSeries& g) {
  if (f.nvars() != 1 || g.nvars() != 1 || f.inverted()[0] || g.inverted()[0])
    detail::fail("dagger_series", "UnivariateOnly", "Weierstrass division needs one non-inverted variable");
  int d = -1;
  for (const auto& [v, c] : g.terms()) {
    if (c.valuation().value == 0) {
      d = v[0];
      break;
    }
  }
  if (d < 0) detail::fail("dagger_series", "NotDistinguished", "divisor vanishes modulo p");
  for (const auto& [v, c] : g.terms())
    if (c.valuation().value < 0) detail::fail("dagger_series", "NotDistinguished", "non-integral divisor");

  DaggerSeries low = g.zero_like();
  DaggerSeries high = g.zero_like();  // g / xi^d minus the low part
  for (const auto& [v, c] : g.terms()) {
    if (v[0] < d)
      low.add_term(v, c);
    else
      high.add_term(Exponent{v[0] - d}, c);
  }
  for (const auto& [v, c] : high.terms())
    if (v[0] > 0 && c.valuation().value == 0)
      detail::fail("dagger_series", "NotDistinguished", "divisor is not a unit times xi^d modulo p");
  const DaggerSeries uinv = invert_unit(high);

  DaggerSeries q = f.zero_like(), r = f.zero_like(), cur = f;
  const int limit = f.precision() - std::min(0, f.min_valuation()) + 2;
  for (int it = 0; it <= limit && !cur.is_zero(); ++it) {
    DaggerSeries top = cur.zero_like();
    for (const auto& [v, c] : cur.terms()) {
      if (v[0] < d)
        r.add_term(v, c);
      else
        top.add_term(Exponent{v[0] - d}, c);
    }
    const DaggerSeries t = top * uinv;
    q += t;
    cur = -(t * low);
  }
  if (!cur.is_zero()) detail::fail("dagger_series", "NotDistinguished", "division did not converge");
  return {q, r};
}

}  // namespace mwzeta
