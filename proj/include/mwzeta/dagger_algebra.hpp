#pragma once

// Presentations T_n^dagger / I of weakly complete algebras, their localizations
// and products, and the de Rham complex built on the free module of dξ_i.

#include <gmpxx.h>

#include <algorithm>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "mwzeta/dagger_series.hpp"
#include "mwzeta/error.hpp"
#include "mwzeta/padic.hpp"
#include "mwzeta/padic_poly.hpp"
#include "mwzeta/rational.hpp"

namespace mwzeta {

enum class Family { AffineLine, Torus, Hyperelliptic, Generic };

inline std::string to_string(Family f) {
  switch (f) {
    case Family::AffineLine: return "affine_line";
    case Family::Torus: return "torus";
    case Family::Hyperelliptic: return "hyperelliptic";
    case Family::Generic: return "generic";
  }
  return "generic";
}

namespace detail {

inline std::vector<long> reduce_mod_p(const std::vector<mpz_class>& a, long p) {
  std::vector<long> r;
  for (const auto& c : a) {
    mpz_class m = c % p;
    if (m < 0) m += p;
    r.push_back(m.get_si());
  }
  while (!r.empty() && r.back() == 0) r.pop_back();
  return r;
}

inline long inv_mod(long a, long p) {
  long r = 1, b = a % p, e = p - 2;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

inline std::vector<long> rem_mod_p(std::vector<long> a, const std::vector<long>& b, long p) {
  const long inv = inv_mod(b.back(), p);
  while (a.size() >= b.size()) {
    const long c = a.back() * inv % p;
    const std::size_t shift = a.size() - b.size();
    for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = ((a[shift + i] - c * b[i]) % p + p) % p;
    while (!a.empty() && a.back() == 0) a.pop_back();
  }
  return a;
}

}  // namespace detail

/// gcd(f, f') = 1 over F_p, with f reduced modulo p.
inline bool is_squarefree_mod_p(const std::vector<mpz_class>& f, long p) {
  std::vector<long> a = detail::reduce_mod_p(f, p);
  if (a.empty()) return false;
  std::vector<long> b;
  for (std::size_t i = 1; i < a.size(); ++i) b.push_back(static_cast<long>(i % static_cast<std::size_t>(p)) * a[i] % p);
  while (!b.empty() && b.back() == 0) b.pop_back();
  if (b.empty()) return a.size() == 1;
  while (!b.empty()) {
    std::vector<long> r = detail::rem_mod_p(a, b, p);
    a = std::move(b);
    b = std::move(r);
  }
  return a.size() == 1;
}

/// A quotient of T_n^dagger (with some coordinates inverted) by finitely many relations.
///
/// For the hyperelliptic family the variables are (x, y) with y inverted and the
/// single relation y^2 - f(x); its degree cap bounds the pole order in y, and
/// elements are kept in the canonical form described at `normalize`.
struct AlgebraPresentation {
  PadicContext ctx;
  int nvars = 0;
  std::vector<bool> inverted;
  std::vector<DaggerSeries> relations;
  Family family = Family::Generic;
  int degree_cap = kNoDegreeCap;
  int genus = 0;
  std::vector<mpz_class> curve;  // f(x) ascending, hyperelliptic only

  long prime() const { return ctx.p; }

  int series_cap() const { return family == Family::Hyperelliptic ? kNoDegreeCap : degree_cap; }

  DaggerSeries zero() const { return DaggerSeries(ctx, nvars, inverted, series_cap()); }

  DaggerSeries constant(const PadicScalar& c) const {
    DaggerSeries s = zero();
    s.add_term(Exponent(static_cast<std::size_t>(nvars), 0), c);
    return s;
  }

  DaggerSeries one() const { return constant(ctx.one()); }

  DaggerSeries monomial(Exponent v, const PadicScalar& c) const {
    DaggerSeries s = zero();
    s.add_term(std::move(v), c);
    return normalize(s);
  }

  DaggerSeries variable(int i) const {
    Exponent v(static_cast<std::size_t>(nvars), 0);
    v[static_cast<std::size_t>(i)] = 1;
    return monomial(std::move(v), ctx.one());
  }

  /// Canonical representative: identity except on hyperelliptic algebras.
  DaggerSeries normalize(const DaggerSeries& a) const;

  DaggerSeries mul(const DaggerSeries& a, const DaggerSeries& b) const;
};

inline AlgebraPresentation trivial_algebra(PadicContext ctx) {
  AlgebraPresentation a;
  a.ctx = ctx;
  a.family = Family::Generic;
  return a;
}

inline AlgebraPresentation affine_line(PadicContext ctx, int degree_cap) {
  AlgebraPresentation a;
  a.ctx = ctx;
  a.nvars = 1;
  a.inverted = {false};
  a.family = Family::AffineLine;
  a.degree_cap = degree_cap;
  return a;
}

inline AlgebraPresentation torus(PadicContext ctx, int degree_cap) {
  AlgebraPresentation a = affine_line(ctx, degree_cap);
  a.inverted = {true};
  a.family = Family::Torus;
  return a;
}

/// y^2 = f(x) with y inverted; f ascending integer coefficients of degree 2g+1,
/// squarefree modulo an odd p with unit leading coefficient. The cap bounds the y-pole order.
inline AlgebraPresentation hyperelliptic(PadicContext ctx, std::vector<mpz_class> f, int pole_cap) {
  while (!f.empty() && f.back() == 0) f.pop_back();
  const long p = ctx.p;
  if (p == 2) detail::fail("dagger_algebra", "UnsupportedPrime", "hyperelliptic reduction needs an odd prime");
  if (f.size() < 2 || f.size() % 2 != 0)
    detail::fail("dagger_algebra", "DegreeMismatch", "f must have odd degree 2g+1 >= 1");
  if (f.back() % p == 0) detail::fail("dagger_algebra", "DegreeMismatch", "leading coefficient of f vanishes mod p");
  if (!is_squarefree_mod_p(f, p)) detail::fail("dagger_algebra", "NotSquarefree", "f is not squarefree mod p");
  AlgebraPresentation a;
  a.ctx = ctx;
  a.nvars = 2;
  a.inverted = {false, true};
  a.family = Family::Hyperelliptic;
  a.degree_cap = pole_cap;
  a.genus = static_cast<int>(f.size() - 2) / 2;
  a.curve = f;
  DaggerSeries rel(ctx, 2, a.inverted);
  rel.add_term({0, 2}, ctx.one());
  for (std::size_t i = 0; i < f.size(); ++i) rel.add_term({static_cast<int>(i), 0}, -ctx.integer(f[i]));
  a.relations.push_back(rel);
  return a;
}

inline AlgebraPresentation generic_presentation(PadicContext ctx, int nvars, std::vector<bool> inverted,
                                                std::vector<DaggerSeries> relations, int degree_cap) {
  AlgebraPresentation a;
  a.ctx = ctx;
  a.nvars = nvars;
  a.inverted = std::move(inverted);
  if (a.inverted.empty()) a.inverted.assign(static_cast<std::size_t>(nvars), false);
  a.relations = std::move(relations);
  a.degree_cap = degree_cap;
  for (const auto& r : a.relations)
    if (r.prime() != ctx.p) detail::fail("dagger_algebra", "PrimeMismatch", "relation over a different prime");
  return a;
}

// ---------------------------------------------------------------------------
// Hyperelliptic canonical form.
//
// An element is sum_e P_e(x) y^e. Since f = y^2 is a unit, the ring splits as
// Z_p<x, 1/f> + y Z_p<x, 1/f>, and the representation is unique when P_0 and
// P_1 are arbitrary while every P_e with e < 0 has degree at most 2g.

namespace hyper {

using Levels = std::map<int, PadicPoly>;  // y-exponent -> coefficient in x

/// Data derived from f once per precision: f, f', and R, S with R f + S f' = 1.
struct Curve {
  PadicContext ctx;
  int genus = 0;
  PadicPoly f, df, bezout_f, bezout_df;

  static const Curve& from(const AlgebraPresentation& a) {
    thread_local std::map<std::string, Curve> cache;
    std::string key = std::to_string(a.ctx.p) + "/" + std::to_string(a.ctx.precision);
    for (const auto& x : a.curve) key += "," + x.get_str();
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, build(a)).first;
    return it->second;
  }

 private:
  static Curve build(const AlgebraPresentation& a) {
    Curve c;
    c.ctx = a.ctx;
    c.genus = a.genus;
    c.f = PadicPoly::from_integers(a.ctx, a.curve);
    c.df = c.f.derivative();
    RationalPoly fq = from_integers(a.curve);
    BezoutResult b = poly_xgcd(fq, series_derivative(fq));
    if (b.gcd.size() != 1) detail::fail("dagger_algebra", "NotSquarefree", "f is not squarefree");
    std::vector<PadicScalar> r, s;
    for (const auto& q : b.s) r.push_back(a.ctx.rational(q));
    for (const auto& q : b.t) s.push_back(a.ctx.rational(q));
    c.bezout_f = PadicPoly(a.ctx, std::move(r));
    c.bezout_df = PadicPoly(a.ctx, std::move(s));
    return c;
  }
};

inline void add_level(Levels& L, int e, const PadicPoly& a) {
  if (a.is_zero() && a.precision() >= a.context().precision) return;
  auto it = L.find(e);
  if (it == L.end())
    L.emplace(e, a);
  else
    it->second += a;
}

/// Canonical form, dropping levels with pole order beyond the cap.
inline Levels canonical(const Curve& c, Levels L, int pole_cap) {
  // fold y^e for e >= 2 down through y^2 = f
  while (!L.empty() && L.rbegin()->first >= 2) {
    auto it = std::prev(L.end());
    const int e = it->first;
    PadicPoly a = std::move(it->second);
    L.erase(it);
    add_level(L, e - 2, a * c.f);
  }
  // negative levels: keep the remainder mod f, push the quotient up by y^2
  for (auto it = L.begin(); it != L.end() && it->first < 0; ++it) {
    if (it->second.degree() <= 2 * c.genus) continue;
    auto [q, r] = divmod(it->second, c.f);
    it->second = r;
    add_level(L, it->first + 2, q);
  }
  for (auto it = L.begin(); it != L.end();) {
    if (-it->first > pole_cap || (it->second.is_zero() && it->second.precision() >= c.ctx.precision))
      it = L.erase(it);
    else
      ++it;
  }
  return L;
}

inline Levels multiply(const Curve& c, const Levels& a, const Levels& b, int pole_cap) {
  Levels r;
  for (const auto& [ea, pa] : a)
    for (const auto& [eb, pb] : b) add_level(r, ea + eb, pa * pb);
  return canonical(c, std::move(r), pole_cap);
}

inline Levels to_levels(const DaggerSeries& a, const PadicContext& ctx) {
  Levels L;
  for (const auto& [v, c] : a.terms()) {
    auto it = L.find(v[1]);
    if (it == L.end()) it = L.emplace(v[1], PadicPoly(ctx)).first;
    it->second.add_coeff(v[0], c);
  }
  if (a.precision() < ctx.precision) {
    // series-level precision floor travels with the constant level
    auto it = L.find(0);
    if (it == L.end()) it = L.emplace(0, PadicPoly(ctx)).first;
    it->second = it->second.with_precision(a.precision());
  }
  return L;
}

inline DaggerSeries from_levels(const Levels& L, const AlgebraPresentation& a) {
  DaggerSeries s = a.zero();
  int floor = a.ctx.precision;
  for (const auto& [e, poly] : L) {
    floor = std::min(floor, poly.precision());
    for (int i = 0; i <= poly.degree(); ++i)
      if (!poly[i].is_zero()) s.add_term({i, e}, poly[i]);
  }
  return s.with_precision(floor);
}

}  // namespace hyper

inline DaggerSeries AlgebraPresentation::normalize(const DaggerSeries& a) const {
  if (family != Family::Hyperelliptic) return a;
  const hyper::Curve& c = hyper::Curve::from(*this);
  return hyper::from_levels(hyper::canonical(c, hyper::to_levels(a, ctx), degree_cap), *this);
}

inline DaggerSeries AlgebraPresentation::mul(const DaggerSeries& a, const DaggerSeries& b) const {
  if (family != Family::Hyperelliptic) return a * b;
  const hyper::Curve& c = hyper::Curve::from(*this);
  return hyper::from_levels(hyper::multiply(c, hyper::to_levels(a, ctx), hyper::to_levels(b, ctx), degree_cap),
                            *this);
}

// ---------------------------------------------------------------------------

/// A^dagger<f^-1> as A<xi>/(f xi - 1). A monomial f = c * xi_i^k with c a unit
/// instead marks xi_i as inverted.
inline AlgebraPresentation localize(const AlgebraPresentation& A, const DaggerSeries& f) {
  if (f.nvars() != A.nvars) detail::fail("dagger_algebra", "ShapeMismatch", "localizing element lives elsewhere");
  bool vanishes = true;
  for (const auto& [v, c] : f.terms())
    if (c.valuation().value <= 0) vanishes = false;
  if (vanishes) detail::fail("dagger_algebra", "ZeroDivisorLocalization", "f vanishes modulo p");

  if (f.terms().size() == 1) {
    const auto& [v, c] = *f.terms().begin();
    int nonzero = 0, idx = -1;
    for (int i = 0; i < A.nvars; ++i)
      if (v[static_cast<std::size_t>(i)] != 0) ++nonzero, idx = i;
    if (c.valuation().value == 0 && nonzero <= 1) {
      AlgebraPresentation B = A;
      if (nonzero == 0) return B;  // a unit: nothing to invert
      if (A.family == Family::Hyperelliptic && idx == 0) {
        B.family = Family::Generic;
        B.genus = 0;
        B.curve.clear();
      }
      B.inverted[static_cast<std::size_t>(idx)] = true;
      if (A.family == Family::AffineLine) B.family = Family::Torus;
      return B;
    }
  }

  AlgebraPresentation B;
  B.ctx = A.ctx;
  B.nvars = A.nvars + 1;
  B.inverted = A.inverted;
  B.inverted.push_back(false);
  B.degree_cap = A.degree_cap;
  B.family = Family::Generic;
  auto lift = [&](const DaggerSeries& s, int shift_last) {
    DaggerSeries r(A.ctx, B.nvars, B.inverted, B.series_cap());
    for (const auto& [v, c] : s.terms()) {
      Exponent w = v;
      w.push_back(shift_last);
      r.add_term(std::move(w), c);
    }
    return r;
  };
  for (const auto& r : A.relations) B.relations.push_back(lift(r, 0));
  DaggerSeries rel = lift(f, 1);
  Exponent zero(static_cast<std::size_t>(B.nvars), 0);
  rel.add_term(zero, -A.ctx.one());
  B.relations.push_back(rel);
  return B;
}

/// Completed tensor product: variables and relations side by side.
inline AlgebraPresentation product(const AlgebraPresentation& A, const AlgebraPresentation& B) {
  if (A.ctx.p != B.ctx.p) detail::fail("dagger_algebra", "PrimeMismatch", "factors over different primes");
  if (B.nvars == 0 && B.relations.empty()) return A;
  if (A.nvars == 0 && A.relations.empty()) return B;
  AlgebraPresentation P;
  P.ctx = {A.ctx.p, std::min(A.ctx.precision, B.ctx.precision)};
  P.nvars = A.nvars + B.nvars;
  P.inverted = A.inverted;
  P.inverted.insert(P.inverted.end(), B.inverted.begin(), B.inverted.end());
  P.degree_cap = std::min(A.degree_cap, B.degree_cap);
  P.family = Family::Generic;
  auto embed = [&](const DaggerSeries& s, int offset) {
    DaggerSeries r(P.ctx, P.nvars, P.inverted, P.series_cap());
    for (const auto& [v, c] : s.terms()) {
      Exponent w(static_cast<std::size_t>(P.nvars), 0);
      for (std::size_t i = 0; i < v.size(); ++i) w[i + static_cast<std::size_t>(offset)] = v[i];
      r.add_term(std::move(w), c);
    }
    return r;
  };
  for (const auto& r : A.relations) P.relations.push_back(embed(r, 0));
  for (const auto& r : B.relations) P.relations.push_back(embed(r, A.nvars));
  return P;
}

// ---------------------------------------------------------------------------
// Differential forms.

/// sum over increasing index sets I of a_I dxi_I; degree-0 forms use the empty set.
struct DifferentialForm {
  int degree = 0;
  std::map<std::vector<int>, DaggerSeries> coeffs;

  static DifferentialForm function(const DaggerSeries& a) {
    DifferentialForm w;
    w.coeffs.emplace(std::vector<int>{}, a);
    return w;
  }

  static DifferentialForm one_form(int var, const DaggerSeries& a) {
    DifferentialForm w;
    w.degree = 1;
    w.coeffs.emplace(std::vector<int>{var}, a);
    return w;
  }

  DaggerSeries coeff(const std::vector<int>& wedge, const DaggerSeries& zero) const {
    auto it = coeffs.find(wedge);
    return it == coeffs.end() ? zero : it->second;
  }

  bool is_zero() const {
    for (const auto& [k, c] : coeffs)
      if (!c.is_zero()) return false;
    return true;
  }

  void add(const std::vector<int>& wedge, const DaggerSeries& a) {
    auto it = coeffs.find(wedge);
    if (it == coeffs.end())
      coeffs.emplace(wedge, a);
    else
      it->second += a;
  }

  friend DifferentialForm operator+(DifferentialForm a, const DifferentialForm& b) {
    if (a.coeffs.empty()) a.degree = b.degree;
    if (!b.coeffs.empty() && !a.coeffs.empty() && a.degree != b.degree)
      detail::fail("dagger_algebra", "DegreeMismatch", "adding forms of different degree");
    for (const auto& [k, c] : b.coeffs) a.add(k, c);
    return a;
  }

  DifferentialForm operator-() const {
    DifferentialForm r = *this;
    for (auto& [k, c] : r.coeffs) c = -c;
    return r;
  }

  friend DifferentialForm operator-(const DifferentialForm& a, const DifferentialForm& b) { return a + (-b); }

  friend DifferentialForm operator*(const PadicScalar& s, DifferentialForm a) {
    for (auto& [k, c] : a.coeffs) c = s * c;
    return a;
  }

  std::string serialize() const {
    std::ostringstream os;
    os << "deg " << degree << ":";
    for (const auto& [k, c] : coeffs) {
      os << " d[";
      for (std::size_t i = 0; i < k.size(); ++i) os << (i ? "," : "") << k[i];
      os << "] " << c.serialize();
    }
    return os.str();
  }
};

/// Multiplies every coefficient by a and normalizes.
inline DifferentialForm scale(const AlgebraPresentation& A, const DaggerSeries& a, const DifferentialForm& w) {
  DifferentialForm r;
  r.degree = w.degree;
  for (const auto& [k, c] : w.coeffs) r.coeffs.emplace(k, A.mul(a, c));
  return r;
}

inline DifferentialForm normalize(const AlgebraPresentation& A, const DifferentialForm& w) {
  DifferentialForm r;
  r.degree = w.degree;
  for (const auto& [k, c] : w.coeffs) {
    DaggerSeries n = A.normalize(c);
    if (!n.is_zero() || n.precision() < A.ctx.precision) r.coeffs.emplace(k, std::move(n));
  }
  return r;
}

/// Equality of two forms at joint precision after normalization.
inline bool forms_equal(const AlgebraPresentation& A, const DifferentialForm& a, const DifferentialForm& b) {
  return normalize(A, a - b).is_zero();
}

/// Wedge product of forms on the free module (no relation elimination).
inline DifferentialForm wedge(const AlgebraPresentation& A, const DifferentialForm& a, const DifferentialForm& b) {
  DifferentialForm r;
  r.degree = a.degree + b.degree;
  for (const auto& [I, ca] : a.coeffs) {
    for (const auto& [J, cb] : b.coeffs) {
      std::vector<int> K = I;
      K.insert(K.end(), J.begin(), J.end());
      // sign of the sorting permutation; repeated indices vanish
      int inversions = 0;
      for (std::size_t i = 0; i < K.size(); ++i)
        for (std::size_t j = i + 1; j < K.size(); ++j) {
          if (K[i] == K[j]) inversions = -1;
          if (inversions >= 0 && K[i] > K[j]) ++inversions;
        }
      if (inversions < 0) continue;
      std::sort(K.begin(), K.end());
      DaggerSeries c = A.mul(ca, cb);
      r.add(K, inversions % 2 ? -c : c);
    }
  }
  return r;
}

/// Exterior derivative. On hyperelliptic algebras dy is eliminated through
/// 2y dy = f'(x) dx, so Omega^1 is free on dx and Omega^2 vanishes.
inline DifferentialForm d(const AlgebraPresentation& A, const DifferentialForm& w) {
  DifferentialForm r;
  r.degree = w.degree + 1;
  if (A.family == Family::Hyperelliptic) {
    if (w.degree >= 1) return r;
    const DaggerSeries a = w.coeff({}, A.zero());
    const hyper::Curve& c = hyper::Curve::from(A);
    // dy = (f'/2) y^-1 dx
    DaggerSeries dy_coeff = A.zero();
    const PadicScalar half = A.ctx.rational(mpq_class(1, 2));
    for (int i = 0; i <= c.df.degree(); ++i)
      if (!c.df[i].is_zero()) dy_coeff.add_term({i, -1}, half * c.df[i]);
    DaggerSeries coeff = a.derivative(0) + A.mul(a.derivative(1), dy_coeff);
    r.coeffs.emplace(std::vector<int>{0}, A.normalize(coeff));
    return r;
  }
  for (const auto& [I, a] : w.coeffs) {
    for (int j = 0; j < A.nvars; ++j) {
      if (std::find(I.begin(), I.end(), j) != I.end()) continue;
      DaggerSeries da = a.derivative(j);
      if (da.is_zero()) continue;
      std::vector<int> K = I;
      const long before = std::count_if(I.begin(), I.end(), [j](int i) { return i < j; });
      K.push_back(j);
      std::sort(K.begin(), K.end());
      r.add(K, before % 2 ? -da : da);
    }
  }
  return normalize(A, r);
}

inline DifferentialForm d(const AlgebraPresentation& A, const DaggerSeries& a) {
  return d(A, DifferentialForm::function(a));
}

/// Omega^1 as generators dxi_1..dxi_n modulo the relation forms d(r).
struct Omega1Presentation {
  int generators = 0;
  std::vector<DifferentialForm> relation_forms;
  std::vector<int> eliminated;  // generators solved for by a relation form
  int rank = 0;
};

inline Omega1Presentation omega1_presentation(const AlgebraPresentation& A) {
  Omega1Presentation o;
  o.generators = A.nvars;
  AlgebraPresentation free = A;
  free.family = Family::Generic;  // plain exterior derivative of each relation
  for (const auto& r : A.relations) {
    DifferentialForm dr = d(free, r);
    o.relation_forms.push_back(dr);
    // eliminate the last generator whose coefficient is present and not yet used
    for (auto it = dr.coeffs.rbegin(); it != dr.coeffs.rend(); ++it) {
      const int g = it->first.front();
      if (std::find(o.eliminated.begin(), o.eliminated.end(), g) == o.eliminated.end() && !it->second.is_zero()) {
        o.eliminated.push_back(g);
        break;
      }
    }
  }
  o.rank = o.generators - static_cast<int>(o.eliminated.size());
  return o;
}

/// Omega^0 -> Omega^1 -> ... with ranks and the differential.
struct DeRhamComplex {
  AlgebraPresentation algebra;
  std::vector<int> ranks;

  DifferentialForm differential(const DifferentialForm& w) const { return d(algebra, w); }
  int length() const { return static_cast<int>(ranks.size()); }
};

inline DeRhamComplex derham_complex(const AlgebraPresentation& A) {
  if (A.family == Family::Generic)
    detail::fail("dagger_algebra", "UnsupportedFamily", "de Rham complex needs a supported family");
  return {A, {1, 1}};
}

// ---------------------------------------------------------------------------
// Substitutions xi_i -> image_i between presentations.

struct Substitution {
  AlgebraPresentation source;
  AlgebraPresentation target;
  std::vector<DaggerSeries> images;                        // in target
  std::vector<std::optional<DaggerSeries>> inverse_images;  // for inverted source variables
};

namespace detail {

inline DaggerSeries power_of(const Substitution& s, int var, int e, std::map<std::pair<int, int>, DaggerSeries>& cache) {
  auto key = std::make_pair(var, e);
  if (auto it = cache.find(key); it != cache.end()) return it->second;
  DaggerSeries r = s.target.one();
  if (e != 0) {
    const DaggerSeries& base = e > 0 ? s.images[static_cast<std::size_t>(var)]
                                     : [&]() -> const DaggerSeries& {
                                         const auto& inv = s.inverse_images[static_cast<std::size_t>(var)];
                                         if (!inv) fail("dagger_algebra", "MissingInverse", "inverse image not provided");
                                         return *inv;
                                       }();
    const int step = e > 0 ? 1 : -1;
    r = s.target.mul(power_of(s, var, e - step, cache), base);
  }
  cache.emplace(key, r);
  return r;
}

}  // namespace detail

inline DaggerSeries apply(const Substitution& s, const DaggerSeries& a) {
  std::map<std::pair<int, int>, DaggerSeries> cache;
  DaggerSeries r = s.target.zero();
  for (const auto& [v, c] : a.terms()) {
    DaggerSeries t = s.target.constant(c);
    for (std::size_t i = 0; i < v.size(); ++i)
      if (v[i] != 0) t = s.target.mul(t, detail::power_of(s, static_cast<int>(i), v[i], cache));
    r += t;
  }
  if (a.precision() < r.precision()) r = r.with_precision(a.precision());
  return s.target.normalize(r);
}

/// Pullback of a form: substitute coefficients and replace dxi_i by d(image_i).
inline DifferentialForm pullback(const Substitution& s, const DifferentialForm& w) {
  DifferentialForm r;
  r.degree = w.degree;
  std::vector<DifferentialForm> dimg;
  for (const auto& img : s.images) dimg.push_back(d(s.target, img));
  for (const auto& [I, a] : w.coeffs) {
    DifferentialForm term = DifferentialForm::function(apply(s, a));
    for (int i : I) term = wedge(s.target, term, dimg[static_cast<std::size_t>(i)]);
    r = r + term;
  }
  r.degree = w.degree;
  return normalize(s.target, r);
}

}  // namespace mwzeta
