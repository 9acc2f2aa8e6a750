#pragma once

// Frobenius lifts on the supported families and the operator psi, the
// trace-then-untwist map normalized by psi(F(a) w) = a psi(w) and psi(F(a)) = p a.

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "mwzeta/dagger_algebra.hpp"
#include "mwzeta/dagger_series.hpp"
#include "mwzeta/error.hpp"
#include "mwzeta/padic.hpp"
#include "mwzeta/padic_poly.hpp"

namespace mwzeta {

struct FrobeniusLift {
  AlgebraPresentation algebra;
  std::vector<DaggerSeries> images;
  std::vector<std::optional<DaggerSeries>> inverse_images;
  PadicPoly x_image;  // F(x) as a polynomial in x (every supported family)
  bool standard = true;  // F(x) = x^p
};

namespace hyper {

/// c_j(k) = binom(-k/2, j) (-1)^j, the coefficients of (1 - z)^(-k/2).
inline std::vector<mpq_class> half_binomials(int k, int count) {
  std::vector<mpq_class> c;
  mpq_class a(-k, 2), b = 1;
  for (int j = 0; j < count; ++j) {
    c.push_back(j % 2 ? -b : b);
    b = b * (a - j) / (j + 1);
  }
  return c;
}

/// binom(e/2, j): coefficients of (1 + z)^(e/2).
inline std::vector<mpq_class> binomials(int e, int count) {
  std::vector<mpq_class> c;
  mpq_class a(e, 2), b = 1;
  for (int j = 0; j < count; ++j) {
    c.push_back(b);
    b = b * (a - j) / (j + 1);
  }
  return c;
}

/// F(y)^e = y^(pe) (1 + E y^(-2p))^(e/2) with E = f(F(x)) - f(x)^p, in canonical form.
inline Levels lifted_y_power(const Curve& c, const PadicPoly& fx, int e, int pole_cap) {
  const long p = c.ctx.p;
  const PadicPoly E = c.f.compose(fx) - c.f.pow(static_cast<unsigned>(p));
  Levels L;
  const int terms = c.ctx.precision + 1;
  const auto coeff = binomials(e, terms);
  PadicPoly Ej = PadicPoly::monomial(c.ctx, 0, c.ctx.one());
  // every term is kept until E^j vanishes at precision; the cap applies after normalization
  for (int j = 0; j < terms; ++j) {
    const int level = static_cast<int>(p) * (e - 2 * j);
    add_level(L, level, c.ctx.rational(coeff[static_cast<std::size_t>(j)]) * Ej);
    Ej = Ej * E;
    if (Ej.is_zero()) break;
  }
  return canonical(c, std::move(L), pole_cap);
}

}  // namespace hyper

inline FrobeniusLift lift_with_x_image(const AlgebraPresentation& A, const PadicPoly& fx) {
  FrobeniusLift F;
  F.algebra = A;
  F.x_image = fx;
  const long p = A.ctx.p;
  F.standard = fx == PadicPoly::monomial(A.ctx, static_cast<int>(p), A.ctx.one());
  auto as_series = [&](const PadicPoly& q) {
    DaggerSeries s = A.zero();
    for (int i = 0; i <= q.degree(); ++i) {
      Exponent v(static_cast<std::size_t>(A.nvars), 0);
      v[0] = i;
      if (!q[i].is_zero()) s.add_term(std::move(v), q[i]);
    }
    return s;
  };
  switch (A.family) {
    case Family::AffineLine:
      F.images = {as_series(fx)};
      F.inverse_images = {std::nullopt};
      break;
    case Family::Torus: {
      if (!F.standard) detail::fail("frobenius_psi", "UnsupportedLift", "torus lifts are monomial");
      F.images = {A.monomial({static_cast<int>(p)}, A.ctx.one())};
      F.inverse_images = {A.monomial({-static_cast<int>(p)}, A.ctx.one())};
      break;
    }
    case Family::Hyperelliptic: {
      const hyper::Curve& c = hyper::Curve::from(A);
      F.images = {A.normalize(as_series(fx)), hyper::from_levels(hyper::lifted_y_power(c, fx, 1, A.degree_cap), A)};
      F.inverse_images = {std::nullopt, hyper::from_levels(hyper::lifted_y_power(c, fx, -1, A.degree_cap), A)};
      break;
    }
    case Family::Generic:
      detail::fail("frobenius_psi", "UnsupportedFamily", "no Frobenius lift for a generic presentation");
  }
  return F;
}

/// F(x) = x^p on every supported family, with F(y) from the binomial square root.
inline FrobeniusLift default_lift(const AlgebraPresentation& A) {
  if (A.family == Family::Generic)
    detail::fail("frobenius_psi", "UnsupportedFamily", "no Frobenius lift for a generic presentation");
  return lift_with_x_image(A, PadicPoly::monomial(A.ctx, static_cast<int>(A.ctx.p), A.ctx.one()));
}

/// The standard lift precomposed with x -> x + p u(x): F(x) = (x + p u(x))^p.
inline FrobeniusLift substituted_lift(const AlgebraPresentation& A, const PadicPoly& u) {
  const PadicContext& ctx = A.ctx;
  PadicPoly shift = PadicPoly::monomial(ctx, 1, ctx.one()) + ctx.integer(ctx.p) * u;
  return lift_with_x_image(A, shift.pow(static_cast<unsigned>(ctx.p)));
}

/// F(a): substitute the lifted coordinates.
inline DaggerSeries apply_lift(const FrobeniusLift& F, const DaggerSeries& a) {
  const AlgebraPresentation& A = F.algebra;
  if (A.family != Family::Hyperelliptic) {
    Substitution s{A, A, F.images, F.inverse_images};
    return apply(s, a);
  }
  const hyper::Curve& c = hyper::Curve::from(A);
  const hyper::Levels La = hyper::to_levels(A.normalize(a), A.ctx);
  hyper::Levels fy_pos = hyper::to_levels(F.images[1], A.ctx);
  hyper::Levels fy_neg = hyper::to_levels(*F.inverse_images[1], A.ctx);
  hyper::Levels r;
  std::map<int, hyper::Levels> powers;
  powers[0] = {{0, PadicPoly::monomial(A.ctx, 0, A.ctx.one())}};
  auto power = [&](int e) -> const hyper::Levels& {
    const int step = e > 0 ? 1 : -1;
    for (int k = step; k != e + step; k += step)
      if (!powers.count(k)) powers[k] = hyper::multiply(c, powers[k - step], e > 0 ? fy_pos : fy_neg, A.degree_cap);
    return powers[e];
  };
  for (const auto& [e, P] : La) {
    const PadicPoly Px = P.compose(F.x_image);
    for (const auto& [le, lp] : power(e)) hyper::add_level(r, le, Px * lp);
  }
  return hyper::from_levels(hyper::canonical(c, std::move(r), A.degree_cap), A);
}

/// F^*(w): substitute in coefficients and replace dxi_i by d(F(xi_i)).
inline DifferentialForm frobenius_pullback(const FrobeniusLift& F, const DifferentialForm& w) {
  const AlgebraPresentation& A = F.algebra;
  if (A.family != Family::Hyperelliptic) {
    Substitution s{A, A, F.images, F.inverse_images};
    return pullback(s, w);
  }
  if (w.degree == 0) return DifferentialForm::function(apply_lift(F, w.coeff({}, A.zero())));
  DaggerSeries dfx = A.zero();
  const PadicPoly der = F.x_image.derivative();
  for (int i = 0; i <= der.degree(); ++i)
    if (!der[i].is_zero()) dfx.add_term({i, 0}, der[i]);
  return DifferentialForm::one_form(0, A.mul(apply_lift(F, w.coeff({0}, A.zero())), dfx));
}

namespace hyper {

/// psi of P(x) y^(-k) (as a function when `form` is false, or times dx), for the
/// standard lift. Uses y^(-k) = f^((p-1)k/2) sum_j c_j(k) E^j F(y)^(-k-2j).
inline Levels psi_level(const Curve& c, const PadicPoly& P, int k, bool form, int pole_cap) {
  const long p = c.ctx.p;
  Levels out;
  if (k == 0) {
    if (form)
      add_level(out, 0, P.section(p, static_cast<int>(p) - 1));
    else
      add_level(out, 0, c.ctx.integer(p) * P.section(p, 0));
    return out;
  }
  const PadicPoly E = c.f.inflate(p) - c.f.pow(static_cast<unsigned>(p));
  const int terms = (pole_cap - k) / 2 + 1;
  const auto coeff = half_binomials(k, std::max(terms, 1));
  PadicPoly Q = P * c.f.pow(static_cast<unsigned>((p - 1) * k / 2));
  for (int j = 0; j < terms; ++j) {
    if (Q.is_zero()) break;
    PadicPoly sec = form ? Q.section(p, static_cast<int>(p) - 1) : c.ctx.integer(p) * Q.section(p, 0);
    add_level(out, -(k + 2 * j), c.ctx.rational(coeff[static_cast<std::size_t>(j)]) * sec);
    Q = Q * E;
  }
  return out;
}

inline Levels psi(const Curve& c, const Levels& L, bool form, int pole_cap) {
  Levels out;
  for (const auto& [e, P] : L) {
    Levels part;
    if (e == 1)
      part = psi_level(c, P * c.f, 1, form, pole_cap);
    else if (e <= 0)
      part = psi_level(c, P, -e, form, pole_cap);
    else
      detail::fail("frobenius_psi", "NotCanonical", "element is not in canonical form");
    for (auto& [le, lp] : part) add_level(out, le, lp);
  }
  return canonical(c, std::move(out), pole_cap);
}

}  // namespace hyper

/// psi on functions of the affine line or torus: x^m -> p x^(m/p) if p | m, else 0.
inline DaggerSeries psi_series(const AlgebraPresentation& A, const DaggerSeries& a) {
  const long p = A.ctx.p;
  if (A.family == Family::Hyperelliptic) {
    const hyper::Curve& c = hyper::Curve::from(A);
    return hyper::from_levels(hyper::psi(c, hyper::to_levels(A.normalize(a), A.ctx), false, A.degree_cap), A);
  }
  if (A.family != Family::AffineLine && A.family != Family::Torus)
    detail::fail("frobenius_psi", "UnsupportedFamily", "psi needs a supported family");
  DaggerSeries r = A.zero().with_precision(a.precision());
  const PadicScalar pp = A.ctx.integer(p);
  for (const auto& [v, c] : a.terms())
    if (v[0] % p == 0) r.add_term({static_cast<int>(v[0] / p)}, pp * c);
  return r;
}

/// psi on forms of degree <= 1: x^m dx -> x^((m+1)/p - 1) dx if p | m+1, else 0.
inline DifferentialForm psi_form(const AlgebraPresentation& A, const DifferentialForm& w) {
  if (w.degree > 1) detail::fail("frobenius_psi", "DegreeTooHigh", "psi is implemented up to degree 1");
  if (w.degree == 0) return DifferentialForm::function(psi_series(A, w.coeff({}, A.zero())));
  const long p = A.ctx.p;
  if (A.family == Family::Hyperelliptic) {
    const hyper::Curve& c = hyper::Curve::from(A);
    const DaggerSeries g = A.normalize(w.coeff({0}, A.zero()));
    return DifferentialForm::one_form(
        0, hyper::from_levels(hyper::psi(c, hyper::to_levels(g, A.ctx), true, A.degree_cap), A));
  }
  if (A.family != Family::AffineLine && A.family != Family::Torus)
    detail::fail("frobenius_psi", "UnsupportedFamily", "psi needs a supported family");
  const DaggerSeries g = w.coeff({0}, A.zero());
  DaggerSeries r = A.zero().with_precision(g.precision());
  for (const auto& [v, c] : g.terms()) {
    const long m1 = v[0] + 1;
    if (m1 % p == 0) r.add_term({static_cast<int>(m1 / p - 1)}, c);
  }
  return DifferentialForm::one_form(0, r);
}

/// Every F(xi_i) reduces to xi_i^p modulo p.
inline bool reduces_to_frobenius(const FrobeniusLift& F) {
  const AlgebraPresentation& A = F.algebra;
  const long p = A.ctx.p;
  for (int i = 0; i < static_cast<int>(F.images.size()); ++i) {
    Exponent v(static_cast<std::size_t>(A.nvars), 0);
    v[static_cast<std::size_t>(i)] = static_cast<int>(p);
    const DaggerSeries diff = A.normalize(F.images[static_cast<std::size_t>(i)] - A.monomial(v, A.ctx.one()));
    for (const auto& [w, c] : diff.terms())
      if (c.valuation().value < 1) return false;
  }
  return true;
}

}  // namespace mwzeta
