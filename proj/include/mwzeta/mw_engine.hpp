#pragma once

// Monsky-Washnitzer cohomology of the supported affine families: explicit
// bases, reduction of 1-forms to basis coordinates plus an exact part, and the
// matrix of psi on each H^i.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mwzeta/dagger_algebra.hpp"
#include "mwzeta/dagger_series.hpp"
#include "mwzeta/error.hpp"
#include "mwzeta/frobenius.hpp"
#include "mwzeta/linalg.hpp"
#include "mwzeta/padic.hpp"
#include "mwzeta/padic_poly.hpp"

namespace mwzeta {

struct CohomologyPart {
  std::string name;
  int dimension = 0;
};

struct CohomologySpace {
  int degree = 0;
  std::vector<std::string> labels;
  std::vector<DifferentialForm> basis;
  std::vector<CohomologyPart> parts;  // consecutive diagonal blocks of psi
  PadicMatrix psi;
  int degree_cap = 0;
  int precision = 0;            // working precision of the computation
  int effective_precision = 0;  // digits certified for psi

  int dimension() const { return static_cast<int>(labels.size()); }
};

struct Reduction {
  std::vector<PadicScalar> coords;
  DaggerSeries exact_part;
};

namespace detail {

inline PadicScalar divide_tracked(const PadicScalar& a, const PadicScalar& b) {
  PadicScalar r = a / b;
  if (r.absolute_precision() <= 0)
    fail("mw_engine", "PrecisionExhausted", "division by " + b.to_string() + " left no significant digits");
  return r;
}

inline PadicPoly divide_tracked(const PadicPoly& a, const PadicScalar& b) {
  PadicPoly r = b.inverse() * a;
  if (r.precision() <= 0)
    fail("mw_engine", "PrecisionExhausted", "division by " + b.to_string() + " left no significant digits");
  return r;
}

inline void require_supported(const AlgebraPresentation& A) {
  if (A.family == Family::Generic)
    fail("mw_engine", "UnsupportedFamily", "cohomology needs a supported family");
}

}  // namespace detail

namespace hyper {

/// Reduction of sum_e P_e y^e dx on the curve. Poles of order s >= 3 are lowered
/// with R f + S f' = 1 and d(S r y^(2-s)); the last two levels use d(x^m y)
/// and d(x^m). Coordinates: x^i dx/y (i < 2g) then x^i dx/y^2 (i <= 2g).
inline std::pair<std::vector<PadicScalar>, Levels> reduce(const Curve& c, Levels L) {
  const PadicContext& ctx = c.ctx;
  const int g = c.genus;
  Levels u;
  // y^1 P dx = P f y^-1 dx
  if (auto it = L.find(1); it != L.end()) {
    PadicPoly a = it->second * c.f;
    L.erase(it);
    add_level(L, -1, a);
  }
  L.erase(L.lower_bound(2), L.end());  // canonical input has none
  // P dx is exact: integrate term by term
  if (auto it = L.find(0); it != L.end()) {
    const PadicPoly& a = it->second;
    PadicPoly prim(ctx);
    prim = prim.with_precision(a.precision());
    for (int m = 0; m <= a.degree(); ++m)
      if (!a[m].is_zero()) prim.add_coeff(m + 1, ::mwzeta::detail::divide_tracked(a[m], ctx.integer(m + 1)));
    add_level(u, 0, prim);
    L.erase(it);
  }
  const int smax = L.empty() ? 0 : -L.begin()->first;
  for (int s = smax; s >= 3; --s) {
    auto it = L.find(-s);
    if (it == L.end()) continue;
    PadicPoly a = std::move(it->second);
    L.erase(it);
    auto [q, r] = divmod(a, c.f);
    add_level(L, -(s - 2), q);
    if (r.is_zero() && r.precision() >= ctx.precision) continue;
    const PadicScalar k = ctx.integer(s - 2);
    const PadicPoly sr = c.bezout_df * r;
    const PadicPoly scaled = ::mwzeta::detail::divide_tracked(ctx.integer(2) * sr, k);
    add_level(L, -(s - 2), c.bezout_f * r + scaled.derivative());
    add_level(u, -(s - 2), -scaled);
  }
  std::vector<PadicScalar> coords(static_cast<std::size_t>(4 * g + 1), ctx.zero());
  const PadicScalar lc = c.f[2 * g + 1];
  if (auto it = L.find(-1); it != L.end()) {
    PadicPoly a = it->second;
    const PadicPoly half_df = ctx.rational(mpq_class(1, 2)) * c.df;
    for (int K = a.degree(); K >= 2 * g; --K) {
      const PadicScalar coef = a[K];
      if (coef.is_zero()) continue;
      const int m = K - 2 * g;
      // d(x^m y) = (m x^(m-1) f + x^m f'/2) dx / y
      const PadicScalar lead = lc * ctx.rational(mpq_class(2 * m + 2 * g + 1, 2));
      const PadicScalar t = ::mwzeta::detail::divide_tracked(coef, lead);
      PadicPoly exact = PadicPoly::monomial(ctx, m, ctx.one()) * half_df;
      if (m > 0) exact += PadicPoly::monomial(ctx, m - 1, ctx.integer(m)) * c.f;
      a -= t * exact;
      add_level(u, 1, PadicPoly::monomial(ctx, m, t));
    }
    for (int i = 0; i < 2 * g; ++i) coords[static_cast<std::size_t>(i)] = a[i];
    if (a.precision() < ctx.precision)
      for (int i = 0; i < 2 * g; ++i) coords[static_cast<std::size_t>(i)] = coords[static_cast<std::size_t>(i)].with_precision(a.precision());
  }
  if (auto it = L.find(-2); it != L.end()) {
    PadicPoly a = it->second;
    for (int K = a.degree(); K >= 2 * g + 1; --K) {
      const PadicScalar coef = a[K];
      if (coef.is_zero()) continue;
      const int m = K - 2 * g;
      // d(x^m) = m x^(m-1) f dx / y^2
      const PadicScalar t = ::mwzeta::detail::divide_tracked(coef, lc * ctx.integer(m));
      a -= t * (PadicPoly::monomial(ctx, m - 1, ctx.integer(m)) * c.f);
      add_level(u, 0, PadicPoly::monomial(ctx, m, t));
    }
    for (int i = 0; i <= 2 * g; ++i) coords[static_cast<std::size_t>(2 * g + i)] = a[i].with_precision(a.precision());
  }
  return {coords, u};
}

/// Naive worst-case loss of p-adic digits when reducing a pole of order s.
inline int reduction_loss(long p, int genus, int s) {
  int loss = 0;
  for (int t = s; t >= 3; t -= 2) loss += int_valuation(p, t - 2);
  const int mmax = 6 * genus + 2 + static_cast<int>(p);
  if (s % 2 == 1) {
    for (int m = 0; m <= mmax; ++m) loss += int_valuation(p, 2 * m + 2 * genus + 1);
  } else {
    for (int m = 1; m <= mmax; ++m) loss += int_valuation(p, m);
  }
  return loss;
}

/// Lower bound on the valuation of every psi-expansion term dropped by the pole cap,
/// after reduction: term j has valuation >= j and starts at pole order k + 2j.
inline int tail_bound(long p, int genus, int pole_cap) {
  int best = std::numeric_limits<int>::max();
  for (int k = 1; k <= 2; ++k) {
    const int first = std::max(0, (pole_cap - k) / 2 + 1);
    for (int j = first; j < first + 64 + 8 * static_cast<int>(p); ++j)
      best = std::min(best, j - reduction_loss(p, genus, k + 2 * j));
  }
  return best;
}

}  // namespace hyper

/// coordinates of a closed function on H^0 = constants.
inline std::vector<PadicScalar> reduce_function(const AlgebraPresentation& A, const DaggerSeries& a) {
  detail::require_supported(A);
  return {A.normalize(a).constant_term()};
}

/// w = sum_j c_j basis_j + d(u) at truncation.
inline Reduction reduce_form(const AlgebraPresentation& A, const DifferentialForm& w) {
  detail::require_supported(A);
  if (w.degree != 1) detail::fail("mw_engine", "DegreeMismatch", "reduce_form expects a 1-form");
  const DaggerSeries g = w.coeff({0}, A.zero());
  if (A.family == Family::Hyperelliptic) {
    const hyper::Curve& c = hyper::Curve::from(A);
    auto [coords, u] = hyper::reduce(c, hyper::to_levels(A.normalize(g), A.ctx));
    return {coords, A.normalize(hyper::from_levels(u, A))};
  }
  Reduction r;
  r.exact_part = A.zero();
  PadicScalar residue = PadicScalar::zero(A.ctx.p, g.precision());
  for (const auto& [v, c] : g.terms()) {
    const int m = v[0];
    if (m == -1) {
      residue += c;
      continue;
    }
    r.exact_part.add_term({m + 1}, detail::divide_tracked(c, A.ctx.integer(m + 1)));
  }
  if (A.family == Family::Torus) r.coords.push_back(residue);
  return r;
}

/// H^0 and H^1 with their bases (psi not yet computed).
inline std::vector<CohomologySpace> cohomology_basis(const AlgebraPresentation& A) {
  detail::require_supported(A);
  CohomologySpace h0;
  h0.degree = 0;
  h0.labels = {"1"};
  h0.basis = {DifferentialForm::function(A.one())};
  h0.parts = {{"constants", 1}};
  CohomologySpace h1;
  h1.degree = 1;
  switch (A.family) {
    case Family::AffineLine:
      break;
    case Family::Torus:
      h1.labels = {"dx/x"};
      h1.basis = {DifferentialForm::one_form(0, A.monomial({-1}, A.ctx.one()))};
      h1.parts = {{"residue", 1}};
      break;
    case Family::Hyperelliptic: {
      const int g = A.genus;
      for (int i = 0; i < 2 * g; ++i) {
        h1.labels.push_back("x^" + std::to_string(i) + " dx/y");
        h1.basis.push_back(DifferentialForm::one_form(0, A.monomial({i, -1}, A.ctx.one())));
      }
      for (int i = 0; i <= 2 * g; ++i) {
        h1.labels.push_back("x^" + std::to_string(i) + " dx/y^2");
        h1.basis.push_back(DifferentialForm::one_form(0, A.monomial({i, -2}, A.ctx.one())));
      }
      h1.parts = {{"odd", 2 * g}, {"even", 2 * g + 1}};
      break;
    }
    case Family::Generic:
      break;
  }
  for (auto* h : {&h0, &h1}) {
    h->degree_cap = A.degree_cap;
    h->precision = A.ctx.precision;
    h->effective_precision = A.ctx.precision;
    h->psi = PadicMatrix(A.ctx, h->dimension(), h->dimension());
  }
  return {h0, h1};
}

/// Column j holds the coordinates of psi(basis_j).
inline PadicMatrix psi_matrix(const AlgebraPresentation& A, const CohomologySpace& space) {
  detail::require_supported(A);
  const int n = space.dimension();
  PadicMatrix M(A.ctx, n, n);
  for (int j = 0; j < n; ++j) {
    const DifferentialForm& b = space.basis[static_cast<std::size_t>(j)];
    std::vector<PadicScalar> col;
    if (space.degree == 0)
      col = reduce_function(A, psi_series(A, b.coeff({}, A.zero())));
    else
      col = reduce_form(A, psi_form(A, b)).coords;
    for (int i = 0; i < n; ++i) M(i, j) = col[static_cast<std::size_t>(i)];
  }
  return M;
}

/// Column j holds the coordinates of F^*(basis_j).
inline PadicMatrix frobenius_matrix(const FrobeniusLift& F, const CohomologySpace& space) {
  const AlgebraPresentation& A = F.algebra;
  detail::require_supported(A);
  const int n = space.dimension();
  PadicMatrix M(A.ctx, n, n);
  for (int j = 0; j < n; ++j) {
    const DifferentialForm& b = space.basis[static_cast<std::size_t>(j)];
    std::vector<PadicScalar> col;
    if (space.degree == 0)
      col = reduce_function(A, apply_lift(F, b.coeff({}, A.zero())));
    else
      col = reduce_form(A, frobenius_pullback(F, b)).coords;
    for (int i = 0; i < n; ++i) M(i, j) = col[static_cast<std::size_t>(i)];
  }
  return M;
}

// ---------------------------------------------------------------------------
// Precision policy.

struct PrecisionPlan {
  int target = 0;   // digits wanted in psi
  int degree_cap = 0;
  int working = 0;  // precision of fresh constants
  bool automatic = true;
};

inline int default_target_precision(long p, int genus) {
  // ceil(log_p(4 p^g)) + 4 safety digits
  int k = 0;
  mpz_class v = 1, bound = 4 * prime_power(p, genus);
  while (v < bound) v *= p, ++k;
  return k + 4;
}

inline PrecisionPlan plan_precision(Family family, long p, int genus, std::optional<int> target,
                                    std::optional<int> degree_cap) {
  PrecisionPlan plan;
  plan.automatic = !target && !degree_cap;
  plan.target = target.value_or(default_target_precision(p, genus));
  const int base_cap = static_cast<int>(p) * (2 * genus + 1) + 8;
  if (family != Family::Hyperelliptic) {
    plan.degree_cap = degree_cap.value_or(base_cap);
    plan.working = plan.target;
    return plan;
  }
  int cap = degree_cap.value_or(base_cap);
  if (!degree_cap)
    while (hyper::tail_bound(p, genus, cap) < plan.target) cap += 2;
  plan.degree_cap = cap;
  int loss = 0;
  for (int s = 1; s <= cap + 2; ++s) loss = std::max(loss, hyper::reduction_loss(p, genus, s));
  plan.working = plan.target + loss + 2;
  return plan;
}

/// Builds the family at the planned precision and fills in psi on H^0 and H^1.
inline std::vector<CohomologySpace> compute_cohomology(const AlgebraPresentation& A) {
  std::vector<CohomologySpace> spaces = cohomology_basis(A);
  for (auto& h : spaces) {
    h.psi = psi_matrix(A, h);
    h.effective_precision = std::min(h.psi.precision(), A.ctx.precision);
    if (A.family == Family::Hyperelliptic && h.degree == 1)
      h.effective_precision = std::min(h.effective_precision, hyper::tail_bound(A.ctx.p, A.genus, A.degree_cap));
  }
  return spaces;
}

}  // namespace mwzeta
