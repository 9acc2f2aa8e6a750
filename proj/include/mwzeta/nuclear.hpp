#pragma once

// Finite-dimensional trace and determinant calculus for psi on cohomology:
// traces of powers, det(1 - tL), the Lefschetz count, integer rounding, zeta
// assembly, and the exact-sequence and filtration identities.

#include <gmpxx.h>

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mwzeta/error.hpp"
#include "mwzeta/linalg.hpp"
#include "mwzeta/mw_engine.hpp"
#include "mwzeta/padic.hpp"
#include "mwzeta/padic_poly.hpp"
#include "mwzeta/rational.hpp"

namespace mwzeta {

inline PadicScalar trace_power(const PadicMatrix& L, int s) {
  if (s < 1) detail::fail("nuclear_zeta", "BadPower", "trace_power needs s >= 1");
  if (!L.square()) detail::fail("nuclear_zeta", "ShapeMismatch", "operator must be square");
  return L.pow(s).trace();
}

/// det(1 - tL) by Berkowitz's division-free recursion on leading principal minors.
inline PadicPoly char_det(const PadicMatrix& L) {
  if (!L.square()) detail::fail("nuclear_zeta", "ShapeMismatch", "operator must be square");
  const PadicContext& ctx = L.context();
  const int n = L.rows();
  // v holds det(tI - A_k) with the leading coefficient first
  std::vector<PadicScalar> v{ctx.one()};
  for (int k = 1; k <= n; ++k) {
    const int m = k - 1;  // size of the previous block
    // Toeplitz column: 1, -a_kk, -R C, -R A C, ..., -R A^(m-1) C
    std::vector<PadicScalar> col{ctx.one(), -L(m, m)};
    std::vector<PadicScalar> w(static_cast<std::size_t>(m));  // A^i C
    for (int i = 0; i < m; ++i) w[static_cast<std::size_t>(i)] = L(i, m);
    for (int pw = 0; pw < m; ++pw) {
      PadicScalar rc = ctx.zero();
      for (int i = 0; i < m; ++i) rc += L(m, i) * w[static_cast<std::size_t>(i)];
      col.push_back(-rc);
      std::vector<PadicScalar> next(static_cast<std::size_t>(m), ctx.zero());
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) next[static_cast<std::size_t>(i)] += L(i, j) * w[static_cast<std::size_t>(j)];
      w = std::move(next);
    }
    std::vector<PadicScalar> nv(static_cast<std::size_t>(k + 1), ctx.zero());
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= std::min(i, m); ++j)
        if (i - j < static_cast<int>(col.size())) nv[static_cast<std::size_t>(i)] += col[static_cast<std::size_t>(i - j)] * v[static_cast<std::size_t>(j)];
    v = std::move(nv);
  }
  // det(1 - tL) = t^n det(t^-1 I - L): the same coefficients read in ascending order
  return PadicPoly(ctx, v);
}

/// Power sums tr(L^s), s = 1..count, from det(1 - tL) by Newton's identities.
inline std::vector<PadicScalar> power_sums(const PadicPoly& det, int count) {
  const PadicContext& ctx = det.context();
  std::vector<PadicScalar> ps;
  for (int s = 1; s <= count; ++s) {
    PadicScalar v = -(ctx.integer(s) * det[s]);
    for (int i = 1; i < s; ++i) v -= det[i] * ps[static_cast<std::size_t>(s - i - 1)];
    ps.push_back(v);
  }
  return ps;
}

/// sum_i (-1)^i tr(psi^s | H^i).
inline PadicScalar lefschetz_count(const std::vector<CohomologySpace>& spaces, int s) {
  if (spaces.empty()) detail::fail("nuclear_zeta", "NoSpaces", "no cohomology supplied");
  PadicScalar total = spaces.front().psi.context().zero();
  for (const auto& h : spaces) {
    if (h.dimension() == 0) continue;
    const PadicScalar t = trace_power(h.psi, s);
    total = h.degree % 2 ? total - t : total + t;
  }
  return total;
}

/// The unique integer in [0, bound] congruent to x modulo p^N.
inline mpz_class round_count(const PadicScalar& x, const mpz_class& bound) {
  const int N = x.absolute_precision();
  const mpz_class& mod = prime_power(x.prime(), std::max(N, 0));
  if (N <= 0 || mod <= bound)
    detail::fail("nuclear_zeta", "AmbiguousRounding",
                 "p^" + std::to_string(N) + " does not exceed the bound " + bound.get_str());
  if (!x.is_zero() && x.valuation().value < 0)
    detail::fail("nuclear_zeta", "NotIntegral", "value " + x.to_string() + " is not p-integral");
  mpz_class r = x.symmetric_lift();
  if (r < 0) r += mod;
  if (r > bound) detail::fail("nuclear_zeta", "OutOfRange", "no integer in [0, " + bound.get_str() + "] matches");
  return r;
}

/// The unique integer in [-bound, bound] congruent to x modulo p^N.
inline mpz_class round_signed(const PadicScalar& x, const mpz_class& bound) {
  const int N = x.absolute_precision();
  if (N <= 0 || prime_power(x.prime(), N) <= 2 * bound)
    detail::fail("nuclear_zeta", "AmbiguousRounding",
                 "p^" + std::to_string(N) + " does not exceed twice the bound " + bound.get_str());
  if (!x.is_zero() && x.valuation().value < 0)
    detail::fail("nuclear_zeta", "NotIntegral", "value " + x.to_string() + " is not p-integral");
  mpz_class r = x.symmetric_lift();
  if (abs(r) > bound) detail::fail("nuclear_zeta", "OutOfRange", "no integer in [-bound, bound] matches");
  return r;
}

inline mpz_class binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

/// |coefficient of t^i| in det(1 - t psi) on a block of the given kind.
///  odd:   eigenvalues of absolute value sqrt(p)  -> binom(d, i) ceil(p^(i/2))
///  even, residue, constants on curves of roots of unity or p -> binom(d, i) * w^i
inline mpz_class coefficient_bound(long p, const std::string& part, int dim, int i, int nvars = 1) {
  const mpz_class b = binomial(dim, i);
  if (part == "odd") {
    mpz_class r = prime_power(p, i / 2);
    if (i % 2) {
      mpz_class s;
      mpz_sqrt(s.get_mpz_t(), mpz_class(prime_power(p, i)).get_mpz_t());
      if (s * s < prime_power(p, i)) s += 1;
      r = s;
    }
    return b * r;
  }
  if (part == "even" || part == "residue") return b;
  return b * prime_power(p, nvars * i);
}

struct DegreeFactor {
  int degree = 0;
  std::string part;
  std::vector<mpz_class> det;  // det(1 - t psi | part), ascending
  PadicPoly padic;
};

struct ZetaFunction {
  std::vector<mpz_class> numerator;
  std::vector<mpz_class> denominator;
  std::vector<DegreeFactor> factors;
};

using CoefficientBound = std::function<mpz_class(const std::string& part, int dim, int i)>;

/// det(1 - t psi) on every diagonal block of every space, rounded to integers.
inline std::vector<DegreeFactor> rounded_factors(const std::vector<CohomologySpace>& spaces,
                                                 const CoefficientBound& bound) {
  std::vector<DegreeFactor> out;
  for (const auto& h : spaces) {
    int offset = 0;
    for (const auto& part : h.parts) {
      if (part.dimension == 0) continue;
      const PadicMatrix block = h.psi.block(offset, offset + part.dimension, offset, offset + part.dimension);
      offset += part.dimension;
      DegreeFactor f;
      f.degree = h.degree;
      f.part = part.name;
      f.padic = char_det(block);
      for (int i = 0; i <= part.dimension; ++i)
        f.det.push_back(round_signed(f.padic[i].with_precision(h.effective_precision), bound(part.name, part.dimension, i)));
      out.push_back(std::move(f));
    }
  }
  return out;
}

/// Z(t) = prod_i det(1 - t psi | H^i)^((-1)^(i+1)), reduced over Q. When counts
/// are supplied, t d/dt log Z must reproduce them up to their length.
inline ZetaFunction zeta_assemble(const std::vector<DegreeFactor>& factors, const std::vector<mpz_class>& counts = {}) {
  RationalPoly num{mpq_class(1)}, den{mpq_class(1)};
  for (const auto& f : factors) {
    RationalPoly q = from_integers(f.det);
    if (f.degree % 2)
      num = poly_mul(num, q);
    else
      den = poly_mul(den, q);
  }
  RationalPoly g = poly_gcd(num, den);
  if (g.size() > 1) {
    num = poly_divmod(num, g).first;
    den = poly_divmod(den, g).first;
  }
  // constant terms 1
  const mpq_class n0 = num.front(), d0 = den.front();
  for (auto& c : num) c /= n0;
  for (auto& c : den) c /= d0;
  ZetaFunction z;
  z.numerator = to_integers(num);
  z.denominator = to_integers(den);
  z.factors = factors;
  if (!counts.empty()) {
    const std::size_t order = counts.size();
    RationalPoly lhs = log_derivative_series(num, order), rhs = log_derivative_series(den, order);
    for (std::size_t s = 1; s <= order; ++s)
      if (lhs[s] - rhs[s] != mpq_class(counts[s - 1]))
        detail::fail("nuclear_zeta", "LogDerivativeMismatch",
                     "t d/dt log Z disagrees with N_" + std::to_string(s) + " = " + counts[s - 1].get_str());
  }
  return z;
}

/// N_s from t d/dt log Z, s = 1..order.
inline std::vector<mpz_class> counts_from_zeta(const ZetaFunction& z, std::size_t order) {
  RationalPoly lhs = log_derivative_series(from_integers(z.numerator), order);
  RationalPoly rhs = log_derivative_series(from_integers(z.denominator), order);
  std::vector<mpz_class> out;
  for (std::size_t s = 1; s <= order; ++s) {
    mpq_class v = lhs[s] - rhs[s];
    if (v.get_den() != 1) detail::fail("nuclear_zeta", "NotIntegral", "non-integral point count");
    out.push_back(v.get_num());
  }
  return out;
}

struct IdentityReport {
  bool determinant = false;
  bool trace = false;
  int powers_checked = 0;

  bool ok() const { return determinant && trace; }
};

struct ExactSequenceResult {
  PadicMatrix kernel_op;
  PadicMatrix cokernel_op;
  IdentityReport report;
};

struct FiltrationResult {
  PadicMatrix sub_op;
  PadicMatrix quotient_op;
  IdentityReport report;
};

/// L restricted to the span of the columns of B (B must be L-invariant).
inline PadicMatrix restrict_operator(const PadicMatrix& L, const PadicMatrix& B) {
  if (B.cols() == 0) return PadicMatrix(L.context(), 0, 0);
  auto X = solve(B, L * B);
  if (!X) detail::fail("nuclear_zeta", "NotInvariant", "subspace is not invariant under the operator");
  return *X;
}

/// L induced on M / span(B).
inline PadicMatrix quotient_operator(const PadicMatrix& L, const PadicMatrix& B) {
  const PadicMatrix sub = column_space(B);
  const PadicMatrix C = complement(sub);
  if (C.cols() == 0) return PadicMatrix(L.context(), 0, 0);
  const PadicMatrix basis = PadicMatrix::hconcat(sub, C);
  const PadicMatrix coords = inverse(basis) * (L * C);
  return coords.block(sub.cols(), basis.cols(), 0, C.cols());
}

namespace detail {

inline PadicPoly det_of(const PadicMatrix& L) {
  return L.rows() == 0 ? PadicPoly::monomial(L.context(), 0, L.context().one()) : char_det(L);
}

inline PadicScalar trace_of(const PadicMatrix& L, int s) {
  return L.rows() == 0 ? L.context().zero() : trace_power(L, s);
}

}  // namespace detail

/// Determinant and trace check for 0 -> ker a -> M1 -> M2 -> coker a -> 0.
inline ExactSequenceResult exact_sequence_traces(const PadicMatrix& L1, const PadicMatrix& L2, const PadicMatrix& alpha) {
  if (!(alpha * L1 == L2 * alpha)) detail::fail("nuclear_zeta", "NotIntertwining", "alpha L1 != L2 alpha");
  ExactSequenceResult r;
  const PadicMatrix K = kernel(alpha);
  r.kernel_op = restrict_operator(L1, K);
  r.cokernel_op = quotient_operator(L2, alpha);
  using detail::det_of;
  r.report.determinant = det_of(r.kernel_op) * det_of(L2) == det_of(L1) * det_of(r.cokernel_op);
  r.report.trace = true;
  const int top = std::max(L1.rows(), L2.rows()) + 1;
  for (int s = 1; s <= top; ++s) {
    const PadicScalar sum = detail::trace_of(r.kernel_op, s) - detail::trace_of(L1, s) + detail::trace_of(L2, s) -
                            detail::trace_of(r.cokernel_op, s);
    if (!sum.is_zero()) r.report.trace = false;
  }
  r.report.powers_checked = top;
  return r;
}

/// Determinant and trace check for an invariant subspace span(B) of M.
inline FiltrationResult filtration_traces(const PadicMatrix& L, const PadicMatrix& B) {
  FiltrationResult r;
  r.sub_op = restrict_operator(L, B);
  r.quotient_op = quotient_operator(L, B);
  using detail::det_of;
  r.report.determinant = det_of(L) == det_of(r.sub_op) * det_of(r.quotient_op);
  r.report.trace = true;
  const int top = L.rows() + 1;
  for (int s = 1; s <= top; ++s) {
    const PadicScalar diff = detail::trace_of(L, s) - detail::trace_of(r.sub_op, s) - detail::trace_of(r.quotient_op, s);
    if (!diff.is_zero()) r.report.trace = false;
  }
  r.report.powers_checked = top;
  return r;
}

}  // namespace mwzeta
