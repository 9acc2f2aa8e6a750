#pragma once

// Randomized property suites: the psi identities on each supported family,
// the exact-sequence and filtration identities, and the sheaf exactness check.
// Shared by the test suite and `zeta check`.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mwzeta/cech.hpp"
#include "mwzeta/frobenius.hpp"
#include "mwzeta/nuclear.hpp"

namespace mwzeta {

struct SuiteResult {
  std::string name;
  int cases = 0;
  int failures = 0;
  std::string first_failure;

  bool ok() const { return cases > 0 && failures == 0; }
};

namespace detail {

inline void record(SuiteResult& r, bool passed, const std::string& what) {
  ++r.cases;
  if (passed) return;
  if (r.failures++ == 0) r.first_failure = what;
}

/// Pole cap at which the truncated hyperelliptic lift is exact to `precision` digits.
inline int exact_lift_cap(long p, int precision) { return 2 * static_cast<int>(p) * precision + static_cast<int>(p) + 8; }

}  // namespace detail

/// psi(F(a) w) = a psi(w), psi(d a) = d psi(a), psi(F^* w) = p w and psi(F(a)) = p a,
/// on `cases` random inputs for each identity.
inline SuiteResult psi_identity_suite(Family family, long p, int cases, std::uint64_t seed) {
  SuiteResult r;
  r.name = "psi/" + to_string(family) + "/p=" + std::to_string(p);
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  AlgebraPresentation A;
  const int N = family == Family::Hyperelliptic ? 4 : 10;
  switch (family) {
    case Family::AffineLine: A = affine_line({p, N}, 12 * static_cast<int>(p)); break;
    case Family::Torus: A = torus({p, N}, 12 * static_cast<int>(p)); break;
    case Family::Hyperelliptic: A = hyperelliptic({p, N}, {1, 1, 0, 1}, detail::exact_lift_cap(p, N)); break;
    default: detail::fail("frobenius_psi", "UnsupportedFamily", "no identity suite for this family");
  }
  const FrobeniusLift F = default_lift(A);
  const int span = 2 * static_cast<int>(p);  // keeps F^*(w) below the degree cap
  auto random_function = [&]() {
    DaggerSeries a = A.zero();
    const int terms = pick(1, 3);
    for (int t = 0; t < terms; ++t) {
      const PadicScalar c = A.ctx.integer(pick(-p * p, p * p));
      if (family == Family::Hyperelliptic)
        a += A.monomial({pick(0, 2), pick(-2, 1)}, c);
      else
        a += A.monomial({pick(family == Family::Torus ? -3 : 0, 3)}, c);
    }
    return A.normalize(a);
  };
  auto random_form = [&]() {
    if (family == Family::Hyperelliptic)
      return DifferentialForm::one_form(0, A.monomial({pick(0, 2), -pick(1, 3)}, A.ctx.integer(pick(1, 9))));
    DaggerSeries g = A.zero();
    const int terms = pick(1, 3);
    for (int t = 0; t < terms; ++t)
      g += A.monomial({pick(family == Family::Torus ? -span : 0, span)}, A.ctx.integer(pick(-9, 9)));
    return DifferentialForm::one_form(0, g);
  };
  const PadicScalar pp = A.ctx.integer(p);
  for (int k = 0; k < cases; ++k) {
    const DaggerSeries a = random_function();
    const DifferentialForm w = random_form();
    const std::string tag = " case " + std::to_string(k);
    detail::record(r, forms_equal(A, psi_form(A, scale(A, apply_lift(F, a), w)), scale(A, a, psi_form(A, w))),
           "(i) psi(F(a) w) != a psi(w)" + tag);
    const DifferentialForm fa = DifferentialForm::function(a);
    detail::record(r, forms_equal(A, psi_form(A, d(A, fa)), d(A, DifferentialForm::function(psi_series(A, a)))),
           "(ii) psi(da) != d psi(a)" + tag);
    detail::record(r, forms_equal(A, psi_form(A, frobenius_pullback(F, w)), pp * w), "(iii) psi(F^* w) != p w" + tag);
    detail::record(r, A.normalize(psi_series(A, apply_lift(F, a)) - pp * a).is_zero(), "(iii) psi(F(a)) != p a" + tag);
  }
  return r;
}

namespace detail {

/// A random integer matrix with determinant +-1.
inline PadicMatrix random_unimodular(PadicContext ctx, int n, std::mt19937_64& rng) {
  PadicMatrix P = PadicMatrix::identity(ctx, n);
  if (n < 2) return P;
  std::uniform_int_distribution<int> idx(0, n - 1), mult(-3, 3);
  for (int step = 0; step < 3 * n; ++step) {
    const int i = idx(rng), j = idx(rng);
    if (i == j) continue;
    const PadicScalar m = ctx.integer(mult(rng));
    for (int c = 0; c < n; ++c) P(i, c) += m * P(j, c);
  }
  return P;
}

inline PadicMatrix random_integer_matrix(PadicContext ctx, int rows, int cols, std::mt19937_64& rng) {
  const long b = ctx.p * ctx.p;
  std::uniform_int_distribution<long> v(-b, b);
  PadicMatrix M(ctx, rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = ctx.integer(v(rng));
  return M;
}

/// Places blocks into an n x n matrix at the given offsets.
inline void put(PadicMatrix& M, const PadicMatrix& B, int r0, int c0) {
  for (int i = 0; i < B.rows(); ++i)
    for (int j = 0; j < B.cols(); ++j) M(r0 + i, c0 + j) = B(i, j);
}

}  // namespace detail

/// Random L1, L2 and an intertwiner alpha of prescribed rank, all conjugated
/// by unimodular integer matrices.
inline SuiteResult exact_sequence_suite(long p, int cases, int precision, std::uint64_t seed) {
  SuiteResult r;
  r.name = "exact-sequence/p=" + std::to_string(p);
  const PadicContext ctx{p, precision};
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int k = 0; k < cases; ++k) {
    const int n1 = pick(1, 6), n2 = pick(1, 6), rk = pick(0, std::min(n1, n2));
    const int k0 = n1 - rk, k3 = n2 - rk;
    // M1 = ker + V, M2 = im + W, alpha: V -> im the identity
    const PadicMatrix X = detail::random_integer_matrix(ctx, rk, rk, rng);
    PadicMatrix L1(ctx, n1, n1), L2(ctx, n2, n2), alpha(ctx, n2, n1);
    detail::put(L1, detail::random_integer_matrix(ctx, k0, k0, rng), 0, 0);
    detail::put(L1, detail::random_integer_matrix(ctx, k0, rk, rng), 0, k0);
    detail::put(L1, X, k0, k0);
    detail::put(L2, X, 0, 0);
    detail::put(L2, detail::random_integer_matrix(ctx, rk, k3, rng), 0, rk);
    detail::put(L2, detail::random_integer_matrix(ctx, k3, k3, rng), rk, rk);
    for (int i = 0; i < rk; ++i) alpha(i, k0 + i) = ctx.one();
    const PadicMatrix P1 = detail::random_unimodular(ctx, n1, rng), P2 = detail::random_unimodular(ctx, n2, rng);
    const PadicMatrix Q1 = inverse(P1), Q2 = inverse(P2);
    const auto res = exact_sequence_traces(P1 * L1 * Q1, P2 * L2 * Q2, P2 * alpha * Q1);
    const bool dims = res.kernel_op.rows() == k0 && res.cokernel_op.rows() == k3;
    detail::record(r, res.report.ok() && dims,
           "case " + std::to_string(k) + " (" + std::to_string(n1) + "," + std::to_string(n2) + ",rank " +
               std::to_string(rk) + ")");
  }
  return r;
}

/// Random block-triangular L with an invariant subspace, conjugated by a unimodular matrix.
inline SuiteResult filtration_suite(long p, int cases, int precision, std::uint64_t seed) {
  SuiteResult r;
  r.name = "filtration/p=" + std::to_string(p);
  const PadicContext ctx{p, precision};
  std::mt19937_64 rng(seed);
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  for (int k = 0; k < cases; ++k) {
    const int n = pick(1, 6), m = pick(0, n);
    PadicMatrix L(ctx, n, n);
    detail::put(L, detail::random_integer_matrix(ctx, m, m, rng), 0, 0);
    detail::put(L, detail::random_integer_matrix(ctx, m, n - m, rng), 0, m);
    detail::put(L, detail::random_integer_matrix(ctx, n - m, n - m, rng), m, m);
    const PadicMatrix P = detail::random_unimodular(ctx, n, rng);
    const PadicMatrix B = m ? P.block(0, n, 0, m) : PadicMatrix(ctx, n, 0);
    const auto res = filtration_traces(P * L * inverse(P), B);
    detail::record(r, res.report.ok() && res.sub_op.rows() == m && res.quotient_op.rows() == n - m,
           "case " + std::to_string(k) + " (dim " + std::to_string(n) + ", sub " + std::to_string(m) + ")");
  }
  return r;
}

/// The cover {x, x - 1} of the affine line passes; {x, x} for the locus of x - 1 fails.
inline SuiteResult sheaf_exactness_suite(long p, int samples, std::uint64_t seed) {
  SuiteResult r;
  r.name = "sheaf-exactness/p=" + std::to_string(p);
  const AlgebraPresentation A = affine_line({p, 8}, 20);
  ExactnessOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  const ExactnessReport good = sheaf_exactness_check(A, {1}, {{0, 1}, {-1, 1}}, opt);
  r.cases += good.samples_checked - 1;
  detail::record(r, good.exact && good.samples_checked >= samples, "cover {x, x-1} rejected: " + good.witness);
  const ExactnessReport bad = sheaf_exactness_check(A, {-1, 1}, {{0, 1}, {0, 1}}, opt);
  detail::record(r, !bad.exact && !bad.witness.empty(), "broken cover {x, x} accepted");
  return r;
}

struct SuiteSpec {
  std::string name;
  std::function<SuiteResult(std::uint64_t)> run;
};

inline std::vector<SuiteSpec> property_suites() {
  return {
      {"psi-affine_line", [](std::uint64_t s) { return psi_identity_suite(Family::AffineLine, 5, 100, s); }},
      {"psi-torus", [](std::uint64_t s) { return psi_identity_suite(Family::Torus, 5, 100, s); }},
      {"psi-hyperelliptic", [](std::uint64_t s) { return psi_identity_suite(Family::Hyperelliptic, 5, 100, s); }},
      {"exact-sequence", [](std::uint64_t s) { return exact_sequence_suite(5, 200, 10, s); }},
      {"filtration", [](std::uint64_t s) { return filtration_suite(5, 200, 10, s); }},
      {"sheaf-exactness", [](std::uint64_t s) { return sheaf_exactness_suite(5, 50, s); }},
  };
}

}  // namespace mwzeta
