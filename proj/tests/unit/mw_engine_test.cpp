#include <gtest/gtest.h>

#include <random>

#include "mwzeta/checks.hpp"
#include "mwzeta/mw_engine.hpp"
#include "mwzeta/nuclear.hpp"
#include "support.hpp"

using namespace mwzeta;

namespace {

DifferentialForm form(const AlgebraPresentation& A, Exponent v, long c = 1) {
  return DifferentialForm::one_form(0, A.monomial(std::move(v), A.ctx.integer(c)));
}

/// w - sum_j c_j basis_j - du, which must vanish.
DifferentialForm recomposition_defect(const AlgebraPresentation& A, const CohomologySpace& h1,
                                      const DifferentialForm& w, const Reduction& r) {
  DifferentialForm rest = w - d(A, r.exact_part);
  for (std::size_t j = 0; j < r.coords.size(); ++j)
    rest = rest - scale(A, A.constant(r.coords[j]), h1.basis[j]);
  return normalize(A, rest);
}

AlgebraPresentation curve7(int N, int cap) { return hyperelliptic({7, N}, {1, 1, 0, 1}, cap); }

}  // namespace

TEST(ReduceForm, TorusExactMonomial) {
  const PadicContext ctx{5, 8};
  const AlgebraPresentation T = torus(ctx, 30);
  const Reduction r = reduce_form(T, form(T, {3}));
  ASSERT_EQ(r.coords.size(), 1u);
  EXPECT_TRUE(r.coords[0].is_zero());
  EXPECT_TRUE(r.exact_part == T.monomial({4}, ctx.rational(mpq_class(1, 4))));
}

TEST(ReduceForm, TorusResidueForm) {
  const PadicContext ctx{5, 8};
  const AlgebraPresentation T = torus(ctx, 30);
  const Reduction r = reduce_form(T, form(T, {-1}));
  EXPECT_TRUE(r.coords[0] == ctx.one());
  EXPECT_TRUE(r.exact_part.is_zero());
}

TEST(ReduceForm, DivisionByPPowersIsTracked) {
  const PadicContext ctx{3, 2};
  const AlgebraPresentation T = torus(ctx, 30);
  EXPECT_THROW(reduce_form(T, form(T, {8})), Error);  // 1/9 keeps no digits at N = 2
  EXPECT_THROW(reduce_form(generic_presentation(ctx, 1, {}, {}, 10), form(T, {0})), Error);
}

TEST(ReduceForm, HyperellipticRecomposition) {
  const AlgebraPresentation H = curve7(8, 40);
  const auto spaces = cohomology_basis(H);
  const CohomologySpace& h1 = spaces[1];
  const DifferentialForm w = form(H, {2, -1});
  const Reduction r = reduce_form(H, w);
  EXPECT_TRUE(recomposition_defect(H, h1, w, r).is_zero());
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> xe(0, 9), ye(-9, 1), c(-50, 50);
  for (int k = 0; k < 60; ++k) {
    DaggerSeries g = H.zero();
    for (int t = 0; t < 3; ++t) g += H.monomial({xe(rng), ye(rng)}, H.ctx.integer(c(rng)));
    const DifferentialForm v = DifferentialForm::one_form(0, H.normalize(g));
    EXPECT_TRUE(recomposition_defect(H, h1, v, reduce_form(H, v)).is_zero()) << k;
  }
}

TEST(CohomologyBasis, AffineLineAndTorus) {
  const PadicContext ctx{5, 8};
  const auto L = cohomology_basis(affine_line(ctx, 20));
  EXPECT_EQ(L[0].dimension(), 1);
  EXPECT_EQ(L[1].dimension(), 0);
  const auto T = cohomology_basis(torus(ctx, 20));
  EXPECT_EQ(T[0].dimension(), 1);
  EXPECT_EQ(T[1].dimension(), 1);
  // every monomial form on the line integrates; on the torus only dx/x survives
  for (int m = 0; m <= 15; ++m) EXPECT_TRUE(reduce_form(affine_line(ctx, 20), form(affine_line(ctx, 20), {m})).coords.empty());
  for (int m = -15; m <= 15; ++m) {
    const Reduction r = reduce_form(torus(ctx, 20), form(torus(ctx, 20), {m}));
    EXPECT_EQ(r.coords[0].is_zero(), m != -1) << m;
  }
}

TEST(CohomologyBasis, HyperellipticDimensionCountsPunctures) {
  // A genus-g curve with r punctures has dim H^1 = 2g + r - 1. Removing the point
  // at infinity and the 2g + 1 zeros of y gives r = 2g + 2, so 4g + 1.
  for (const auto& [p, f, g] : std::vector<std::tuple<long, std::vector<mpz_class>, int>>{
           {7, {1, 1, 0, 1}, 1}, {5, {1, 1, 0, 0, 0, 1}, 2}}) {
    const auto spaces = cohomology_basis(hyperelliptic({p, 6}, f, 30));
    EXPECT_EQ(spaces[1].dimension(), 4 * g + 1);
    ASSERT_EQ(spaces[1].parts.size(), 2u);
    EXPECT_EQ(spaces[1].parts[0].name, "odd");
    EXPECT_EQ(spaces[1].parts[0].dimension, 2 * g);
    EXPECT_EQ(spaces[1].parts[1].dimension, 2 * g + 1);
  }
}

TEST(CohomologyBasis, HyperellipticBasisIsIndependentOfExactForms) {
  // every monomial form reduces into the span, and the basis forms reduce to unit vectors
  const AlgebraPresentation H = curve7(8, 40);
  const auto h1 = cohomology_basis(H)[1];
  for (int j = 0; j < h1.dimension(); ++j) {
    const Reduction r = reduce_form(H, h1.basis[static_cast<std::size_t>(j)]);
    for (int i = 0; i < h1.dimension(); ++i)
      EXPECT_TRUE(r.coords[static_cast<std::size_t>(i)] == (i == j ? H.ctx.one() : H.ctx.zero()));
    EXPECT_TRUE(r.exact_part.is_zero());
  }
}

TEST(PsiMatrix, AffineLineAndTorus) {
  const long p = 5;
  const PadicContext ctx{p, 8};
  const auto L = compute_cohomology(affine_line(ctx, 30));
  EXPECT_TRUE(L[0].psi(0, 0) == ctx.integer(p));
  const auto T = compute_cohomology(torus(ctx, 30));
  EXPECT_TRUE(T[0].psi(0, 0) == ctx.integer(p));
  EXPECT_TRUE(T[1].psi(0, 0) == ctx.one());
}

TEST(PsiMatrix, HyperellipticOddPartWithinWeilBounds) {
  const PrecisionPlan plan = plan_precision(Family::Hyperelliptic, 7, 1, std::nullopt, std::nullopt);
  const auto spaces = compute_cohomology(curve7(plan.working, plan.degree_cap));
  const CohomologySpace& h1 = spaces[1];
  const PadicMatrix odd = h1.psi.block(0, 2, 0, 2);
  const PadicPoly det = char_det(odd);
  const mpz_class a1 = round_signed(det[1].with_precision(h1.effective_precision), 5);
  const mpz_class a2 = round_signed(det[2].with_precision(h1.effective_precision), 49);
  EXPECT_LE(a1 * a1, 4 * 7);
  EXPECT_EQ(a2, 7);
  // #E(F_7) = 7 + 1 - t with t = -a1; the affine model with y != 0 omits the point
  // at infinity and the roots of f
  long roots = 0;
  for (long x = 0; x < 7; ++x) roots += oracle::eval_mod({1, 1, 0, 1}, x, 7) == 0;
  const long t = -a1.get_si();
  EXPECT_EQ(7 + 1 - t - 1 - roots, static_cast<long>(oracle::curve_points_with_y_unit({1, 1, 0, 1}, 7, 1)));
}

TEST(PsiMatrix, IndependentOfBasisChange) {
  const PrecisionPlan plan = plan_precision(Family::Hyperelliptic, 7, 1, std::nullopt, std::nullopt);
  const auto h1 = compute_cohomology(curve7(plan.working, plan.degree_cap))[1];
  const PadicContext ctx = h1.psi.context();
  const PadicMatrix P = PadicMatrix::from_integers(
      ctx, {{1, 2, 0, 0, 1}, {0, 1, 0, 3, 0}, {0, 0, 1, 0, 0}, {2, 0, 0, 1, 0}, {0, 0, 5, 0, 1}});
  const PadicMatrix conj = inverse(P) * h1.psi * P;
  EXPECT_TRUE(char_det(conj) == char_det(h1.psi));
  EXPECT_TRUE(conj.trace() == h1.psi.trace());
}

TEST(PsiMatrix, StableUnderRefinement) {
  const PrecisionPlan plan = plan_precision(Family::Hyperelliptic, 7, 1, std::nullopt, std::nullopt);
  const PrecisionPlan finer = plan_precision(Family::Hyperelliptic, 7, 1, plan.target + 5, plan.degree_cap + 4);
  const auto a = compute_cohomology(curve7(plan.working, plan.degree_cap))[1];
  const auto b = compute_cohomology(curve7(finer.working, finer.degree_cap))[1];
  const int prec = std::min(a.effective_precision, b.effective_precision);
  EXPECT_GE(prec, plan.target);
  const PadicPoly da = char_det(a.psi), db = char_det(b.psi);
  for (int i = 0; i <= a.dimension(); ++i) EXPECT_TRUE(da[i].with_precision(prec) == db[i].with_precision(prec)) << i;
}

TEST(PsiMatrix, InvertsFrobeniusPullbackUpToP) {
  const long p = 5;
  const PadicContext ctx{p, 8};
  const AlgebraPresentation T = torus(ctx, 60);
  const auto t = compute_cohomology(T);
  EXPECT_TRUE(t[1].psi * frobenius_matrix(default_lift(T), t[1]) == ctx.integer(p) * PadicMatrix::identity(ctx, 1));

  // on the curve the truncated lift is exact to `digits` digits at this pole cap
  const int digits = 3;
  const AlgebraPresentation H = curve7(12, detail::exact_lift_cap(7, digits));
  const auto h = compute_cohomology(H)[1];
  const PadicMatrix prod = h.psi * frobenius_matrix(default_lift(H), h);
  const PadicMatrix target = H.ctx.integer(7) * PadicMatrix::identity(H.ctx, h.dimension());
  EXPECT_TRUE((prod - target).with_precision(digits).is_zero()) << prod.to_string();
}

TEST(PrecisionPolicy, DefaultsFollowTheGenus) {
  // ceil(log_7(4 * 7)) + 4 = 2 + 4
  EXPECT_EQ(default_target_precision(7, 1), 6);
  const PrecisionPlan plan = plan_precision(Family::Hyperelliptic, 7, 1, std::nullopt, std::nullopt);
  EXPECT_EQ(plan.target, 6);
  EXPECT_GE(plan.degree_cap, 7 * 3 + 8);
  EXPECT_GT(plan.working, plan.target);
  EXPECT_GE(hyper::tail_bound(7, 1, plan.degree_cap), plan.target);
  const PrecisionPlan fixed = plan_precision(Family::Hyperelliptic, 7, 1, 9, 40);
  EXPECT_EQ(fixed.target, 9);
  EXPECT_EQ(fixed.degree_cap, 40);
  EXPECT_FALSE(fixed.automatic);
}
