#include <gtest/gtest.h>

#include "mwzeta/checks.hpp"
#include "mwzeta/frobenius.hpp"

using namespace mwzeta;

namespace {

DifferentialForm x_power_dx(const AlgebraPresentation& A, int m, long c = 1) {
  return DifferentialForm::one_form(0, A.monomial({m}, A.ctx.integer(c)));
}

}  // namespace

TEST(DefaultLift, AffineLineAndTorusRaiseToThePthPower) {
  const PadicContext ctx{3, 8};
  const AlgebraPresentation L = affine_line(ctx, 30);
  const FrobeniusLift F = default_lift(L);
  EXPECT_TRUE(F.images[0] == L.monomial({3}, ctx.one()));
  EXPECT_TRUE(reduces_to_frobenius(F));

  const AlgebraPresentation T = torus(ctx, 30);
  const FrobeniusLift G = default_lift(T);
  EXPECT_TRUE(G.images[0] == T.monomial({3}, ctx.one()));
  EXPECT_TRUE(apply_lift(G, T.monomial({-1}, ctx.one())) == T.monomial({-3}, ctx.one()));
}

TEST(DefaultLift, HyperellipticSatisfiesTheCurveEquation) {
  const PadicContext ctx{5, 6};
  const AlgebraPresentation H = hyperelliptic(ctx, {1, 1, 0, 1}, detail::exact_lift_cap(5, 6));
  const FrobeniusLift F = default_lift(H);
  EXPECT_TRUE(reduces_to_frobenius(F));
  const DaggerSeries Fx = F.images[0], Fy = F.images[1];
  // F(y)^2 - f(F(x)) = 0 in the algebra
  DaggerSeries fFx = H.one() + Fx + H.mul(H.mul(Fx, Fx), Fx);
  EXPECT_TRUE(H.normalize(H.mul(Fy, Fy) - fFx).is_zero());
  // the lift of 1/y really inverts F(y)
  ASSERT_TRUE(F.inverse_images[1].has_value());
  EXPECT_TRUE(H.normalize(H.mul(Fy, *F.inverse_images[1]) - H.one()).is_zero());
}

TEST(SubstitutedLift, StillReducesToFrobenius) {
  const PadicContext ctx{7, 6};
  const AlgebraPresentation H = hyperelliptic(ctx, {1, 1, 0, 1}, 40);
  const PadicPoly u(ctx, {ctx.integer(2), ctx.integer(-1), ctx.integer(3)});
  const FrobeniusLift F = substituted_lift(H, u);
  EXPECT_FALSE(F.standard);
  EXPECT_TRUE(reduces_to_frobenius(F));
  EXPECT_FALSE(F.images[0] == default_lift(H).images[0]);
}

TEST(FrobeniusPullback, ChainRule) {
  const long p = 5;
  const PadicContext ctx{p, 8};
  const AlgebraPresentation L = affine_line(ctx, 40);
  EXPECT_TRUE(forms_equal(L, frobenius_pullback(default_lift(L), x_power_dx(L, 0)), x_power_dx(L, p - 1, p)));

  const AlgebraPresentation T = torus(ctx, 40);
  EXPECT_TRUE(forms_equal(T, frobenius_pullback(default_lift(T), x_power_dx(T, -1)), x_power_dx(T, -1, p)));

  const DifferentialForm one = DifferentialForm::function(L.one());
  EXPECT_TRUE(forms_equal(L, frobenius_pullback(default_lift(L), one), one));
}

TEST(PsiSeries, MonomialRules) {
  const long p = 5;
  const PadicContext ctx{p, 8};
  const AlgebraPresentation L = affine_line(ctx, 40);
  EXPECT_TRUE(psi_series(L, L.one()) == L.constant(ctx.integer(p)));
  EXPECT_TRUE(psi_series(L, L.monomial({p}, ctx.one())) == L.monomial({1}, ctx.integer(p)));
  EXPECT_TRUE(psi_series(L, L.monomial({p + 1}, ctx.one())).is_zero());
  const AlgebraPresentation T = torus(ctx, 40);
  EXPECT_TRUE(psi_series(T, T.monomial({-2 * p}, ctx.one())) == T.monomial({-2}, ctx.integer(p)));
}

TEST(PsiForm, MonomialRules) {
  const long p = 7;
  const PadicContext ctx{p, 8};
  const AlgebraPresentation T = torus(ctx, 60);
  EXPECT_TRUE(forms_equal(T, psi_form(T, x_power_dx(T, -1)), x_power_dx(T, -1)));
  const AlgebraPresentation L = affine_line(ctx, 60);
  EXPECT_TRUE(forms_equal(L, psi_form(L, x_power_dx(L, p - 1)), x_power_dx(L, 0)));
  // brute force over a window: zero exactly when p does not divide m + 1
  for (int m = -30; m <= 30; ++m) {
    const DifferentialForm r = psi_form(T, x_power_dx(T, m));
    if ((m + 1) % p != 0)
      EXPECT_TRUE(r.is_zero()) << m;
    else
      EXPECT_TRUE(forms_equal(T, r, x_power_dx(T, (m + 1) / p - 1))) << m;
  }
}

TEST(PsiForm, RejectsHigherDegreeAndGenericAlgebras) {
  const PadicContext ctx{5, 6};
  const AlgebraPresentation G = generic_presentation(ctx, 1, {}, {}, 10);
  EXPECT_THROW(psi_series(G, G.one()), Error);
  EXPECT_THROW(default_lift(G), Error);
  DifferentialForm two;
  two.degree = 2;
  EXPECT_THROW(psi_form(affine_line(ctx, 10), two), Error);
}

TEST(PsiIdentities, AffineLine) {
  const SuiteResult r = psi_identity_suite(Family::AffineLine, 5, 100, 1);
  EXPECT_TRUE(r.ok()) << r.first_failure;
  EXPECT_EQ(r.cases, 400);
}

TEST(PsiIdentities, Torus) {
  const SuiteResult r = psi_identity_suite(Family::Torus, 3, 100, 2);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}

TEST(PsiIdentities, HyperellipticSmallSample) {
  const SuiteResult r = psi_identity_suite(Family::Hyperelliptic, 3, 20, 3);
  EXPECT_TRUE(r.ok()) << r.first_failure;
}
