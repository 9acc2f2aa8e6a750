#include <gtest/gtest.h>

#include <random>

#include "mwzeta/dagger_algebra.hpp"

using namespace mwzeta;

namespace {

DaggerSeries random_function(const AlgebraPresentation& A, std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> e(lo, hi), c(-20, 20);
  DaggerSeries a = A.zero();
  for (int t = 0; t < 4; ++t) {
    Exponent v(static_cast<std::size_t>(A.nvars), 0);
    for (int i = 0; i < A.nvars; ++i) v[static_cast<std::size_t>(i)] = A.inverted[static_cast<std::size_t>(i)] ? e(rng) : std::abs(e(rng));
    a += A.monomial(v, A.ctx.integer(c(rng)));
  }
  return A.normalize(a);
}

}  // namespace

TEST(Presentations, FamilyShapes) {
  const PadicContext ctx{5, 6};
  EXPECT_EQ(affine_line(ctx, 10).nvars, 1);
  EXPECT_FALSE(affine_line(ctx, 10).inverted[0]);
  EXPECT_TRUE(torus(ctx, 10).inverted[0]);
  const AlgebraPresentation H = hyperelliptic({7, 6}, {1, 1, 0, 1}, 20);
  EXPECT_EQ(H.nvars, 2);
  EXPECT_EQ(H.genus, 1);
  EXPECT_EQ(H.relations.size(), 1u);
  EXPECT_TRUE(H.inverted[1]);
}

TEST(Presentations, HyperellipticInputChecks) {
  EXPECT_THROW(hyperelliptic({3, 6}, {0, 0, 0, 1}, 20), Error);   // x^3 is not squarefree
  EXPECT_THROW(hyperelliptic({7, 6}, {1, 1, 1}, 20), Error);      // even degree
  EXPECT_THROW(hyperelliptic({2, 6}, {1, 1, 0, 1}, 20), Error);   // p = 2
  EXPECT_THROW(hyperelliptic({7, 6}, {1, 1, 0, 7}, 20), Error);   // leading coefficient vanishes
  EXPECT_TRUE(is_squarefree_mod_p({1, 1, 0, 1}, 7));
  EXPECT_FALSE(is_squarefree_mod_p({0, 0, 0, 1}, 3));
}

TEST(Localize, InvertingTheCoordinateGivesTheTorus) {
  const AlgebraPresentation A = affine_line({5, 6}, 10);
  const AlgebraPresentation B = localize(A, A.variable(0));
  EXPECT_EQ(B.family, Family::Torus);
  EXPECT_TRUE(B.inverted[0]);
  EXPECT_TRUE(B.relations.empty());
}

TEST(Localize, GeneralElementAddsAVariableAndRelation) {
  const PadicContext ctx{5, 6};
  const AlgebraPresentation A = affine_line(ctx, 10);
  const AlgebraPresentation B = localize(A, A.variable(0) - A.one());
  ASSERT_EQ(B.nvars, 2);
  ASSERT_EQ(B.relations.size(), 1u);
  // (x - 1) y - 1
  DaggerSeries expect(ctx, 2);
  expect.add_term({1, 1}, ctx.one());
  expect.add_term({0, 1}, -ctx.one());
  expect.add_term({0, 0}, -ctx.one());
  EXPECT_TRUE(B.relations[0] == expect);
}

TEST(Localize, ElementVanishingModPIsRejected) {
  const AlgebraPresentation A = affine_line({5, 6}, 10);
  EXPECT_THROW(localize(A, A.ctx.integer(5) * A.variable(0)), Error);
}

TEST(Product, ShapesOfFactors) {
  const PadicContext ctx{5, 6};
  const AlgebraPresentation L = affine_line(ctx, 10), T = torus(ctx, 10);
  const AlgebraPresentation LL = product(L, L);
  EXPECT_EQ(LL.nvars, 2);
  EXPECT_TRUE(LL.relations.empty());
  EXPECT_EQ(LL.inverted, (std::vector<bool>{false, false}));
  EXPECT_EQ(product(T, T).inverted, (std::vector<bool>{true, true}));
  const AlgebraPresentation same = product(L, trivial_algebra(ctx));
  EXPECT_EQ(same.nvars, 1);
  EXPECT_EQ(same.family, Family::AffineLine);
}

TEST(Omega1, AffineLineIsFreeOfRankOne) {
  const Omega1Presentation o = omega1_presentation(affine_line({5, 6}, 10));
  EXPECT_EQ(o.generators, 1);
  EXPECT_EQ(o.rank, 1);
  EXPECT_TRUE(o.relation_forms.empty());
}

TEST(Omega1, HyperellipticEliminatesDy) {
  const PadicContext ctx{7, 6};
  const AlgebraPresentation H = hyperelliptic(ctx, {1, 1, 0, 1}, 20);
  const Omega1Presentation o = omega1_presentation(H);
  ASSERT_EQ(o.relation_forms.size(), 1u);
  EXPECT_EQ(o.eliminated, (std::vector<int>{1}));
  EXPECT_EQ(o.rank, 1);
  // d(y^2 - f) = 2y dy - f'(x) dx
  const DifferentialForm& r = o.relation_forms[0];
  DaggerSeries two_y(ctx, 2, H.inverted);
  two_y.add_term({0, 1}, ctx.integer(2));
  DaggerSeries minus_fprime(ctx, 2, H.inverted);
  minus_fprime.add_term({0, 0}, ctx.integer(-1));
  minus_fprime.add_term({2, 0}, ctx.integer(-3));
  EXPECT_TRUE(r.coeff({1}, H.zero()) == two_y);
  EXPECT_TRUE(r.coeff({0}, H.zero()) == minus_fprime);
}

TEST(ExteriorDerivative, PowerRule) {
  const PadicContext ctx{5, 8};
  const AlgebraPresentation A = affine_line(ctx, 20);
  for (int m = 0; m <= 12; ++m) {
    const DifferentialForm w = d(A, A.monomial({m}, ctx.one()));
    const DaggerSeries expect = m ? A.monomial({m - 1}, ctx.integer(m)) : A.zero();
    EXPECT_TRUE(w.coeff({0}, A.zero()) == expect) << m;
  }
}

TEST(ExteriorDerivative, HyperellipticDyIsEliminated) {
  // d(y) = f'(x) / (2y) dx, i.e. 2 y^2 d(y) = y f'(x) dx
  const PadicContext ctx{7, 8};
  const AlgebraPresentation H = hyperelliptic(ctx, {1, 1, 0, 1}, 30);
  const DifferentialForm dy = d(H, H.variable(1));
  ASSERT_EQ(dy.degree, 1);
  const DaggerSeries lhs = H.mul(H.monomial({0, 2}, ctx.integer(2)), dy.coeff({0}, H.zero()));
  DaggerSeries yfp = H.zero();
  yfp += H.monomial({0, 1}, ctx.one());
  yfp += H.monomial({2, 1}, ctx.integer(3));
  EXPECT_TRUE(H.normalize(lhs - yfp).is_zero());
}

TEST(ExteriorDerivative, SquareIsZeroAndLeibnizHolds) {
  std::mt19937_64 rng(17);
  const PadicContext ctx{5, 8};
  const std::vector<AlgebraPresentation> algebras = {affine_line(ctx, 30), torus(ctx, 30),
                                                     hyperelliptic(ctx, {1, 1, 0, 1}, 30)};
  for (const auto& A : algebras) {
    const int lo = A.family == Family::AffineLine ? 0 : -3;
    for (int k = 0; k < 40; ++k) {
      const DaggerSeries f = random_function(A, rng, lo, 3), g = random_function(A, rng, lo, 3);
      EXPECT_TRUE(d(A, d(A, f)).is_zero()) << to_string(A.family);
      const DifferentialForm lhs = d(A, A.mul(f, g));
      const DifferentialForm rhs = scale(A, g, d(A, f)) + scale(A, f, d(A, g));
      EXPECT_TRUE(forms_equal(A, lhs, rhs)) << to_string(A.family);
    }
  }
}

TEST(ExteriorDerivative, LocalizeCommutesWithOmega1OnTheTorus) {
  // build the torus by localizing the line, then compare d on shared monomials
  const PadicContext ctx{5, 8};
  const AlgebraPresentation L = affine_line(ctx, 20);
  const AlgebraPresentation viaLocalize = localize(L, L.variable(0));
  const AlgebraPresentation T = torus(ctx, 20);
  EXPECT_EQ(omega1_presentation(viaLocalize).rank, 1);
  EXPECT_EQ(omega1_presentation(T).rank, 1);
  for (int m = -6; m <= 6; ++m) {
    const DifferentialForm a = d(viaLocalize, viaLocalize.monomial({m}, ctx.one()));
    const DifferentialForm b = d(T, T.monomial({m}, ctx.one()));
    EXPECT_TRUE(a.coeff({0}, T.zero()) == b.coeff({0}, T.zero())) << m;
  }
}

TEST(DeRham, ComplexLengths) {
  const PadicContext ctx{5, 8};
  EXPECT_EQ(derham_complex(affine_line(ctx, 10)).ranks, (std::vector<int>{1, 1}));
  EXPECT_EQ(derham_complex(torus(ctx, 10)).length(), 2);
  EXPECT_THROW(derham_complex(generic_presentation(ctx, 2, {}, {}, 10)), Error);
}

TEST(Substitution, PullbackAlongInversionIsARingMap) {
  const PadicContext ctx{5, 8};
  const AlgebraPresentation T = torus(ctx, 40);
  const Substitution inv{T, T, {T.monomial({-1}, ctx.one())}, {T.monomial({1}, ctx.one())}};
  std::mt19937_64 rng(4);
  for (int k = 0; k < 20; ++k) {
    const DaggerSeries a = random_function(T, rng, -4, 4), b = random_function(T, rng, -4, 4);
    EXPECT_TRUE(apply(inv, T.mul(a, b)) == T.mul(apply(inv, a), apply(inv, b)));
    EXPECT_TRUE(apply(inv, apply(inv, a)) == a);
    // pullback commutes with d
    EXPECT_TRUE(forms_equal(T, pullback(inv, d(T, a)), d(T, apply(inv, a))));
  }
}
