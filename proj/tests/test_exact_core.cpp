#include <gtest/gtest.h>

#include "kstab/affine.hpp"
#include "kstab/linalg.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/rational.hpp"
#include "test_support.hpp"

using namespace kstab;
using namespace kstab::testing;

namespace {

Polynomial x(std::size_t dim, std::size_t i) { return Polynomial::variable(dim, i); }

Polynomial c(std::size_t dim, const Rational& a) { return Polynomial::constant(dim, a); }

}  // namespace

TEST(Rational, LowestTermsAndSign) {
  const Rational q = parse_rational("6/-4");
  EXPECT_EQ(numerator_of(q), -3);
  EXPECT_EQ(denominator_of(q), 2);
  EXPECT_EQ(to_string(Rational(10, 5)), "2");
  EXPECT_EQ(to_string(Rational(-1, 3)), "-1/3");
}

TEST(Rational, RejectsDecimalsAndGarbage) {
  for (const char* bad : {"0.5", "1e3", "1/0", "", "abc", "1//2"}) {
    EXPECT_THROW(parse_rational(bad), Error) << bad;
  }
  EXPECT_EQ(parse_rational(" -7 "), Rational(-7));
}

TEST(Rational, ParsePoint) {
  const Point p = parse_point("1/2,-3");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], Rational(1, 2));
  EXPECT_EQ(p[1], Rational(-3));
}

TEST(PolyEval, Constant) { EXPECT_EQ(c(2, 1)({5, -3}), 1); }

TEST(PolyEval, MonomialProduct) { EXPECT_EQ((x(2, 0) * x(2, 1))({2, 3}), 6); }

TEST(PolyEval, ExpandedCube) {
  const Polynomial p = pow(x(2, 0) + c(2, 2), 3);
  EXPECT_EQ(p.terms().size(), 4u);
  EXPECT_EQ(p({1, 0}), 27);
}

TEST(PolyEval, DimensionMismatch) { EXPECT_THROW(x(2, 0)({1}), Error); }

TEST(PolyPartial, Examples) {
  EXPECT_EQ(partial(x(1, 0) * x(1, 0), 0), 2 * x(1, 0));
  EXPECT_TRUE(partial(c(2, 7), 1).is_zero());
  EXPECT_EQ(partial(x(2, 0) * x(2, 1) * x(2, 1), 1), 2 * x(2, 0) * x(2, 1));
  EXPECT_THROW(partial(x(2, 0), 2), Error);
}

TEST(RadialDerivative, Examples) {
  EXPECT_TRUE(radial_derivative(c(2, 5), {1, 1}).is_zero());
  EXPECT_EQ(radial_derivative(x(1, 0), {0}), x(1, 0));
  EXPECT_EQ(radial_derivative(x(1, 0) * x(1, 0), {1}), 2 * x(1, 0) * x(1, 0) - 2 * x(1, 0));
  EXPECT_THROW(radial_derivative(x(2, 0), {1}), Error);
}

TEST(ComposeAffine, Examples) {
  const Polynomial p = x(2, 0) * x(2, 1) + c(2, 3);
  EXPECT_EQ(compose_affine(p, Matrix::identity(2), {0, 0}), p);

  Matrix two(1, 1);
  two(0, 0) = 2;
  EXPECT_EQ(compose_affine(x(1, 0), two, {3}), 2 * x(1, 0) + c(1, 3));

  Matrix flip = Matrix::identity(2);
  flip(1, 1) = -1;
  EXPECT_EQ(compose_affine(x(2, 0) * x(2, 1), flip, {0, 0}), -(x(2, 0) * x(2, 1)));
}

TEST(Polynomial, CanonicalFormHasNoZeroTerms) {
  Polynomial p = x(2, 0) - x(2, 0);
  EXPECT_TRUE(p.is_zero());
  p.add_term({1, 1}, 0);
  EXPECT_TRUE(p.terms().empty());
  EXPECT_EQ(p.degree(), -1);
}

TEST(Polynomial, FromAffineMatchesEvaluation) {
  const AffineFunc f({Rational(1, 2), -3}, 7);
  const Polynomial p = Polynomial::from_affine(f);
  for (int k = 0; k < 20; ++k) {
    const Point pt = random_point(2);
    EXPECT_EQ(p(pt), f(pt));
  }
}

TEST(PolynomialProperty, Leibniz) {
  for (int k = 0; k < 40; ++k) {
    const Polynomial p = random_polynomial(3, 4), q = random_polynomial(3, 4);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(partial(p * q, i), partial(p, i) * q + p * partial(q, i));
  }
}

TEST(PolynomialProperty, EvaluationHomomorphism) {
  for (int k = 0; k < 40; ++k) {
    const Polynomial p = random_polynomial(2, 5), q = random_polynomial(2, 5);
    const Point pt = random_point(2);
    EXPECT_EQ((p * q)(pt), p(pt) * q(pt));
    EXPECT_EQ((p + q)(pt), p(pt) + q(pt));
  }
}

TEST(PolynomialProperty, RadialDerivativeVanishesAtBasePoint) {
  for (int k = 0; k < 40; ++k) {
    const Polynomial p = random_polynomial(3, 5);
    const Point x0 = random_point(3);
    EXPECT_EQ(radial_derivative(p, x0)(x0), 0);
  }
}

TEST(PolynomialProperty, ComposeRespectsComposition) {
  for (int k = 0; k < 20; ++k) {
    const Polynomial p = random_polynomial(2, 4);
    const Matrix a1 = random_invertible(2), a2 = random_invertible(2);
    const Point b1 = random_point(2), b2 = random_point(2);
    const Polynomial lhs = compose_affine(compose_affine(p, a1, b1), a2, b2);
    const Polynomial rhs = compose_affine(p, a1 * a2, a1 * b2 + b1);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Linalg, DeterminantAndInverse) {
  const Matrix a = Matrix::from_rows({{2, 1, 0}, {1, 3, 1}, {0, 1, 4}});
  EXPECT_EQ(determinant(a), 18);
  const auto inv = inverse(a);
  ASSERT_TRUE(inv.has_value());
  EXPECT_EQ(a * *inv, Matrix::identity(3));
  EXPECT_EQ(rank(Matrix::from_rows({{1, 2}, {2, 4}})), 1u);
  EXPECT_FALSE(inverse(Matrix::from_rows({{1, 2}, {2, 4}})).has_value());
}

TEST(Linalg, SolveAndNullSpace) {
  const Matrix a = Matrix::from_rows({{1, 1}, {1, -1}});
  const auto s = solve(a, {3, 1});
  ASSERT_TRUE(s.has_value());
  EXPECT_EQ(*s, (Point{2, 1}));

  const Matrix b = Matrix::from_rows({{1, 1, 1}});
  const auto ker = null_space(b);
  ASSERT_EQ(ker.size(), 2u);
  for (const auto& k : ker) EXPECT_EQ((b * k)[0], 0);
  EXPECT_FALSE(solve_unique(b, {1}).has_value());
}

TEST(Linalg, AffineDimension) {
  EXPECT_EQ(affine_dimension({{0, 0}, {1, 1}, {2, 2}}), 1);
  EXPECT_EQ(affine_dimension({{0, 0}, {1, 0}, {0, 1}}), 2);
}

TEST(AffineFunc, Arithmetic) {
  const AffineFunc f({1, 2}, 3), g({-1, 0}, 1);
  const Point pt{Rational(1, 2), Rational(-1, 3)};
  EXPECT_EQ((f + g)(pt), f(pt) + g(pt));
  EXPECT_EQ((Rational(3) * f)(pt), 3 * f(pt));
  EXPECT_EQ((-f)(pt), -f(pt));
  EXPECT_TRUE(AffineFunc::zero(2).is_constant());
  EXPECT_EQ(f.differential({1, 1}), 3);
}
