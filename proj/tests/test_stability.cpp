#include <gtest/gtest.h>

#include "kstab/bernstein.hpp"
#include "kstab/stability.hpp"
#include "test_support.hpp"

using namespace kstab;
using namespace kstab::testing;

namespace {

Polynomial k(std::size_t dim, const Rational& a) { return Polynomial::constant(dim, a); }

Rational ipow(const Rational& a, unsigned e) {
  Rational r = 1;
  while (e-- > 0) r *= a;
  return r;
}

FibrationData rank_one(const Rational& p, const Rational& c) {
  return make_fibration(unit_interval(), {BaseFactor{3, -6, c, AffineFunc::linear({p})}});
}

FibrationData reference_bundle() {
  return projective_bundle({{1, 2}}, {{3, Rational(18)}}, {Rational(12)}, 1).fibration;
}

/// A fibration whose cone conditions are not concave, so certification needs
/// Bernstein subdivision below the top level.
FibrationData non_concave_instance() {
  return make_fibration(triangle(), {BaseFactor{2, 60, 3, AffineFunc::linear({1, 0})}});
}

Point random_point_in(const Simplex& s) {
  std::vector<Rational> wts;
  Rational total = 0;
  for (std::size_t i = 0; i < s.vertices().size(); ++i) {
    wts.emplace_back(uniform_int(0, 1000));
    total += wts.back();
  }
  if (total == 0) return s.vertex(0);
  Point x(s.ambient_dim());
  for (std::size_t i = 0; i < wts.size(); ++i) x = x + (wts[i] / total) * s.vertex(i);
  return x;
}

}  // namespace

TEST(ConditionPoly, ConstantWeights) {
  const auto p = triangle();
  const Point x0{Rational(1, 3), Rational(-1, 4)};
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    EXPECT_EQ(condition_poly_general(p, x0, j, k(2, 1), k(2, 0)), k(2, 3 / p.label(j)(x0)));
  }
}

TEST(ConditionPoly, IntervalReducesToHalfIntervalBound) {
  const auto i = unit_interval();
  const Polynomial x = Polynomial::variable(1, 0);
  const Polynomial w0 = x * x + k(1, 1);
  for (const Rational& x0 : {Rational(0), Rational(1, 3), Rational(-1, 2)}) {
    // Facet 0 is x = -1 (L = 1 + x), facet 1 is x = 1 (L = 1 - x).
    EXPECT_EQ(condition_poly_general(i, {x0}, 0, k(1, 1), w0), k(1, 2 / (1 + x0)) - Rational(1, 2) * w0);
    EXPECT_EQ(condition_poly_general(i, {x0}, 1, k(1, 1), w0), k(1, 2 / (1 - x0)) - Rational(1, 2) * w0);
  }
}

TEST(ConditionPoly, MonotoneSpecialization) {
  for (const auto& p : {triangle(), standard_fiber_polytope(2, 3), hexagon(), standard_fiber_polytope(3, 1)}) {
    const auto mp = monotone_point(p);
    ASSERT_TRUE(mp.has_value());
    const Polynomial v = random_polynomial(p.dim(), 3), w = random_polynomial(p.dim(), 3);
    const Rational lp1(static_cast<long>(p.dim()) + 1);
    const Polynomial expect = (1 / mp->t) * (lp1 * v + radial_derivative(v, mp->x0)) - Rational(1, 2) * w;
    for (std::size_t j = 0; j < p.num_facets(); ++j) EXPECT_EQ(condition_poly_general(p, mp->x0, j, v, w), expect);
  }
}

TEST(CheckGeneral, UnweightedLine) {
  const auto rep = check_general(unit_interval(), {0}, k(1, 1), k(1, 2));
  EXPECT_EQ(rep.verdict, Verdict::CertifiedSufficient);
  EXPECT_EQ(rep.method, Method::AffineVertex);
  EXPECT_EQ(*rep.min_value, 1);
  EXPECT_EQ(rep.convention, Convention::Canonical);
}

TEST(CheckGeneral, FutakiPrerequisite) {
  try {
    check_general(unit_interval(), {0}, k(1, 1), k(1, 5));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FutakiNotVanishing);
  }
  // Random weights almost never annihilate affine functions.
  for (int r = 0; r < 5; ++r) {
    const Polynomial w = random_polynomial(2, 2) + k(2, 17);
    EXPECT_THROW(check_general(triangle(), {0, 0}, k(2, 1), w), Error);
  }
}

TEST(CheckGeneral, FanoProductHasMarginTwoInFanoUnits) {
  for (const auto& fiber : {unit_interval(), triangle(), hexagon()}) {
    const auto fib = fano_anticanonical(fiber, {FactorShape{3, AffineFunc::linear(Point(fiber.dim()))}}, {4});
    const auto rep = check_fibration_general(fib);
    EXPECT_EQ(rep.verdict, Verdict::CertifiedSufficient);
    const auto fano = check_fano_fiber(fib);
    EXPECT_EQ(fano.verdict, Verdict::CertifiedSufficient);
    EXPECT_EQ(*fano.min_value, 2);
  }
}

TEST(ConditionValueFano, Examples) {
  const auto prod = fano_anticanonical(triangle(), {FactorShape{3, AffineFunc::linear({0, 0})}}, {3});
  const auto l = extremal_affine(prod).l_ext;
  for (int r = 0; r < 5; ++r) EXPECT_EQ(condition_value_fano(prod, l, random_interior_point(triangle())), 2);

  // Oracle: tests/oracles/fibration_oracle.py.
  const auto app = reference_bundle();
  const auto la = extremal_affine(app).l_ext;
  EXPECT_EQ(condition_value_fano(app, la, {-1, -1}), Rational(239981349, 67470350));
  EXPECT_EQ(condition_value_fano(app, la, {-1, 2}), Rational(39718961, 67470350));
  EXPECT_EQ(condition_value_fano(app, la, {2, -1}), Rational(132303479, 67470350));

  // c = t s / (2 n) cancels the middle term.
  const auto t = Rational(3, 2);
  const auto cancel =
      make_fibration(standard_fiber_polytope(2, t), {BaseFactor{2, 8, t * 8 / 4, AffineFunc::linear({0, 0})}});
  const auto lc = extremal_affine(cancel).l_ext;
  const Point x{Rational(1, 2), 0};
  EXPECT_EQ(condition_value_fano(cancel, lc, x), 2 * Rational(cancel.total_dim()) + 2 - t * lc(x));
}

TEST(CheckFanoFiber, ReferenceBundleBothConventions) {
  const auto app = reference_bundle();
  const auto canon = check_fano_fiber(app);
  EXPECT_EQ(canon.verdict, Verdict::CertifiedSufficient);
  EXPECT_EQ(canon.method, Method::VertexConcave);
  EXPECT_EQ(*canon.min_value, Rational(39718961, 67470350));

  const auto legacy = check_fano_fiber(app, Convention::LegacyAppendix);
  EXPECT_EQ(legacy.convention, Convention::LegacyAppendix);
  EXPECT_EQ(legacy.verdict, Verdict::CertifiedSufficient);
  std::vector<Rational> got;
  for (const auto& vv : legacy.vertex_values) got.push_back(vv.value);
  EXPECT_EQ(got, (std::vector<Rational>{Rational(19845603, 2698814), Rational(39126563, 13494070),
                                        Rational(13340659, 2698814)}));
}

TEST(CheckFanoFiber, RankOneGrid) {
  for (long p = 1; p <= 10; ++p) {
    for (auto conv : {Convention::Canonical, Convention::LegacyAppendix}) {
      const auto rep = check_fano_fiber(rank_one(p, 15 * p), conv);
      EXPECT_EQ(rep.verdict, Verdict::CertifiedSufficient) << "p = " << p;
    }
  }
}

TEST(CheckFanoFiber, RankOneRefutedNearPole) {
  const auto fib = rank_one(1, Rational(11, 10));
  const auto rep = check_fano_fiber(fib);
  ASSERT_EQ(rep.verdict, Verdict::ConditionFails);
  EXPECT_EQ(*rep.witness, (Point{-1}));
  EXPECT_EQ(*rep.witness_value, Rational(-185843258, 2084741));
  EXPECT_EQ(condition_value_fano(fib, *rep.l_ext, *rep.witness), *rep.witness_value);
}

TEST(CheckFanoFiber, LegacyRankOneClosedForm) {
  // Closed form of the legacy vertex values in (p, c); A, B and the
  // denominators come from tests/oracles/fibration_oracle.py.
  for (const auto& [p, c] : std::vector<std::pair<Rational, Rational>>{
           {1, 15}, {2, 7}, {Rational(1, 3), Rational(5, 2)}, {3, 100}, {1, Rational(11, 10)}}) {
    const Rational a = 75 * ipow(c, 7) - 300 * ipow(c, 6) - 65 * ipow(c, 5) * ipow(p, 2) + 160 * ipow(c, 4) * ipow(p, 2) -
                       15 * ipow(c, 3) * ipow(p, 4) - 180 * ipow(c, 2) * ipow(p, 4) - 27 * c * ipow(p, 6) + 48 * ipow(p, 6);
    const Rational b = -75 * ipow(c, 6) * p + 5 * ipow(c, 4) * ipow(p, 3) + 80 * ipow(c, 3) * ipow(p, 3) -
                       105 * ipow(c, 2) * ipow(p, 5) + 15 * ipow(p, 7);
    const Rational common = (p * p - 5 * c * c) * (5 * ipow(c, 4) + 3 * ipow(p, 4));
    const auto fib = rank_one(p, c);
    const auto l = extremal_affine(fib, Convention::LegacyAppendix).l_ext;
    EXPECT_EQ(condition_value_fano(fib, l, {-1}), (a + b) / ((p - c) * common));
    EXPECT_EQ(condition_value_fano(fib, l, {1}), -(a - b) / ((c + p) * common));
  }
}

TEST(CheckFanoFiber, NotMonotone) {
  const auto fib = make_fibration(trapezoid(), {BaseFactor{1, 2, 5, AffineFunc::linear({0, 0})}});
  EXPECT_THROW(check_fano_fiber(fib), Error);
}

TEST(CheckFanoFiber, FallsBackWithoutHypothesis) {
  const auto rep = check_fano_fiber(non_concave_instance());
  EXPECT_EQ(rep.verdict, Verdict::CertifiedSufficient);
  EXPECT_EQ(rep.method, Method::BernsteinSubdivision);
  EXPECT_FALSE(rep.notes.empty());
}

TEST(CheckFanoTotal, Examples) {
  const auto prod = fano_anticanonical(triangle(), {FactorShape{3, AffineFunc::linear({0, 0})}}, {4});
  const auto rep = check_fano_total(prod);
  EXPECT_EQ(rep.verdict, Verdict::CertifiedSufficient);
  EXPECT_EQ(*rep.min_value, 2);

  const auto bundle = fano_anticanonical(triangle(), {FactorShape{3, AffineFunc::linear({1, 2})}}, {4});
  const auto rb = check_fano_total(bundle);
  Rational sup = rb.vertex_values.front().value;
  for (const auto& vv : rb.vertex_values) sup = std::max(sup, vv.value);
  for (int r = 0; r < 20; ++r) EXPECT_LE((*rb.l_ext)(random_interior_point(triangle())), sup);
  EXPECT_EQ(rb.verdict == Verdict::CertifiedSufficient, sup <= 2 * Rational(bundle.total_dim() + 1));

  EXPECT_THROW(check_fano_total(reference_bundle()), Error);
}

TEST(Bernstein, Certificates) {
  const Simplex unit({{0}, {1}});
  const Polynomial x = Polynomial::variable(1, 0);
  EXPECT_EQ(certify_nonnegative(unit, x * (k(1, 1) - x)).outcome, CertOutcome::Certified);

  const auto neg = certify_nonnegative(unit, (x - k(1, Rational(1, 2))) * (x - k(1, Rational(1, 2))) - k(1, Rational(1, 100)));
  ASSERT_EQ(neg.outcome, CertOutcome::Refuted);
  EXPECT_LT(*neg.value, 0);

  // A double root at a non-dyadic point cannot be certified by subdivision.
  const Polynomial sq = (x - k(1, Rational(1, 3))) * (x - k(1, Rational(1, 3)));
  EXPECT_EQ(certify_nonnegative(unit, sq, 4).outcome, CertOutcome::Inconclusive);
}

TEST(Bernstein, CoefficientsReproducePolynomial) {
  const Simplex s({{0, 0}, {2, 0}, {0, 3}});
  const Polynomial p = random_polynomial(2, 3);
  const auto coeffs = bernstein_coefficients(s, p);
  // Barycentric evaluation at the centroid: sum b_a * multinomial(a) / 3^deg.
  Rational acc = 0;
  unsigned deg = 0;
  for (const auto& [e, b] : coeffs) deg = std::max(deg, total_degree(e));
  for (const auto& [e, b] : coeffs) {
    Integer multi = factorial(deg);
    for (auto a : e) multi /= factorial(a);
    Rational pw = 1;
    for (unsigned i = 0; i < deg; ++i) pw /= 3;
    acc += b * Rational(multi) * pw;
  }
  EXPECT_EQ(acc, p(s.centroid()));
}

TEST(StabilityProperty, BernsteinCertificateIsSound) {
  const auto fib = non_concave_instance();
  const auto rep = check_fibration_general(fib);
  ASSERT_EQ(rep.verdict, Verdict::CertifiedSufficient);
  ASSERT_EQ(rep.method, Method::BernsteinSubdivision);
  EXPECT_GE(rep.depth, 1u);

  const auto wp = make_weights(fib);
  const auto l = extremal_affine(fib).l_ext;
  const Polynomial w = extremal_w(l, wp.v, wp.w_base);
  const auto cd = cone_decomposition(fib.fiber, rep.x0);
  for (std::size_t j = 0; j < cd.cells.size(); ++j) {
    const Polynomial g = condition_poly_general(fib.fiber, rep.x0, j, wp.v, w);
    for (const auto& cell : cd.cells[j])
      for (int r = 0; r < 1000; ++r) ASSERT_GE(g(random_point_in(cell)), 0);
  }
}

TEST(StabilityProperty, RefutationIsSound) {
  for (const Rational& c : {Rational(11, 10), Rational(6, 5), Rational(3, 2)}) {
    const auto fib = rank_one(1, c);
    for (auto conv : {Convention::Canonical, Convention::LegacyAppendix}) {
      const auto rep = check_fano_fiber(fib, conv);
      if (rep.verdict != Verdict::ConditionFails) continue;
      EXPECT_LT(*rep.witness_value, 0);
      EXPECT_EQ(condition_value_fano(fib, *rep.l_ext, *rep.witness), *rep.witness_value);
    }
    const auto gen = check_fibration_general(fib);
    const auto wp = make_weights(fib);
    const Polynomial w = extremal_w(*gen.l_ext, wp.v, wp.w_base);
    for (const auto& cell : gen.per_cone) {
      if (cell.verdict != Verdict::ConditionFails) continue;
      const Polynomial g = condition_poly_general(fib.fiber, gen.x0, cell.facet, wp.v, w);
      EXPECT_EQ(g(*cell.witness), *cell.value);
      EXPECT_LT(*cell.value, 0);
    }
  }
}

TEST(StabilityProperty, ContinuityAroundFanoProduct) {
  const auto base = fano_anticanonical(triangle(), {FactorShape{3, AffineFunc::linear({0, 0})}}, {3});
  ASSERT_EQ(*check_fano_fiber(base).min_value, 2);
  std::optional<Rational> eps;
  for (Rational e = 1; e > Rational(1, 1 << 20); e /= 2) {
    bool ok = true;
    for (const Rational& sg : {Rational(1), Rational(-1)}) {
      auto fs = base.factors;
      fs[0].c += sg * e;
      const auto rep = check_fano_fiber(make_fibration(base.fiber, fs));
      ok = ok && rep.verdict == Verdict::CertifiedSufficient;
    }
    if (ok) {
      eps = e;
      break;
    }
  }
  ASSERT_TRUE(eps.has_value());
  // Everything inside the found neighborhood is certified as well.
  for (int r = 1; r <= 4; ++r) {
    auto fs = base.factors;
    fs[0].c += *eps * Rational(r, 5) * (r % 2 ? 1 : -1);
    EXPECT_EQ(check_fano_fiber(make_fibration(base.fiber, fs)).verdict, Verdict::CertifiedSufficient);
  }
}

TEST(Threshold, ProductCaseIsLowerEnd) {
  FibrationTemplate t{triangle(), {BaseFactor{3, 24, 5, AffineFunc::linear({0, 0})}}, {true}};
  const auto res = threshold_c(t, 4, 20);
  EXPECT_EQ(res.hi, 4);
  EXPECT_EQ(res.verdict, Verdict::CertifiedSufficient);
  EXPECT_TRUE(res.holds_at_hi);
}

TEST(Threshold, CanonicalProjectiveSpaceBase) {
  FibrationTemplate t{triangle(), {BaseFactor{3, 24, 5, AffineFunc::linear({1, 2})}}, {true}};
  const auto res = threshold_c(t, 4, 40);
  EXPECT_EQ(res.convention, Convention::Canonical);
  EXPECT_LE(res.hi - res.lo, Rational(1, 100));
  // The exact largest vertex root is 7.899414...
  EXPECT_LT(res.lo, Rational(78994, 10000));
  EXPECT_GT(res.hi, Rational(78994, 10000));
  EXPECT_TRUE(res.holds_at_hi);
  EXPECT_TRUE(res.certified_beyond_hi);
}

TEST(Threshold, HypothesisViolated) {
  FibrationTemplate t{triangle(), {BaseFactor{3, 24, 5, AffineFunc::linear({1, 2})}}, {true}};
  try {
    threshold_c(t, 2, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::HypothesisViolatedOnBracket);
  }
}
