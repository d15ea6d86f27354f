#include <gtest/gtest.h>

#include <set>

#include "kstab/probe.hpp"
#include "kstab/stability.hpp"
#include "test_support.hpp"

using namespace kstab;
using namespace kstab::testing;

namespace {

Polynomial k(std::size_t dim, const Rational& a) { return Polynomial::constant(dim, a); }

/// w = -8 + 30 x^2 on [-1, 1]: F vanishes on affine functions but
/// F(|x|) = 4 - 7 < 0.
Polynomial unstable_w() {
  const Polynomial x = Polynomial::variable(1, 0);
  return 30 * x * x - k(1, 8);
}

}  // namespace

TEST(CreaseFamily, IntervalResolutionOne) {
  const auto fam = crease_family(unit_interval(), {0}, 1);
  bool found = false;
  for (const auto& c : fam) {
    EXPECT_LE(c.h({0}), 0);
    if (c.h == af({1}, Rational(-1, 2))) found = true;
  }
  EXPECT_TRUE(found);
  // offsets {-1/2, 0, 1/2}, two signs, h(0) <= 0: x, x - 1/2, -x, -x - 1/2.
  EXPECT_EQ(fam.size(), 4u);
}

TEST(CreaseFamily, DegenerateCreasesExcluded) {
  for (const auto& p : {unit_interval(), triangle(), hexagon()}) {
    for (const auto& c : crease_family(p, Point(p.dim()), 2)) {
      bool pos = false, neg = false;
      for (const auto& v : p.vertices()) {
        pos = pos || c.h(v) > 0;
        neg = neg || c.h(v) < 0;
      }
      EXPECT_TRUE(pos && neg);
    }
  }
  // max(0, x - 1) is identically zero on [-1, 1].
  for (const auto& c : crease_family(unit_interval(), {0}, 4)) EXPECT_NE(c.h, af({1}, -1));
}

TEST(CreaseFamily, TriangleDirections) {
  std::set<std::vector<long>> dirs;
  for (const auto& c : crease_family(triangle(), {0, 0}, 1)) dirs.insert(c.direction);
  for (const std::vector<long>& d : {std::vector<long>{1, 0}, {0, 1}, {1, 1}, {1, -1}, {-1, 0}, {-1, -1}})
    EXPECT_TRUE(dirs.count(d)) << d[0] << "," << d[1];
  for (const auto& d : dirs) {
    EXPECT_LE(std::abs(d[0]), 1);
    EXPECT_LE(std::abs(d[1]), 1);
  }
}

TEST(CreaseFamily, Preconditions) {
  EXPECT_THROW(crease_family(unit_interval(), {1}, 2), Error);
  EXPECT_THROW(crease_family(unit_interval(), {0}, 0), Error);
}

TEST(EvaluateCrease, IntervalClosedForm) {
  // F(max(0, x - q)) = 2 (1 - q) - (1 - q)^2 with v = 1, w = 2.
  for (const Rational& q : {Rational(-1, 2), Rational(0), Rational(1, 2), Rational(3, 4)}) {
    const Crease c{af({1}, -q), {1}, {q}};
    const auto val = evaluate_crease(unit_interval(), k(1, 1), k(1, 2), c);
    EXPECT_EQ(val.futaki, 2 * (1 - q) - (1 - q) * (1 - q));
    EXPECT_EQ(val.l1_norm, (1 - q) * (1 - q) / 2);
  }
}

TEST(Probe, StableLine) {
  const auto p = unit_interval();
  const auto rep = probe(p, k(1, 1), k(1, 2), crease_family(p, {0}, 4));
  ASSERT_TRUE(rep.min_ratio.has_value());
  EXPECT_GT(*rep.min_ratio, 0);
  EXPECT_FALSE(rep.destabilizer.has_value());
}

TEST(Probe, FanoProduct) {
  const auto fib = fano_anticanonical(triangle(), {FactorShape{3, AffineFunc::linear({0, 0})}}, {3});
  const auto wp = make_weights(fib);
  const Polynomial w = extremal_w(extremal_affine(fib).l_ext, wp.v, wp.w_base);
  const auto rep = probe(fib.fiber, wp.v, w, crease_family(fib.fiber, {0, 0}, 3));
  EXPECT_GT(*rep.min_ratio, 0);
  EXPECT_EQ(check_fano_fiber(fib).verdict, Verdict::CertifiedSufficient);
}

TEST(Probe, RequiresFutakiVanishing) {
  const auto p = unit_interval();
  EXPECT_THROW(probe(p, k(1, 1), k(1, 5), crease_family(p, {0}, 1)), Error);
}

TEST(ProbeProperty, ComplementaryCreasesAgree) {
  // max(0, h) - max(0, -h) = h is affine, so both creases share F when F|Aff = 0.
  const auto fib = projective_bundle({{1, 2}}, {{3, Rational(18)}}, {Rational(12)}, 1).fibration;
  const auto wp = make_weights(fib);
  const Polynomial w = extremal_w(extremal_affine(fib).l_ext, wp.v, wp.w_base);
  int checked = 0;
  for (const auto& c : crease_family(fib.fiber, {0, 0}, 2)) {
    if (checked == 12) break;
    const Crease opp{-c.h, c.direction, c.offset};
    EXPECT_EQ(evaluate_crease(fib.fiber, wp.v, w, c).futaki, evaluate_crease(fib.fiber, wp.v, w, opp).futaki);
    ++checked;
  }
  EXPECT_EQ(checked, 12);
}

TEST(ProbeProperty, ScaleInvariance) {
  const auto p = triangle();
  const Polynomial v = k(2, 1), w = k(2, 4);
  for (const auto& c : crease_family(p, {0, 0}, 1)) {
    const Crease scaled{Rational(7, 3) * c.h, c.direction, c.offset};
    EXPECT_EQ(evaluate_crease(p, v, w, c).ratio, evaluate_crease(p, v, w, scaled).ratio);
  }
}

TEST(ProbeProperty, EnlargingFamilyNeverRaisesMinimum) {
  const auto p = hexagon();
  const Polynomial v = k(2, 1), w = k(2, 4);
  auto small = crease_family(p, {0, 0}, 1);
  auto big = small;
  for (auto& c : crease_family(p, {0, 0}, 2)) big.push_back(c);
  EXPECT_LE(*probe(p, v, w, big).min_ratio, *probe(p, v, w, small).min_ratio);
}

TEST(ProbeProperty, CrossModuleSoundness) {
  const auto p = unit_interval();
  const Polynomial v = k(1, 1), w = unstable_w();
  const auto rep = probe(p, v, w, crease_family(p, {0}, 3));
  ASSERT_TRUE(rep.destabilizer.has_value());
  const auto& bad = rep.values[*rep.destabilizer];
  EXPECT_LT(bad.futaki, 0);
  EXPECT_EQ(evaluate_crease(p, v, w, bad.crease).futaki, bad.futaki);
  EXPECT_NE(check_general(p, {0}, v, w).verdict, Verdict::CertifiedSufficient);
}
