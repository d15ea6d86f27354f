#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kstab/affine.hpp"
#include "kstab/error.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// How the extremal affine function is normalized. Canonical solves the
/// vanishing of F(f) = 2 int_{dP} f v dsigma - int_P f w dx on affine f with
/// w = l_ext v - w_base. LegacyAppendix reproduces the older scripts: interior
/// term with the opposite sign and, in dimension one, boundary factor 1.
enum class Convention { Canonical, LegacyAppendix };

inline std::string_view convention_name(Convention c) {
  return c == Convention::Canonical ? "canonical" : "legacy";
}

/// One cscK base factor: complex dimension n, scalar curvature s, class
/// parameter c, and the linear form p of the one-parameter subgroup.
struct BaseFactor {
  unsigned n = 1;
  Rational s;
  Rational c;
  AffineFunc p;

  /// p + c as an affine function on the fiber's ambient space.
  AffineFunc shift() const { return AffineFunc(p.gradient(), c); }
};

struct FibrationData {
  LabelledPolytope fiber;
  std::vector<BaseFactor> factors;
  std::optional<MonotonePoint> fano_fiber;

  std::size_t dim() const { return fiber.dim(); }

  /// Complex dimension of the total space.
  unsigned total_dim() const {
    unsigned d = static_cast<unsigned>(fiber.dim());
    for (const auto& f : factors) d += f.n;
    return d;
  }
};

/// Validates and assembles fibration data; p + c must be positive at every
/// vertex of the fiber for every factor.
inline FibrationData make_fibration(LabelledPolytope fiber, std::vector<BaseFactor> factors) {
  for (std::size_t a = 0; a < factors.size(); ++a) {
    const auto& f = factors[a];
    if (f.n < 1) throw Error(ErrorCode::InvalidInput, "factor " + std::to_string(a) + ": n must be >= 1");
    require_same_dim(fiber.dim(), f.p.dim(), "linear form p");
    if (f.p.constant() != 0) {
      throw Error(ErrorCode::InvalidInput, "factor " + std::to_string(a) + ": p must be linear (zero constant)");
    }
    const auto u = f.shift();
    for (const auto& vtx : fiber.vertices()) {
      if (u(vtx) <= 0) {
        throw Error(ErrorCode::NonpositiveWeight, "p + c = " + to_string(u(vtx)) + " at vertex " + to_string(vtx) +
                                                      " for factor " + std::to_string(a));
      }
    }
  }
  FibrationData fib{std::move(fiber), std::move(factors), std::nullopt};
  fib.fano_fiber = monotone_point(fib.fiber);
  return fib;
}

inline Polynomial weight_v(const FibrationData& fib) {
  Polynomial v = Polynomial::constant(fib.dim(), 1);
  for (const auto& f : fib.factors) v *= pow(Polynomial::from_affine(f.shift()), f.n);
  return v;
}

/// sum_a s_a (p_a + c_a)^(n_a - 1) prod_{b != a} (p_b + c_b)^(n_b).
inline Polynomial weight_w_base(const FibrationData& fib) {
  Polynomial w(fib.dim());
  for (std::size_t a = 0; a < fib.factors.size(); ++a) {
    Polynomial term = Polynomial::constant(fib.dim(), fib.factors[a].s);
    for (std::size_t b = 0; b < fib.factors.size(); ++b) {
      const auto& f = fib.factors[b];
      term *= pow(Polynomial::from_affine(f.shift()), a == b ? f.n - 1 : f.n);
    }
    w += term;
  }
  return w;
}

struct WeightPair {
  Polynomial v;
  Polynomial w_base;
  Convention convention = Convention::Canonical;
};

inline WeightPair make_weights(const FibrationData& fib, Convention conv = Convention::Canonical) {
  return WeightPair{weight_v(fib), weight_w_base(fib), conv};
}

struct ProjectiveBundle {
  FibrationData fibration;
  /// Per factor: whether c_a > sum_i p_ai. This matches vertex positivity only
  /// when the degrees are normalized, so it is reported, never enforced.
  std::vector<bool> normalized_inequality;
};

/// The fiber is the standard dim-simplex scaled by t; factor a has
/// p_a = sum_i degrees[a][i] x_i.
inline ProjectiveBundle projective_bundle(const std::vector<Point>& degrees,
                                          const std::vector<std::pair<unsigned, Rational>>& base,
                                          const std::vector<Rational>& c, const Rational& t) {
  if (degrees.empty()) throw Error(ErrorCode::InvalidInput, "projective bundle needs at least one factor");
  require_same_dim(degrees.size(), base.size(), "base factor list");
  require_same_dim(degrees.size(), c.size(), "class parameter list");
  const std::size_t dim = degrees.front().size();
  auto fiber = standard_fiber_polytope(dim, t);
  std::vector<BaseFactor> factors;
  std::vector<bool> diag;
  for (std::size_t a = 0; a < degrees.size(); ++a) {
    require_same_dim(dim, degrees[a].size(), "degree vector");
    factors.push_back(BaseFactor{base[a].first, base[a].second, c[a], AffineFunc::linear(degrees[a])});
    Rational sum = 0;
    for (const auto& d : degrees[a]) sum += d;
    diag.push_back(c[a] > sum);
  }
  return ProjectiveBundle{make_fibration(std::move(fiber), std::move(factors)), std::move(diag)};
}

/// A fibration template whose class parameters are still free.
struct FactorShape {
  unsigned n = 1;
  AffineFunc p;
};

/// The anticanonical class of a Fano fibration over Kahler-Einstein bases of
/// Fano index I_a: c_a = I_a and s_a = 2 n_a I_a. The fiber must be monotone
/// with t = 1.
inline FibrationData fano_anticanonical(const LabelledPolytope& fiber, const std::vector<FactorShape>& shapes,
                                        const std::vector<Rational>& indices) {
  require_same_dim(shapes.size(), indices.size(), "Fano index list");
  const auto mp = monotone_point(fiber);
  if (!mp || mp->t != 1) throw Error(ErrorCode::NotFanoFibration, "fiber is not monotone with t = 1");
  std::vector<BaseFactor> factors;
  for (std::size_t a = 0; a < shapes.size(); ++a) {
    if (indices[a] <= 0) throw Error(ErrorCode::NotFanoFibration, "Fano index must be positive");
    factors.push_back(BaseFactor{shapes[a].n, 2 * Rational(shapes[a].n) * indices[a], indices[a], shapes[a].p});
  }
  return make_fibration(fiber, std::move(factors));
}

/// Weights (v_user v0, 2(l v_user v0 + d(v_user v0)(x))) of the soliton
/// problem; requires a reflexive fiber (monotone at the origin with t = 1).
inline std::pair<Polynomial, Polynomial> soliton_weights(const FibrationData& fib, const Polynomial& v_user) {
  require_same_dim(fib.dim(), v_user.dim(), "soliton weight");
  const auto& mp = fib.fano_fiber;
  bool reflexive = mp && mp->t == 1;
  if (reflexive)
    for (const auto& xi : mp->x0) reflexive = reflexive && xi == 0;
  if (!reflexive) throw Error(ErrorCode::NotReflexiveFiber, "soliton weights need a fiber monotone at 0 with t = 1");
  const Polynomial g = v_user * weight_v(fib);
  const Polynomial w = 2 * (Rational(static_cast<long>(fib.dim())) * g + radial_derivative(g, Point(fib.dim())));
  return {g, w};
}

/// Preset base manifolds. These are reference data only and are not checked
/// by anything in the library.
struct BasePreset {
  std::string_view name;
  unsigned n;
  long fano_index;  // 0 when not Fano
  Rational s;       // scalar curvature in the normalization s = 2 n I
  std::string_view source;
};

inline std::vector<BasePreset> base_catalog() {
  return {
      {"P1", 1, 2, 4, "index n+1 of projective space"},
      {"P2", 2, 3, 12, "index n+1 of projective space"},
      {"P3", 3, 4, 24, "index n+1 of projective space"},
      {"P4", 4, 5, 40, "index n+1 of projective space"},
      {"Q3", 3, 3, 18, "index n of a smooth quadric (Kobayashi-Ochiai)"},
      {"Q4", 4, 4, 32, "index n of a smooth quadric (Kobayashi-Ochiai)"},
      {"V5", 3, 2, 12, "del Pezzo threefold of degree 5, Kahler-Einstein"},
      {"curve-genus-2", 1, 0, -2, "canonically polarized curve, Ric = -omega"},
  };
}

}  // namespace kstab
