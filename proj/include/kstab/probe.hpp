#pragma once

#include <cstddef>
#include <numeric>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "kstab/affine.hpp"
#include "kstab/error.hpp"
#include "kstab/futaki.hpp"
#include "kstab/measure.hpp"
#include "kstab/parallel.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"

namespace kstab {

/// The convex piecewise-linear test function f = max(0, h), h(x0) <= 0.
struct Crease {
  AffineFunc h;
  /// Integer normal direction and the grid point the crease passes through.
  std::vector<long> direction;
  Point offset;
};

namespace detail {

inline long gcd_all(const std::vector<long>& v) {
  long g = 0;
  for (auto x : v) g = std::gcd(g, x);
  return g;
}

inline void integer_ball(std::size_t dim, long r, std::vector<long>& cur, std::vector<std::vector<long>>& out) {
  if (cur.size() == dim) {
    if (gcd_all(cur) == 1) out.push_back(cur);
    return;
  }
  for (long a = -r; a <= r; ++a) {
    cur.push_back(a);
    integer_ball(dim, r, cur, out);
    cur.pop_back();
  }
}

}  // namespace detail

/// Creases h = n.(x - q) with n a primitive integer vector of sup-norm <= r
/// (both signs) and q on the grid x0 + k/(r+1) (vertex - x0), k = 0..r. Only
/// creases with h(x0) <= 0 and nonempty pieces on both sides are kept.
inline std::vector<Crease> crease_family(const LabelledPolytope& p, const Point& x0, unsigned r) {
  if (!p.is_interior(x0)) throw Error(ErrorCode::NotInterior, "x0 = " + to_string(x0) + " is not interior");
  if (r < 1) throw Error(ErrorCode::InvalidInput, "resolution must be >= 1");
  std::vector<std::vector<long>> dirs;
  std::vector<long> cur;
  detail::integer_ball(p.dim(), static_cast<long>(r), cur, dirs);

  std::vector<Point> offsets;
  {
    std::set<Point> seen;
    for (const auto& v : p.vertices())
      for (unsigned k = 0; k <= r; ++k) {
        Point q = x0 + Rational(k, r + 1) * (v - x0);
        if (seen.insert(q).second) offsets.push_back(std::move(q));
      }
  }

  std::vector<Crease> out;
  std::set<std::pair<std::vector<long>, Rational>> seen;
  for (const auto& n : dirs) {
    Point g(n.begin(), n.end());
    for (const auto& q : offsets) {
      AffineFunc h(g, -dot(g, q));
      if (h(x0) > 0) continue;
      bool pos = false, neg = false;
      for (const auto& v : p.vertices()) {
        pos = pos || h(v) > 0;
        neg = neg || h(v) < 0;
      }
      if (!pos || !neg) continue;
      if (!seen.insert({n, h.constant()}).second) continue;
      out.push_back(Crease{std::move(h), n, q});
    }
  }
  return out;
}

struct CreaseValue {
  Crease crease;
  Rational futaki;
  Rational l1_norm;
  Rational ratio;
};

struct ProbeReport {
  std::vector<CreaseValue> values;
  std::optional<std::size_t> argmin;
  std::optional<Rational> min_ratio;
  /// The most negative F(f) / |f|_1 crease, when F(f) < 0 somewhere.
  std::optional<std::size_t> destabilizer;
};

/// F(max(0, h)) = 2 int_{dP, h >= 0} h v dsigma - int_{P, h >= 0} h w dx. The
/// crease facet carries h = 0 and the other facets keep the labels of P, so
/// the boundary integral of the clipped piece is exactly the one needed.
inline CreaseValue evaluate_crease(const LabelledPolytope& p, const Polynomial& v, const Polynomial& w,
                                   const Crease& c) {
  const auto piece = clip(p, c.h);
  const Quadrature q(piece);
  const Polynomial hp = Polynomial::from_affine(c.h);
  CreaseValue out{c, df_invariant(q, v, w, hp), q.integrate(hp), 0};
  out.ratio = out.futaki / out.l1_norm;
  return out;
}

inline ProbeReport probe(const LabelledPolytope& p, const Polynomial& v, const Polynomial& w,
                         const std::vector<Crease>& family, bool verify_futaki = true) {
  if (verify_futaki) {
    const auto f = futaki_on_affine(Quadrature(p), p.dim(), v, w);
    for (const auto& x : f)
      if (x != 0) throw Error(ErrorCode::FutakiNotVanishing, "F does not vanish on affine functions");
  }
  ProbeReport rep;
  rep.values = parallel_map(family.size(), [&](std::size_t i) { return evaluate_crease(p, v, w, family[i]); });
  for (std::size_t i = 0; i < rep.values.size(); ++i) {
    const auto& cv = rep.values[i];
    if (!rep.min_ratio || cv.ratio < *rep.min_ratio) {
      rep.min_ratio = cv.ratio;
      rep.argmin = i;
    }
  }
  if (rep.min_ratio && *rep.min_ratio < 0) rep.destabilizer = rep.argmin;
  return rep;
}

}  // namespace kstab
