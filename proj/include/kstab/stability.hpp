#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "kstab/bernstein.hpp"
#include "kstab/error.hpp"
#include "kstab/futaki.hpp"
#include "kstab/measure.hpp"
#include "kstab/parallel.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"
#include "kstab/univariate.hpp"
#include "kstab/weights.hpp"

namespace kstab {

enum class Verdict { CertifiedSufficient, ConditionFails, Inconclusive };

/// How a cell was decided, in increasing order of cost.
enum class Method { AffineVertex, VertexConcave, BernsteinSubdivision };

inline std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CertifiedSufficient: return "CertifiedSufficient";
    case Verdict::ConditionFails: return "ConditionFails";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

inline std::string_view method_name(Method m) {
  switch (m) {
    case Method::AffineVertex: return "AffineVertex";
    case Method::VertexConcave: return "VertexConcave";
    case Method::BernsteinSubdivision: return "BernsteinSubdivision";
  }
  return "Unknown";
}

struct CellOutcome {
  std::size_t facet = 0;
  std::size_t cell = 0;
  Verdict verdict = Verdict::Inconclusive;
  Method method = Method::AffineVertex;
  std::optional<Point> witness;
  std::optional<Rational> value;
  /// Smallest value of the condition at the cell's vertices.
  Rational min_vertex_value;
  unsigned depth = 0;
};

struct VertexValue {
  Point x;
  Rational value;
};

struct StabilityReport {
  Verdict verdict = Verdict::Inconclusive;
  Method method = Method::AffineVertex;
  unsigned depth = 0;
  Convention convention = Convention::Canonical;
  Point x0;
  std::optional<Point> witness;
  std::optional<Rational> witness_value;
  std::vector<CellOutcome> per_cone;
  /// Condition values at the vertices of P (Fano-fiber checks) or l_ext at the
  /// vertices (total Fano check).
  std::vector<VertexValue> vertex_values;
  std::optional<Rational> min_value;
  std::optional<AffineFunc> l_ext;
  std::vector<std::string> notes;
};

/// g_j = (1/L_j(x0)) ((l+1) v + dv(x - x0)) - w/2.
inline Polynomial condition_poly_general(const LabelledPolytope& p, const Point& x0, std::size_t j,
                                         const Polynomial& v, const Polynomial& w) {
  if (!p.is_interior(x0)) throw Error(ErrorCode::NotInterior, "x0 = " + to_string(x0) + " is not interior");
  const Rational lj = p.label(j)(x0);
  const Rational lp1 = static_cast<long>(p.dim()) + 1;
  return (1 / lj) * (lp1 * v + radial_derivative(v, x0)) - Rational(1, 2) * w;
}

struct CheckOptions {
  /// Per facet: the condition divided by a positive weight is known to be
  /// concave on the cone, so vertex values decide it.
  std::vector<bool> concave_facets;
  unsigned depth = 6;
  bool verify_futaki = true;
  Convention convention = Convention::Canonical;
};

namespace detail {

inline CellOutcome decide_cell(const Simplex& cell, const Polynomial& g, bool concave, unsigned depth) {
  CellOutcome out;
  std::optional<std::size_t> worst;
  for (std::size_t i = 0; i < cell.vertices().size(); ++i) {
    const Rational val = g(cell.vertex(i));
    if (!worst || val < out.min_vertex_value) {
      worst = i;
      out.min_vertex_value = val;
    }
  }
  if (out.min_vertex_value < 0) {
    out.verdict = Verdict::ConditionFails;
    out.method = g.degree() <= 1 ? Method::AffineVertex : (concave ? Method::VertexConcave : Method::BernsteinSubdivision);
    out.witness = cell.vertex(*worst);
    out.value = out.min_vertex_value;
    return out;
  }
  if (g.degree() <= 1 || concave) {
    out.method = g.degree() <= 1 ? Method::AffineVertex : Method::VertexConcave;
    out.verdict = Verdict::CertifiedSufficient;
    return out;
  }
  out.method = Method::BernsteinSubdivision;
  const auto cert = certify_nonnegative(cell, g, depth);
  out.depth = cert.depth_used;
  switch (cert.outcome) {
    case CertOutcome::Certified: out.verdict = Verdict::CertifiedSufficient; break;
    case CertOutcome::Inconclusive: out.verdict = Verdict::Inconclusive; break;
    case CertOutcome::Refuted:
      out.verdict = Verdict::ConditionFails;
      out.witness = cert.witness;
      out.value = cert.value;
      break;
  }
  return out;
}

inline void merge_outcomes(StabilityReport& rep) {
  rep.verdict = Verdict::CertifiedSufficient;
  for (const auto& c : rep.per_cone) {
    rep.method = std::max(rep.method, c.method);
    rep.depth = std::max(rep.depth, c.depth);
    if (!rep.min_value || c.min_vertex_value < *rep.min_value) rep.min_value = c.min_vertex_value;
    if (c.verdict == Verdict::ConditionFails && rep.verdict != Verdict::ConditionFails) {
      rep.verdict = Verdict::ConditionFails;
      rep.witness = c.witness;
      rep.witness_value = c.value;
    } else if (c.verdict == Verdict::Inconclusive && rep.verdict == Verdict::CertifiedSufficient) {
      rep.verdict = Verdict::Inconclusive;
    }
  }
}

}  // namespace detail

/// Checks g_j >= 0 on every cone P_j of the decomposition at x0. Requires F
/// to vanish on affine functions unless opts.verify_futaki is off.
inline StabilityReport check_general(const LabelledPolytope& p, const Point& x0, const Polynomial& v,
                                     const Polynomial& w, const CheckOptions& opts = {}) {
  if (!p.is_interior(x0)) throw Error(ErrorCode::NotInterior, "x0 = " + to_string(x0) + " is not interior");
  if (opts.verify_futaki) {
    const auto f = futaki_on_affine(Quadrature(p), p.dim(), v, w);
    for (std::size_t i = 0; i < f.size(); ++i)
      if (f[i] != 0) {
        throw Error(ErrorCode::FutakiNotVanishing,
                    "F(X_" + std::to_string(i) + ") = " + to_string(f[i]) + " on the affine basis");
      }
  }
  StabilityReport rep;
  rep.convention = opts.convention;
  rep.x0 = x0;
  const auto cd = cone_decomposition(p, x0);
  struct Item {
    std::size_t facet, cell;
  };
  std::vector<Item> items;
  std::vector<Polynomial> g;
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    g.push_back(condition_poly_general(p, x0, j, v, w));
    for (std::size_t k = 0; k < cd.cells[j].size(); ++k) items.push_back({j, k});
  }
  rep.per_cone = parallel_map(items.size(), [&](std::size_t i) {
    const auto [j, k] = items[i];
    const bool concave = j < opts.concave_facets.size() && opts.concave_facets[j];
    auto out = detail::decide_cell(cd.cells[j][k], g[j], concave, opts.depth);
    out.facet = j;
    out.cell = k;
    return out;
  });
  detail::merge_outcomes(rep);
  return rep;
}

/// Default apex: the monotone point when there is one, else the vertex
/// centroid.
inline Point default_apex(const LabelledPolytope& p) {
  if (auto mp = monotone_point(p)) return mp->x0;
  return p.vertex_centroid();
}

/// L_j(x0) s_a - 2 n_a (p_a(x0) + c_a); when all are <= 0 for facet j, the
/// condition over v is concave on the cone P_j.
inline Rational cone_hypothesis_term(const FibrationData& fib, std::size_t j, std::size_t a, const Point& x0) {
  const auto& f = fib.factors[a];
  return fib.fiber.label(j)(x0) * f.s - 2 * Rational(f.n) * f.shift()(x0);
}

/// The general sufficient condition for a fibration at apex x0 with the
/// weights of the fibration and l_ext solved under `conv`.
inline StabilityReport check_fibration_general(const FibrationData& fib, Convention conv = Convention::Canonical,
                                               std::optional<Point> x0 = std::nullopt, unsigned depth = 6) {
  const Point apex = x0 ? *x0 : default_apex(fib.fiber);
  const auto wp = make_weights(fib, conv);
  const auto sol = extremal_affine(Quadrature(fib.fiber), fib.dim(), wp.v, wp.w_base, conv);
  CheckOptions opts;
  opts.depth = depth;
  opts.convention = conv;
  // The legacy l_ext annihilates its own functional, not F; its residuals
  // were already verified by the solver.
  opts.verify_futaki = conv == Convention::Canonical;
  if (!fib.fiber.is_interior(apex)) throw Error(ErrorCode::NotInterior, "x0 = " + to_string(apex) + " is not interior");
  for (std::size_t j = 0; j < fib.fiber.num_facets(); ++j) {
    bool ok = true;
    for (std::size_t a = 0; a < fib.factors.size(); ++a) ok = ok && cone_hypothesis_term(fib, j, a, apex) <= 0;
    opts.concave_facets.push_back(ok);
  }
  auto rep = check_general(fib.fiber, apex, wp.v, extremal_w(sol.l_ext, wp.v, wp.w_base), opts);
  rep.l_ext = sol.l_ext;
  if (conv == Convention::LegacyAppendix) rep.notes.emplace_back("l_ext solved in the legacy normalization");
  return rep;
}

/// 2(l + sum n_a) + 2 + sum_a (t s_a - 2 n_a (p_a(x0) + c_a)) / (p_a(x) + c_a) - t l_ext(x),
/// with (x0, t) the monotone point of the fiber.
inline Rational condition_value_fano(const FibrationData& fib, const AffineFunc& l_ext, const Point& x) {
  if (!fib.fano_fiber) throw Error(ErrorCode::NotMonotoneFiber, "fiber polytope is not monotone");
  const auto& [x0, t] = *fib.fano_fiber;
  Rational value = 2 * Rational(fib.total_dim()) + 2 - t * l_ext(x);
  for (std::size_t a = 0; a < fib.factors.size(); ++a) {
    const auto& f = fib.factors[a];
    const Rational u = f.shift()(x);
    if (u <= 0) {
      throw Error(ErrorCode::NonpositiveWeight,
                  "p + c = " + to_string(u) + " at " + to_string(x) + " for factor " + std::to_string(a));
    }
    value += (t * f.s - 2 * Rational(f.n) * f.shift()(x0)) / u;
  }
  return value;
}

/// The vertex criterion for a monotone fiber: when every factor satisfies
/// t s_a <= 2 n_a (p_a(x0) + c_a) the condition is concave and its vertex
/// values decide it; otherwise the cleared polynomial goes through the general
/// checker.
inline StabilityReport check_fano_fiber(const FibrationData& fib, Convention conv = Convention::Canonical,
                                        unsigned depth = 6) {
  if (!fib.fano_fiber) throw Error(ErrorCode::NotMonotoneFiber, "fiber polytope is not monotone");
  const auto& [x0, t] = *fib.fano_fiber;
  const auto sol = extremal_affine(fib, conv);
  bool hypothesis = true;
  for (const auto& f : fib.factors) hypothesis = hypothesis && t * f.s - 2 * Rational(f.n) * f.shift()(x0) <= 0;

  std::vector<VertexValue> values;
  for (const auto& vtx : fib.fiber.vertices()) values.push_back({vtx, condition_value_fano(fib, sol.l_ext, vtx)});

  StabilityReport rep;
  if (hypothesis) {
    rep.convention = conv;
    rep.x0 = x0;
    rep.method = Method::VertexConcave;
    rep.verdict = Verdict::CertifiedSufficient;
    for (const auto& vv : values) {
      if (!rep.min_value || vv.value < *rep.min_value) rep.min_value = vv.value;
      if (vv.value < 0 && !rep.witness) {
        rep.verdict = Verdict::ConditionFails;
        rep.witness = vv.x;
        rep.witness_value = vv.value;
      }
    }
  } else {
    rep = check_fibration_general(fib, conv, x0, depth);
    rep.notes.emplace_back("vertex hypothesis t s <= 2 n (p(x0) + c) fails; checked the cleared polynomial on cones");
  }
  rep.vertex_values = std::move(values);
  rep.l_ext = sol.l_ext;
  return rep;
}

/// sup_P l_ext <= 2 (dim Y + 1) for the anticanonical class of a Fano
/// fibration over a reflexive fiber.
inline StabilityReport check_fano_total(const FibrationData& fib, Convention conv = Convention::Canonical) {
  const auto& mp = fib.fano_fiber;
  bool fano = mp && mp->t == 1 && std::all_of(mp->x0.begin(), mp->x0.end(), [](const Rational& q) { return q == 0; });
  for (const auto& f : fib.factors) {
    fano = fano && f.c > 0 && denominator_of(f.c) == 1 && f.s == 2 * Rational(f.n) * f.c;
  }
  if (!fano) {
    throw Error(ErrorCode::NotFanoFibration,
                "need a reflexive fiber (monotone at 0, t = 1) and c_a = I_a, s_a = 2 n_a I_a with integral I_a");
  }
  const auto sol = extremal_affine(fib, conv);
  const Rational bound = 2 * (Rational(fib.total_dim()) + 1);
  StabilityReport rep;
  rep.convention = conv;
  rep.x0 = mp->x0;
  rep.method = Method::AffineVertex;
  rep.l_ext = sol.l_ext;
  std::optional<Rational> sup;
  std::size_t argmax = 0;
  for (std::size_t i = 0; i < fib.fiber.vertices().size(); ++i) {
    const auto& vtx = fib.fiber.vertices()[i];
    const Rational val = sol.l_ext(vtx);
    rep.vertex_values.push_back({vtx, val});
    if (!sup || val > *sup) {
      sup = val;
      argmax = i;
    }
  }
  rep.min_value = bound - *sup;
  rep.verdict = *sup <= bound ? Verdict::CertifiedSufficient : Verdict::ConditionFails;
  if (rep.verdict == Verdict::ConditionFails) {
    rep.witness = fib.fiber.vertices()[argmax];
    rep.witness_value = *rep.min_value;
  }
  rep.notes.emplace_back("min_value is the margin 2(dim Y + 1) - sup l_ext");
  return rep;
}

/// Fibration data with the class parameter c left free in the flagged factors.
struct FibrationTemplate {
  LabelledPolytope fiber;
  std::vector<BaseFactor> factors;
  std::vector<bool> c_is_parameter;

  FibrationData at(const Rational& c) const {
    auto fs = factors;
    for (std::size_t a = 0; a < fs.size(); ++a)
      if (a < c_is_parameter.size() && c_is_parameter[a]) fs[a].c = c;
    return make_fibration(fiber, std::move(fs));
  }
};

struct VertexThreshold {
  Point vertex;
  RationalFunction value;
  std::vector<RootInterval> roots;
  Rational lo;
  Rational hi;
  bool negative_at_hi = false;
  bool positive_beyond_hi = false;
};

struct ThresholdResult {
  Rational lo;
  Rational hi;
  Rational c_lo;
  Rational c_hi;
  Rational tol;
  Convention convention = Convention::Canonical;
  Verdict verdict = Verdict::Inconclusive;
  /// Exact pipeline check of every vertex value at c_hi.
  bool holds_at_hi = false;
  /// Every vertex value stays positive for all c > c_hi.
  bool certified_beyond_hi = false;
  std::size_t samples = 0;
  std::vector<VertexThreshold> per_vertex;
};

struct ThresholdOptions {
  Rational tol{1, 100};
  std::size_t max_degree = 60;
  Convention convention = Convention::Canonical;
};

namespace detail {

inline std::vector<Rational> vertex_values_at(const FibrationTemplate& tmpl, const Rational& c, Convention conv) {
  const auto fib = tmpl.at(c);
  const auto sol = extremal_affine(fib, conv);
  std::vector<Rational> out;
  for (const auto& vtx : fib.fiber.vertices()) out.push_back(condition_value_fano(fib, sol.l_ext, vtx));
  return out;
}

inline int rf_sign(const RationalFunction& f, const Rational& c) { return sign(f.num(c)) * sign(f.den(c)); }

}  // namespace detail

/// Smallest c in [c_lo, c_hi] above which every vertex condition value is
/// nonnegative, bracketed to width <= tol. Each vertex value is rebuilt as an
/// exact rational function of c from samples before its roots are isolated.
inline ThresholdResult threshold_c(const FibrationTemplate& tmpl, const Rational& c_lo, const Rational& c_hi,
                                   const ThresholdOptions& opts = {}) {
  if (c_lo > c_hi) throw Error(ErrorCode::InvalidInput, "empty bracket");
  if (opts.tol <= 0) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  FibrationData at_lo;
  try {
    at_lo = tmpl.at(c_lo);
  } catch (const Error& e) {
    throw Error(ErrorCode::HypothesisViolatedOnBracket, std::string("at c_lo: ") + e.what());
  }
  if (!at_lo.fano_fiber) throw Error(ErrorCode::NotMonotoneFiber, "fiber polytope is not monotone");
  {
    const auto& [x0, t] = *at_lo.fano_fiber;
    for (std::size_t a = 0; a < at_lo.factors.size(); ++a) {
      const auto& f = at_lo.factors[a];
      if (t * f.s - 2 * Rational(f.n) * f.shift()(x0) > 0) {
        throw Error(ErrorCode::HypothesisViolatedOnBracket,
                    "t s > 2 n (p(x0) + c) at c_lo for factor " + std::to_string(a));
      }
    }
  }

  ThresholdResult res;
  res.c_lo = c_lo;
  res.c_hi = c_hi;
  res.tol = opts.tol;
  res.convention = opts.convention;
  const auto& verts = at_lo.fiber.vertices();
  const std::size_t nv = verts.size();

  // Samples at consecutive integers from ceil(c_lo); all lie where the
  // fibration is valid because p + c grows with c.
  Integer start = numerator_of(c_lo) / denominator_of(c_lo);
  if (Rational(start) < c_lo) start += 1;
  std::vector<Rational> xs;
  std::vector<std::vector<Rational>> ys;  // ys[k][vertex]
  const auto extend_to = [&](std::size_t count) {
    if (xs.size() >= count) return;
    const std::size_t first = xs.size();
    auto batch = parallel_map(count - first, [&](std::size_t i) {
      return detail::vertex_values_at(tmpl, Rational(start + static_cast<long>(first + i)), opts.convention);
    });
    for (std::size_t i = 0; i < batch.size(); ++i) {
      xs.emplace_back(start + static_cast<long>(first + i));
      ys.push_back(std::move(batch[i]));
    }
  };

  std::optional<Rational> best_lo, best_hi;
  res.holds_at_hi = true;
  res.certified_beyond_hi = true;
  const auto at_hi = detail::vertex_values_at(tmpl, c_hi, opts.convention);
  for (std::size_t v = 0; v < nv; ++v) {
    std::optional<RationalFunction> rf;
    // Escalate the total degree N geometrically; any N at or above the true
    // total degree reconstructs the same function.
    for (std::size_t n = 0; n <= opts.max_degree && !rf;
         n = n == opts.max_degree ? n + 1 : std::min(opts.max_degree, std::max(n + 1, n * 3 / 2))) {
      extend_to(n + 4);
      std::vector<Rational> px(xs.begin(), xs.begin() + static_cast<long>(n + 1));
      std::vector<Rational> py;
      for (std::size_t k = 0; k <= n; ++k) py.push_back(ys[k][v]);
      for (auto& cand : cauchy_candidates(px, py)) {
        bool ok = true;
        for (std::size_t k = n + 1; k < n + 4 && ok; ++k) ok = cand.den(xs[k]) != 0 && cand(xs[k]) == ys[k][v];
        if (!ok) continue;
        if (auto reduced = reduce_candidate(cand.num, cand.den, px)) {
          rf = std::move(reduced);
          break;
        }
      }
    }
    if (!rf) {
      throw Error(ErrorCode::DegreeEscalationFailed,
                  "vertex " + to_string(verts[v]) + ": no rational function of total degree <= " +
                      std::to_string(opts.max_degree) + " fits");
    }
    VertexThreshold vt;
    vt.vertex = verts[v];
    vt.value = *rf;
    const UPoly crit = rf->num * rf->den;
    vt.roots = isolate_roots(crit, c_lo, c_hi, opts.tol);
    // Sign on each gap between isolated roots; gap i lies left of root i.
    std::vector<Rational> gap_lo{c_lo}, gap_hi;
    for (const auto& r : vt.roots) {
      gap_hi.push_back(r.lo);
      gap_lo.push_back(r.hi);
    }
    gap_hi.push_back(c_hi);
    std::optional<std::size_t> last_negative;
    for (std::size_t i = 0; i < gap_lo.size(); ++i) {
      if (gap_lo[i] >= gap_hi[i]) continue;
      if (detail::rf_sign(*rf, (gap_lo[i] + gap_hi[i]) / 2) < 0) last_negative = i;
    }
    const int sign_hi = sign(at_hi[v]);
    vt.negative_at_hi = sign_hi < 0;
    if (!last_negative) {
      vt.lo = vt.hi = c_lo;
    } else if (*last_negative == vt.roots.size()) {
      vt.lo = vt.hi = c_hi;
      vt.negative_at_hi = true;
    } else {
      vt.lo = vt.roots[*last_negative].lo;
      vt.hi = vt.roots[*last_negative].hi;
    }
    vt.positive_beyond_hi = sign_hi > 0 && count_roots_above(sturm_sequence(square_free_part(crit)), c_hi) == 0;
    res.holds_at_hi = res.holds_at_hi && sign_hi >= 0 && !vt.negative_at_hi;
    res.certified_beyond_hi = res.certified_beyond_hi && vt.positive_beyond_hi;
    if (!best_lo || vt.lo > *best_lo) best_lo = vt.lo;
    if (!best_hi || vt.hi > *best_hi) best_hi = vt.hi;
    res.per_vertex.push_back(std::move(vt));
  }
  res.samples = xs.size();
  res.lo = *best_lo;
  res.hi = *best_hi;
  res.verdict = res.holds_at_hi ? Verdict::CertifiedSufficient : Verdict::ConditionFails;
  return res;
}

}  // namespace kstab
