#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "kstab/linalg.hpp"
#include "kstab/measure.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"

namespace kstab {

/// Bernstein coefficients of p on a full-dimensional simplex, of degree
/// deg(p), indexed by multi-indices over the simplex vertices. The value of p
/// at vertex i equals the coefficient with alpha = D e_i.
inline std::vector<std::pair<Exponent, Rational>> bernstein_coefficients(const Simplex& s, const Polynomial& p) {
  const std::size_t k = s.simplex_dim();
  const Polynomial q = compose_affine(p, s.edge_matrix(), s.vertex(0));
  const unsigned deg = p.is_zero() ? 0u : static_cast<unsigned>(std::max(q.degree(), 0));
  // Homogenize in barycentric coordinates (lambda_0, ..., lambda_k) with
  // y_i = lambda_i and 1 = sum lambda.
  Polynomial one(k + 1);
  for (std::size_t i = 0; i <= k; ++i) one += Polynomial::variable(k + 1, i);
  std::vector<Polynomial> one_pow{Polynomial::constant(k + 1, 1)};
  while (one_pow.size() <= deg) one_pow.push_back(one_pow.back() * one);
  Polynomial h(k + 1);
  for (const auto& [e, c] : q.terms()) {
    Exponent he(k + 1, 0);
    for (std::size_t i = 0; i < k; ++i) he[i + 1] = e[i];
    h += Polynomial::monomial(he, c) * one_pow[deg - total_degree(e)];
  }
  std::vector<std::pair<Exponent, Rational>> out;
  // Enumerate every alpha with |alpha| = deg, so zero coefficients are present.
  Exponent alpha(k + 1, 0);
  const auto emit = [&](auto&& self, std::size_t i, unsigned left) -> void {
    if (i == k) {
      alpha[k] = left;
      Integer num = 1;
      for (auto a : alpha) num *= factorial(a);
      out.emplace_back(alpha, h.coefficient(alpha) * Rational(num, factorial(deg)));
      return;
    }
    for (unsigned a = 0; a <= left; ++a) {
      alpha[i] = a;
      self(self, i + 1, left - a);
    }
  };
  emit(emit, 0, deg);
  return out;
}

enum class CertOutcome { Certified, Refuted, Inconclusive };

struct Certificate {
  CertOutcome outcome = CertOutcome::Inconclusive;
  std::optional<Point> witness;
  std::optional<Rational> value;
  unsigned depth_used = 0;
  std::size_t leaves = 0;
};

namespace detail {

// Splits a simplex at the midpoint of its longest edge (squared Euclidean
// length, ties to the lexicographically first pair).
inline std::pair<Simplex, Simplex> bisect_longest_edge(const Simplex& s) {
  const auto& v = s.vertices();
  std::size_t bi = 0, bj = 1;
  Rational best = -1;
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const Point d = v[i] - v[j];
      const Rational len = dot(d, d);
      if (len > best) {
        best = len;
        bi = i;
        bj = j;
      }
    }
  const Point mid = Rational(1, 2) * (v[bi] + v[bj]);
  auto a = v, b = v;
  a[bj] = mid;
  b[bi] = mid;
  return {Simplex(std::move(a)), Simplex(std::move(b))};
}

inline void certify_rec(const Simplex& s, const Polynomial& p, unsigned depth, unsigned max_depth, Certificate& cert,
                        bool& inconclusive) {
  if (cert.outcome == CertOutcome::Refuted) return;
  cert.depth_used = std::max(cert.depth_used, depth);
  for (const auto& v : s.vertices()) {
    const Rational val = p(v);
    if (val < 0) {
      cert.outcome = CertOutcome::Refuted;
      cert.witness = v;
      cert.value = val;
      return;
    }
  }
  const Point c = s.centroid();
  if (const Rational val = p(c); val < 0) {
    cert.outcome = CertOutcome::Refuted;
    cert.witness = c;
    cert.value = val;
    return;
  }
  bool all_nonneg = true;
  for (const auto& [alpha, b] : bernstein_coefficients(s, p)) {
    if (b < 0) {
      all_nonneg = false;
      break;
    }
  }
  if (all_nonneg) {
    ++cert.leaves;
    return;
  }
  if (depth == max_depth) {
    inconclusive = true;
    return;
  }
  // One level halves every edge direction once: dim successive bisections.
  std::vector<Simplex> level{s};
  for (std::size_t r = 0; r < s.simplex_dim(); ++r) {
    std::vector<Simplex> next;
    for (const auto& t : level) {
      auto [a, b] = bisect_longest_edge(t);
      next.push_back(std::move(a));
      next.push_back(std::move(b));
    }
    level = std::move(next);
  }
  for (const auto& t : level) certify_rec(t, p, depth + 1, max_depth, cert, inconclusive);
}

}  // namespace detail

/// Proves p >= 0 on s when every Bernstein coefficient is nonnegative on the
/// cells of a subdivision of depth at most max_depth; refutes with an exact
/// witness when a vertex or centroid value is negative.
inline Certificate certify_nonnegative(const Simplex& s, const Polynomial& p, unsigned max_depth = 6) {
  Certificate cert;
  bool inconclusive = false;
  detail::certify_rec(s, p, 0, max_depth, cert, inconclusive);
  if (cert.outcome != CertOutcome::Refuted) cert.outcome = inconclusive ? CertOutcome::Inconclusive : CertOutcome::Certified;
  return cert;
}

}  // namespace kstab
