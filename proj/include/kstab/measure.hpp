#pragma once

#include <cstddef>
#include <vector>

#include "kstab/error.hpp"
#include "kstab/linalg.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// n! as an exact integer, memoized per thread.
inline const Integer& factorial(unsigned n) {
  thread_local std::vector<Integer> cache{Integer(1)};
  while (cache.size() <= n) cache.push_back(cache.back() * static_cast<unsigned long>(cache.size()));
  return cache[n];
}

/// Integral over the standard k-simplex {y >= 0, sum y <= 1}, with k = q.dim(),
/// using prod(alpha_i!) / (k + |alpha|)!.
inline Rational integrate_standard_simplex(const Polynomial& q) {
  const auto k = static_cast<unsigned>(q.dim());
  Rational total = 0;
  for (const auto& [e, c] : q.terms()) {
    Integer num = 1;
    for (auto a : e) num *= factorial(a);
    total += c * Rational(num, factorial(k + total_degree(e)));
  }
  return total;
}

/// Integral of p over the image of the standard simplex under y -> v0 + E y,
/// scaled by `mass` (the Jacobian of the chosen measure).
inline Rational integrate_parametrized(const Simplex& s, const Polynomial& p, const Rational& mass) {
  const Polynomial pulled = compose_affine(p, s.edge_matrix(), s.vertex(0));
  return mass * integrate_standard_simplex(pulled);
}

/// Lebesgue integral over a full-dimensional simplex.
inline Rational integrate_simplex(const Simplex& s, const Polynomial& p) {
  require_same_dim(s.ambient_dim(), p.dim(), "integrand");
  if (s.simplex_dim() != s.ambient_dim()) {
    throw Error(ErrorCode::DegenerateSimplex, "integrate_simplex needs a full-dimensional simplex");
  }
  return integrate_parametrized(s, p, abs(determinant(s.edge_matrix())));
}

inline Rational simplex_volume(const Simplex& s) {
  return abs(determinant(s.edge_matrix())) / Rational(factorial(static_cast<unsigned>(s.simplex_dim())));
}

/// A vector xi with dL(xi) = 1, supported on the first coordinate where the
/// gradient of L is nonzero.
inline Point facet_transversal(const AffineFunc& label) {
  Point xi(label.dim());
  for (std::size_t i = 0; i < label.dim(); ++i) {
    if (label.gradient()[i] != 0) {
      xi[i] = 1 / label.gradient()[i];
      return xi;
    }
  }
  throw Error(ErrorCode::InvalidFacet, "label with zero gradient has no transversal");
}

struct FacetChart {
  std::size_t facet = 0;
  std::vector<Simplex> bases;
  Point transversal;
};

inline FacetChart facet_chart(const LabelledPolytope& p, std::size_t j) {
  (void)p.facet(j);  // validates j
  return FacetChart{j, triangulate_facet(p, j), facet_transversal(p.label(j))};
}

/// dsigma-mass density of a base simplex: |det[w1-w0, ..., xi]|.
inline Rational sigma_jacobian(const Simplex& base, const Point& xi) {
  std::vector<Point> cols;
  for (std::size_t i = 1; i < base.vertices().size(); ++i) cols.push_back(base.vertex(i) - base.vertex(0));
  cols.push_back(xi);
  return abs(determinant(Matrix::from_columns(cols, xi.size())));
}

inline Rational integrate_chart(const FacetChart& chart, const Polynomial& p) {
  Rational total = 0;
  for (const auto& base : chart.bases) total += integrate_parametrized(base, p, sigma_jacobian(base, chart.transversal));
  return total;
}

/// Caches the triangulation of P and its facet charts so that many integrals
/// over the same polytope share the combinatorial work.
class Quadrature {
 public:
  explicit Quadrature(const LabelledPolytope& p) : dim_(p.dim()), cells_(triangulate(p)) {
    for (std::size_t j = 0; j < p.num_facets(); ++j) charts_.push_back(facet_chart(p, j));
  }

  std::size_t num_facets() const { return charts_.size(); }
  const std::vector<Simplex>& cells() const { return cells_; }
  const FacetChart& chart(std::size_t j) const {
    if (j >= charts_.size()) throw Error(ErrorCode::InvalidFacet, "facet index " + std::to_string(j));
    return charts_[j];
  }

  Rational integrate(const Polynomial& p) const {
    require_same_dim(dim_, p.dim(), "integrand");
    Rational total = 0;
    for (const auto& s : cells_) total += integrate_simplex(s, p);
    return total;
  }

  Rational facet_integral(std::size_t j, const Polynomial& p) const {
    require_same_dim(dim_, p.dim(), "integrand");
    return integrate_chart(chart(j), p);
  }

  Rational boundary_integral(const Polynomial& p) const {
    Rational total = 0;
    for (std::size_t j = 0; j < charts_.size(); ++j) total += facet_integral(j, p);
    return total;
  }

 private:
  std::size_t dim_;
  std::vector<Simplex> cells_;
  std::vector<FacetChart> charts_;
};

inline Rational integrate_polytope(const LabelledPolytope& p, const Polynomial& f) {
  require_same_dim(p.dim(), f.dim(), "integrand");
  Rational total = 0;
  for (const auto& s : triangulate(p)) total += integrate_simplex(s, f);
  return total;
}

inline Rational volume(const LabelledPolytope& p) { return integrate_polytope(p, Polynomial::constant(p.dim(), 1)); }

inline Rational integrate_facet_sigma(const LabelledPolytope& p, std::size_t j, const Polynomial& f) {
  require_same_dim(p.dim(), f.dim(), "integrand");
  return integrate_chart(facet_chart(p, j), f);
}

/// Same as above with a caller-chosen transversal; it must satisfy dL_j(xi) = 1.
inline Rational integrate_facet_sigma(const LabelledPolytope& p, std::size_t j, const Polynomial& f, const Point& xi) {
  require_same_dim(p.dim(), f.dim(), "integrand");
  if (p.label(j).differential(xi) != 1) throw Error(ErrorCode::InvalidInput, "transversal must satisfy dL(xi) = 1");
  return integrate_chart(FacetChart{j, triangulate_facet(p, j), xi}, f);
}

inline Rational boundary_integral(const LabelledPolytope& p, const Polynomial& f) {
  Rational total = 0;
  for (std::size_t j = 0; j < p.num_facets(); ++j) total += integrate_facet_sigma(p, j, f);
  return total;
}

/// sigma(F_j).
inline Rational facet_mass(const LabelledPolytope& p, std::size_t j) {
  return integrate_facet_sigma(p, j, Polynomial::constant(p.dim(), 1));
}

}  // namespace kstab
