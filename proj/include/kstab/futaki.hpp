#pragma once

#include <cstddef>
#include <vector>

#include "kstab/affine.hpp"
#include "kstab/error.hpp"
#include "kstab/linalg.hpp"
#include "kstab/measure.hpp"
#include "kstab/polynomial.hpp"
#include "kstab/polytope.hpp"
#include "kstab/weights.hpp"

namespace kstab {

/// F(f) = 2 int_{dP} f v dsigma - int_P f w dx.
inline Rational df_invariant(const Quadrature& q, const Polynomial& v, const Polynomial& w, const Polynomial& f) {
  return 2 * q.boundary_integral(f * v) - q.integrate(f * w);
}

inline Rational df_invariant(const LabelledPolytope& p, const Polynomial& v, const Polynomial& w, const Polynomial& f) {
  return df_invariant(Quadrature(p), v, w, f);
}

/// The affine basis (1, x_1, ..., x_l).
inline std::vector<Polynomial> affine_basis(std::size_t dim) {
  std::vector<Polynomial> basis{Polynomial::constant(dim, 1)};
  for (std::size_t i = 0; i < dim; ++i) basis.push_back(Polynomial::variable(dim, i));
  return basis;
}

/// F(X_i) for the affine basis; all zero iff F vanishes on affine functions.
inline std::vector<Rational> futaki_on_affine(const Quadrature& q, std::size_t dim, const Polynomial& v,
                                              const Polynomial& w) {
  std::vector<Rational> out;
  for (const auto& x : affine_basis(dim)) out.push_back(df_invariant(q, v, w, x));
  return out;
}

/// Coefficient of the boundary term in the functional a convention uses.
inline Rational boundary_factor(Convention conv, std::size_t dim) {
  return conv == Convention::LegacyAppendix && dim == 1 ? Rational(1) : Rational(2);
}

/// The weight w built from l_ext. Both conventions share it; they differ only
/// in how l_ext is solved for.
inline Polynomial extremal_w(const AffineFunc& l_ext, const Polynomial& v, const Polynomial& w_base) {
  return Polynomial::from_affine(l_ext) * v - w_base;
}

struct ExtremalSolution {
  AffineFunc l_ext;
  Matrix moment_matrix;
  Point rhs;
  Point residuals;
  Convention convention = Convention::Canonical;

  bool is_constant() const { return l_ext.is_constant(); }
};

namespace detail {

inline void moment_system(const Quadrature& q, std::size_t dim, const Polynomial& v, const Polynomial& w_base,
                          Convention conv, Matrix& m, Point& b) {
  const auto basis = affine_basis(dim);
  const std::size_t n = basis.size();
  m = Matrix(n, n);
  b = Point(n);
  const Rational beta = boundary_factor(conv, dim);
  const Rational interior_sign = conv == Convention::Canonical ? 1 : -1;
  for (std::size_t i = 0; i < n; ++i) {
    const Polynomial xv = basis[i] * v;
    for (std::size_t j = i; j < n; ++j) {
      m(i, j) = q.integrate(basis[j] * xv);
      m(j, i) = m(i, j);
    }
    b[i] = beta * q.boundary_integral(xv) + interior_sign * q.integrate(basis[i] * w_base);
  }
}

}  // namespace detail

/// Solves for the unique affine l_ext with F(X_i) = 0 on the affine basis,
/// where w = l_ext v - w_base (Canonical) or the legacy normalization.
inline ExtremalSolution extremal_affine(const Quadrature& q, std::size_t dim, const Polynomial& v,
                                        const Polynomial& w_base, Convention conv = Convention::Canonical) {
  ExtremalSolution sol;
  sol.convention = conv;
  detail::moment_system(q, dim, v, w_base, conv, sol.moment_matrix, sol.rhs);
  auto lambda = solve(sol.moment_matrix, sol.rhs);
  if (!lambda) throw Error(ErrorCode::SingularMomentMatrix, "moment matrix of (1, x) against v is singular");
  sol.l_ext = AffineFunc(Point(lambda->begin() + 1, lambda->end()), (*lambda)[0]);
  // Residuals of the convention's own functional, recomputed from scratch.
  const Rational beta = boundary_factor(conv, dim);
  const Rational interior_sign = conv == Convention::Canonical ? 1 : -1;
  const Polynomial lv = Polynomial::from_affine(sol.l_ext) * v;
  const Polynomial w_conv = lv - interior_sign * w_base;
  for (const auto& x : affine_basis(dim)) {
    sol.residuals.push_back(beta * q.boundary_integral(x * v) - q.integrate(x * w_conv));
  }
  for (const auto& r : sol.residuals)
    if (r != 0) throw Error(ErrorCode::SingularMomentMatrix, "extremal residual did not vanish");
  return sol;
}

inline ExtremalSolution extremal_affine(const LabelledPolytope& p, const Polynomial& v, const Polynomial& w_base,
                                        Convention conv = Convention::Canonical) {
  return extremal_affine(Quadrature(p), p.dim(), v, w_base, conv);
}

inline ExtremalSolution extremal_affine(const FibrationData& fib, Convention conv = Convention::Canonical) {
  const auto wp = make_weights(fib, conv);
  return extremal_affine(Quadrature(fib.fiber), fib.dim(), wp.v, wp.w_base, conv);
}

/// F(f) rebuilt from the cone decomposition at x0:
///   sum_j (2/L_j(x0)) int_{P_j} (df(x-x0) - f) v
/// + sum_j int_{P_j} [(2/L_j(x0)) ((l+1) v + dv(x-x0)) - w] f.
inline Rational df_via_cones(const LabelledPolytope& p, const Point& x0, const Polynomial& v, const Polynomial& w,
                             const Polynomial& f) {
  const auto cd = cone_decomposition(p, x0);
  const Rational lp1 = static_cast<long>(p.dim()) + 1;
  const Polynomial first = (radial_derivative(f, x0) - f) * v;
  const Polynomial dv = lp1 * v + radial_derivative(v, x0);
  Rational total = 0;
  for (std::size_t j = 0; j < p.num_facets(); ++j) {
    const Rational coef = 2 / p.label(j)(x0);
    const Polynomial integrand = coef * first + (coef * dv - w) * f;
    for (const auto& cell : cd.cells[j]) total += integrate_simplex(cell, integrand);
  }
  return total;
}

/// The Futaki character on the gradient directions: with l_ext replaced by its
/// best constant candidate b_0 / M_00, the residuals b_i - M_i0 b_0 / M_00 for
/// i = 1..l. They all vanish iff l_ext is constant.
inline std::vector<Rational> futaki_character(const Quadrature& q, std::size_t dim, const Polynomial& v,
                                              const Polynomial& w_base, Convention conv = Convention::Canonical) {
  Matrix m;
  Point b;
  detail::moment_system(q, dim, v, w_base, conv, m, b);
  const Rational lambda0 = b[0] / m(0, 0);
  std::vector<Rational> out;
  for (std::size_t i = 1; i <= dim; ++i) out.push_back(b[i] - m(i, 0) * lambda0);
  return out;
}

inline std::vector<Rational> futaki_character(const FibrationData& fib, Convention conv = Convention::Canonical) {
  const auto wp = make_weights(fib, conv);
  return futaki_character(Quadrature(fib.fiber), fib.dim(), wp.v, wp.w_base, conv);
}

}  // namespace kstab
