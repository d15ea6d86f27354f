#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "kstab/affine.hpp"
#include "kstab/error.hpp"
#include "kstab/linalg.hpp"
#include "kstab/rational.hpp"

namespace kstab {

using Exponent = std::vector<unsigned>;

inline unsigned total_degree(const Exponent& e) { return std::accumulate(e.begin(), e.end(), 0u); }

/// Graded lexicographic order: lower total degree first, ties broken
/// lexicographically on the exponent vector.
struct GradedLex {
  bool operator()(const Exponent& a, const Exponent& b) const {
    const auto da = total_degree(a);
    const auto db = total_degree(b);
    if (da != db) return da < db;
    return a < b;
  }
};

/// Sparse multivariate polynomial over Q. Zero coefficients are never stored,
/// so two equal polynomials have identical term maps.
class Polynomial {
 public:
  using Terms = std::map<Exponent, Rational, GradedLex>;

  Polynomial() = default;
  explicit Polynomial(std::size_t dim) : dim_(dim) {}

  static Polynomial constant(std::size_t dim, const Rational& c) {
    Polynomial p(dim);
    p.add_term(Exponent(dim, 0), c);
    return p;
  }

  /// The coordinate function x_i (0-based index).
  static Polynomial variable(std::size_t dim, std::size_t i) {
    if (i >= dim) throw Error(ErrorCode::IndexOutOfRange, "variable index " + std::to_string(i));
    Exponent e(dim, 0);
    e[i] = 1;
    Polynomial p(dim);
    p.add_term(e, 1);
    return p;
  }

  static Polynomial monomial(const Exponent& e, const Rational& c = 1) {
    Polynomial p(e.size());
    p.add_term(e, c);
    return p;
  }

  static Polynomial from_affine(const AffineFunc& f) {
    Polynomial p = constant(f.dim(), f.constant());
    for (std::size_t i = 0; i < f.dim(); ++i) {
      Exponent e(f.dim(), 0);
      e[i] = 1;
      p.add_term(e, f.gradient()[i]);
    }
    return p;
  }

  std::size_t dim() const { return dim_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const { return terms_.empty() ? -1 : static_cast<int>(total_degree(terms_.rbegin()->first)); }

  bool is_constant() const { return degree() <= 0; }

  Rational coefficient(const Exponent& e) const {
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  void add_term(const Exponent& e, const Rational& c) {
    require_same_dim(dim_, e.size(), "polynomial term");
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  Rational operator()(const Point& x) const {
    require_same_dim(dim_, x.size(), "polynomial evaluation");
    Rational total = 0;
    // Cache powers per coordinate; degrees are small.
    std::vector<std::vector<Rational>> powers(dim_);
    for (const auto& [e, c] : terms_) {
      Rational m = c;
      for (std::size_t i = 0; i < dim_; ++i) {
        if (e[i] == 0) continue;
        auto& pw = powers[i];
        if (pw.empty()) pw.push_back(1);
        while (pw.size() <= e[i]) pw.push_back(pw.back() * x[i]);
        m *= pw[e[i]];
      }
      total += m;
    }
    return total;
  }

  Polynomial& operator+=(const Polynomial& o) {
    require_same_dim(dim_, o.dim_, "polynomial sum");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
  }

  Polynomial& operator-=(const Polynomial& o) {
    require_same_dim(dim_, o.dim_, "polynomial difference");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
  }

  Polynomial& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator-(Polynomial a) { return a *= Rational(-1); }
  friend Polynomial operator*(const Rational& s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(Polynomial a, const Rational& s) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    require_same_dim(a.dim_, b.dim_, "polynomial product");
    Polynomial out(a.dim_);
    Exponent e(a.dim_);
    for (const auto& [ea, ca] : a.terms_)
      for (const auto& [eb, cb] : b.terms_) {
        for (std::size_t i = 0; i < a.dim_; ++i) e[i] = ea[i] + eb[i];
        out.add_term(e, ca * cb);
      }
    return out;
  }

  Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

  bool operator==(const Polynomial& o) const { return dim_ == o.dim_ && terms_ == o.terms_; }

 private:
  std::size_t dim_ = 0;
  Terms terms_;
};

inline Polynomial pow(const Polynomial& p, unsigned k) {
  Polynomial result = Polynomial::constant(p.dim(), 1);
  Polynomial base = p;
  while (k) {
    if (k & 1u) result *= base;
    k >>= 1;
    if (k) base *= base;
  }
  return result;
}

/// Partial derivative with respect to x_i (0-based).
inline Polynomial partial(const Polynomial& p, std::size_t i) {
  if (i >= p.dim()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "partial derivative index " + std::to_string(i) + " for dimension " + std::to_string(p.dim()));
  }
  Polynomial out(p.dim());
  for (const auto& [e, c] : p.terms()) {
    if (e[i] == 0) continue;
    Exponent d = e;
    --d[i];
    out.add_term(d, c * e[i]);
  }
  return out;
}

/// x -> d_x p (x - x0).
inline Polynomial radial_derivative(const Polynomial& p, const Point& x0) {
  require_same_dim(p.dim(), x0.size(), "radial derivative base point");
  Polynomial out(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    Polynomial shift = Polynomial::variable(p.dim(), i) - Polynomial::constant(p.dim(), x0[i]);
    out += partial(p, i) * shift;
  }
  return out;
}

/// x -> p(A x + b) where A is p.dim() x m; the result lives in dimension m.
inline Polynomial compose_affine(const Polynomial& p, const Matrix& a, const Point& b) {
  require_same_dim(p.dim(), a.rows(), "affine substitution rows");
  require_same_dim(p.dim(), b.size(), "affine substitution offset");
  const std::size_t m = a.cols();
  std::vector<Polynomial> images;
  images.reserve(p.dim());
  for (std::size_t i = 0; i < p.dim(); ++i) {
    Polynomial img = Polynomial::constant(m, b[i]);
    for (std::size_t j = 0; j < m; ++j) img += a(i, j) * Polynomial::variable(m, j);
    images.push_back(std::move(img));
  }
  std::vector<std::vector<Polynomial>> powers(p.dim());
  Polynomial out(m);
  for (const auto& [e, c] : p.terms()) {
    Polynomial term = Polynomial::constant(m, c);
    for (std::size_t i = 0; i < p.dim(); ++i) {
      if (e[i] == 0) continue;
      auto& pw = powers[i];
      if (pw.empty()) pw.push_back(Polynomial::constant(m, 1));
      while (pw.size() <= e[i]) pw.push_back(pw.back() * images[i]);
      term *= pw[e[i]];
    }
    out += term;
  }
  return out;
}

inline std::string to_string(const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::string out;
  // Highest degree first reads more naturally.
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [e, c] = *it;
    std::string mono;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i] == 0) continue;
      if (!mono.empty()) mono += "*";
      mono += "x" + std::to_string(i + 1);
      if (e[i] > 1) mono += "^" + std::to_string(e[i]);
    }
    const bool negative = c < 0;
    const Rational mag = negative ? Rational(-c) : c;
    if (out.empty()) {
      if (negative) out += "-";
    } else {
      out += negative ? " - " : " + ";
    }
    if (mono.empty()) {
      out += to_string(mag);
    } else if (mag == 1) {
      out += mono;
    } else {
      out += to_string(mag) + "*" + mono;
    }
  }
  return out;
}

}  // namespace kstab
