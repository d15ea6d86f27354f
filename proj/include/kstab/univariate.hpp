#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "kstab/error.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// Dense univariate polynomial, coefficients from degree 0 upward, always
/// trimmed so that the leading coefficient is nonzero.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }
  static UPoly constant(const Rational& a) { return UPoly(std::vector<Rational>{a}); }
  static UPoly x() { return UPoly(std::vector<Rational>{Rational(0), Rational(1)}); }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rational>& coeffs() const { return c_; }
  Rational coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
  Rational leading() const { return c_.empty() ? Rational(0) : c_.back(); }

  Rational operator()(const Rational& t) const {
    Rational acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  friend UPoly operator+(const UPoly& a, const UPoly& b) {
    std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(i) + b.coeff(i);
    return UPoly(std::move(out));
  }
  friend UPoly operator-(const UPoly& a, const UPoly& b) {
    std::vector<Rational> out(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.coeff(i) - b.coeff(i);
    return UPoly(std::move(out));
  }
  friend UPoly operator*(const UPoly& a, const UPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<Rational> out(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    return UPoly(std::move(out));
  }
  friend UPoly operator*(const Rational& s, const UPoly& a) {
    std::vector<Rational> out = a.c_;
    for (auto& x : out) x *= s;
    return UPoly(std::move(out));
  }

  bool operator==(const UPoly&) const = default;

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rational> c_;
};

/// Quotient and remainder; b must be nonzero.
inline std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
  if (b.is_zero()) throw Error(ErrorCode::InvalidInput, "polynomial division by zero");
  std::vector<Rational> r = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {UPoly(), a};
  std::vector<Rational> q(static_cast<std::size_t>(a.degree() - db + 1));
  for (int k = a.degree() - db; k >= 0; --k) {
    const Rational f = r[static_cast<std::size_t>(k + db)] / b.leading();
    q[static_cast<std::size_t>(k)] = f;
    if (f == 0) continue;
    for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(k + i)] -= f * b.coeff(static_cast<std::size_t>(i));
  }
  return {UPoly(std::move(q)), UPoly(std::move(r))};
}

inline UPoly derivative(const UPoly& a) {
  std::vector<Rational> out;
  for (std::size_t i = 1; i < a.coeffs().size(); ++i) out.push_back(a.coeffs()[i] * static_cast<long>(i));
  return UPoly(std::move(out));
}

inline UPoly monic(const UPoly& a) { return a.is_zero() ? a : (1 / a.leading()) * a; }

inline UPoly gcd(UPoly a, UPoly b) {
  while (!b.is_zero()) {
    auto r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a);
}

inline UPoly square_free_part(const UPoly& a) {
  if (a.degree() <= 0) return a;
  return divmod(a, gcd(a, derivative(a))).first;
}

/// Sturm chain p, p', -rem(p, p'), ...
inline std::vector<UPoly> sturm_sequence(const UPoly& p) {
  std::vector<UPoly> seq{p, derivative(p)};
  while (!seq.back().is_zero()) {
    auto r = divmod(seq[seq.size() - 2], seq.back()).second;
    if (r.is_zero()) break;
    seq.push_back(Rational(-1) * r);
  }
  return seq;
}

inline int sign_changes(const std::vector<UPoly>& seq, const Rational& t) {
  int changes = 0;
  int prev = 0;
  for (const auto& s : seq) {
    const int sg = sign(s(t));
    if (sg == 0) continue;
    if (prev != 0 && sg != prev) ++changes;
    prev = sg;
  }
  return changes;
}

/// Number of distinct real roots in (a, b] of the square-free polynomial whose
/// chain is given.
inline int count_roots(const std::vector<UPoly>& seq, const Rational& a, const Rational& b) {
  return sign_changes(seq, a) - sign_changes(seq, b);
}

/// Sign changes of the chain at +infinity.
inline int sign_changes_at_infinity(const std::vector<UPoly>& seq) {
  int changes = 0;
  int prev = 0;
  for (const auto& s : seq) {
    const int sg = sign(s.leading());
    if (sg == 0) continue;
    if (prev != 0 && sg != prev) ++changes;
    prev = sg;
  }
  return changes;
}

/// Number of distinct real roots in (a, +infinity).
inline int count_roots_above(const std::vector<UPoly>& seq, const Rational& a) {
  return sign_changes(seq, a) - sign_changes_at_infinity(seq);
}

/// A closed interval [lo, hi] containing exactly one root; lo == hi means the
/// root is exactly rational.
struct RootInterval {
  Rational lo;
  Rational hi;
};

/// Isolates every distinct real root of p in (a, b], each to width <= tol.
inline std::vector<RootInterval> isolate_roots(const UPoly& p, const Rational& a, const Rational& b,
                                               const Rational& tol) {
  std::vector<RootInterval> out;
  if (p.degree() <= 0 || a >= b) return out;
  const UPoly sf = square_free_part(p);
  const auto seq = sturm_sequence(sf);
  std::vector<std::pair<Rational, Rational>> stack{{a, b}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    const int n = count_roots(seq, lo, hi);
    if (n == 0) continue;
    if (n == 1 && hi - lo <= tol) {
      if (sf(hi) == 0) {
        out.push_back({hi, hi});
      } else {
        out.push_back({lo, hi});
      }
      continue;
    }
    const Rational mid = (lo + hi) / 2;
    // (lo, mid] and (mid, hi] partition (lo, hi].
    stack.emplace_back(lo, mid);
    stack.emplace_back(mid, hi);
  }
  std::sort(out.begin(), out.end(), [](const RootInterval& x, const RootInterval& y) { return x.hi < y.hi; });
  // Tighten exact hits and make the open ends explicit.
  for (auto& r : out) {
    if (r.lo != r.hi && sf(r.hi) == 0) r.lo = r.hi;
  }
  return out;
}

/// Cauchy bound: every real root has |x| < 1 + max |a_i / a_n|.
inline Rational root_bound(const UPoly& p) {
  Rational m = 0;
  for (std::size_t i = 0; i + 1 < p.coeffs().size(); ++i) m = std::max(m, abs(p.coeffs()[i] / p.leading()));
  return 1 + m;
}

/// Newton form interpolation through (x_i, y_i).
inline UPoly interpolate(const std::vector<Rational>& xs, const std::vector<Rational>& ys) {
  require_same_dim(xs.size(), ys.size(), "interpolation data");
  const std::size_t n = xs.size();
  std::vector<Rational> dd = ys;
  for (std::size_t k = 1; k < n; ++k)
    for (std::size_t i = n - 1; i >= k; --i) {
      dd[i] = (dd[i] - dd[i - 1]) / (xs[i] - xs[i - k]);
      if (i == k) break;
    }
  UPoly result;
  for (std::size_t k = n; k-- > 0;) {
    result = result * UPoly(std::vector<Rational>{-xs[k], Rational(1)}) + UPoly::constant(dd[k]);
  }
  return result;
}

struct RationalFunction {
  UPoly num;
  UPoly den;

  Rational operator()(const Rational& t) const {
    const Rational d = den(t);
    if (d == 0) throw Error(ErrorCode::InvalidInput, "rational function pole at " + to_string(t));
    return num(t) / d;
  }
};

/// Lowest-terms, monic-denominator form of r/t; nullopt when t vanishes at a
/// node (the pair then does not interpolate there).
inline std::optional<RationalFunction> reduce_candidate(const UPoly& r, const UPoly& t,
                                                           const std::vector<Rational>& xs) {
  if (t.is_zero()) return std::nullopt;
  for (const auto& x : xs)
    if (t(x) == 0) return std::nullopt;
  UPoly num = r, den = t;
  if (!num.is_zero()) {
    const UPoly g = gcd(num, den);
    num = divmod(num, g).first;
    den = divmod(den, g).first;
  }
  const Rational lead = den.leading();
  return RationalFunction{(1 / lead) * num, (1 / lead) * den};
}

/// The raw (remainder, cofactor) pairs r/t that Cauchy reconstruction can
/// produce for the numerator degree bounds m = N, ..., 0, read off a single
/// extended Euclidean run on (prod (x - x_i), interpolant). Candidate m is the
/// first remainder of degree <= m with cofactor degree <= N - m. The pairs are
/// neither reduced nor checked against the nodes; see reduce_candidate.
inline std::vector<RationalFunction> cauchy_candidates(const std::vector<Rational>& xs,
                                                       const std::vector<Rational>& ys) {
  const std::size_t big_n = xs.size() - 1;
  UPoly node = UPoly::constant(1);
  for (const auto& x : xs) node = node * UPoly(std::vector<Rational>{-x, Rational(1)});
  UPoly r0 = node, r1 = interpolate(xs, ys);
  UPoly t0, t1 = UPoly::constant(1);
  std::vector<RationalFunction> out;
  std::size_t m = big_n;
  while (true) {
    // r1 is the first remainder of degree <= m for every m in [deg r1, current m].
    const int dr = r1.is_zero() ? -1 : r1.degree();
    for (; static_cast<int>(m) >= dr; --m) {
      if (!t1.is_zero() && t1.degree() <= static_cast<int>(big_n - m) &&
          (out.empty() || !(out.back().num == r1 && out.back().den == t1))) {
        out.push_back(RationalFunction{r1, t1});
      }
      if (m == 0) return out;
    }
    if (r1.is_zero()) return out;
    auto [q, r] = divmod(r0, r1);
    UPoly t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
}

/// Cauchy reconstruction for a single numerator degree bound m (deg d <= N - m).
inline std::optional<RationalFunction> cauchy_interpolate(const std::vector<Rational>& xs,
                                                          const std::vector<Rational>& ys, std::size_t m) {
  const std::size_t big_n = xs.size() - 1;
  if (m > big_n) return std::nullopt;
  UPoly node = UPoly::constant(1);
  for (const auto& x : xs) node = node * UPoly(std::vector<Rational>{-x, Rational(1)});
  UPoly r0 = node, r1 = interpolate(xs, ys);
  UPoly t0, t1 = UPoly::constant(1);
  while (!r1.is_zero() && r1.degree() > static_cast<int>(m)) {
    auto [q, r] = divmod(r0, r1);
    UPoly t2 = t0 - q * t1;
    r0 = std::move(r1);
    r1 = std::move(r);
    t0 = std::move(t1);
    t1 = std::move(t2);
  }
  if (t1.is_zero() || t1.degree() > static_cast<int>(big_n - m)) return std::nullopt;
  return reduce_candidate(r1, t1, xs);
}

inline std::string to_string(const UPoly& p, const std::string& var = "c") {
  if (p.is_zero()) return "0";
  std::string out;
  for (int i = p.degree(); i >= 0; --i) {
    const Rational a = p.coeff(static_cast<std::size_t>(i));
    if (a == 0) continue;
    const bool neg = a < 0;
    out += out.empty() ? (neg ? "-" : "") : (neg ? " - " : " + ");
    const Rational mag = neg ? Rational(-a) : a;
    if (i == 0 || mag != 1) out += to_string(mag) + (i ? "*" : "");
    if (i > 0) out += var + (i > 1 ? "^" + std::to_string(i) : "");
  }
  return out;
}

}  // namespace kstab
