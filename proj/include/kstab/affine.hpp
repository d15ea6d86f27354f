#pragma once

#include <string>
#include <utility>
#include <vector>

#include "kstab/error.hpp"
#include "kstab/rational.hpp"

namespace kstab {

/// x -> gradient . x + constant on Q^dim.
class AffineFunc {
 public:
  AffineFunc() = default;
  AffineFunc(Point gradient, Rational constant)
      : gradient_(std::move(gradient)), constant_(std::move(constant)) {
    if (gradient_.empty()) throw Error(ErrorCode::InvalidInput, "affine function of dimension 0");
  }

  static AffineFunc zero(std::size_t dim) { return AffineFunc(Point(dim), 0); }

  static AffineFunc linear(Point gradient) { return AffineFunc(std::move(gradient), 0); }

  std::size_t dim() const { return gradient_.size(); }
  const Point& gradient() const { return gradient_; }
  const Rational& constant() const { return constant_; }

  Rational operator()(const Point& x) const {
    require_same_dim(dim(), x.size(), "affine evaluation");
    return dot(gradient_, x) + constant_;
  }

  /// Value of the linear part on a direction vector.
  Rational differential(const Point& direction) const { return dot(gradient_, direction); }

  bool is_constant() const {
    for (const auto& g : gradient_)
      if (g != 0) return false;
    return true;
  }

  AffineFunc operator-() const { return AffineFunc(Rational(-1) * gradient_, -constant_); }

  friend AffineFunc operator*(const Rational& s, const AffineFunc& f) {
    return AffineFunc(s * f.gradient_, s * f.constant_);
  }

  friend AffineFunc operator+(const AffineFunc& a, const AffineFunc& b) {
    return AffineFunc(a.gradient_ + b.gradient_, a.constant_ + b.constant_);
  }

  bool operator==(const AffineFunc&) const = default;

 private:
  Point gradient_;
  Rational constant_ = 0;
};

inline std::string to_string(const AffineFunc& f) {
  std::string out;
  for (std::size_t i = 0; i < f.dim(); ++i) {
    if (f.gradient()[i] == 0) continue;
    if (!out.empty()) out += " + ";
    out += to_string(f.gradient()[i]) + "*x" + std::to_string(i + 1);
  }
  if (!out.empty()) out += " + ";
  return out + to_string(f.constant());
}

}  // namespace kstab
