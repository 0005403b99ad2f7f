#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ulab/field.hpp"
#include "ulab/lognorm.hpp"

namespace ulab {

/// Dense polynomial over F_q, coefficients stored low to high with a nonzero
/// leading coefficient (the zero polynomial has no coefficients).
class Poly {
 public:
  explicit Poly(const Field& f) : f_(&f) {}
  Poly(const Field& f, std::vector<Elem> coeffs);

  static Poly constant(const Field& f, Elem c);
  static Poly monomial(const Field& f, std::int64_t deg, Elem c = 1);

  const Field& field() const { return *f_; }
  bool is_zero() const { return c_.empty(); }
  /// Degree as a norm exponent; bottom for the zero polynomial.
  LogNorm degree() const { return c_.empty() ? LogNorm::zero() : LogNorm::of(static_cast<std::int64_t>(c_.size()) - 1); }
  /// Integer degree; throws DomainError for the zero polynomial.
  std::int64_t deg() const;
  Elem lead() const { return c_.empty() ? 0 : c_.back(); }
  Elem coeff(std::int64_t i) const {
    return (i < 0 || i >= static_cast<std::int64_t>(c_.size())) ? 0 : c_[static_cast<std::size_t>(i)];
  }
  std::span<const Elem> coeffs() const { return c_; }
  std::size_t size() const { return c_.size(); }

  Poly operator-() const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(const Poly& a, const Poly& b);

  Poly scaled(Elem c) const;
  /// Multiply by X^k, k >= 0.
  Poly shifted(std::int64_t k) const;
  /// this -= c X^k o, in place.
  void sub_scaled_shifted(const Poly& o, Elem c, std::int64_t k);

  friend bool operator==(const Poly& a, const Poly& b) { return a.f_ == b.f_ && a.c_ == b.c_; }

 private:
  void normalize();
  const Field* f_;
  std::vector<Elem> c_;
};

/// Euclidean division: a = q b + r with deg r < deg b.  Throws DomainError
/// when b is zero.
std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b);

}  // namespace ulab
