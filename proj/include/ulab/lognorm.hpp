#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "ulab/errors.hpp"

namespace ulab {

/// The value q^e of the ultrametric absolute value, stored by its exponent,
/// together with a bottom element for the norm of zero.
///
/// Also used as the degree of a polynomial (|P| = q^deg P), so the degree of
/// the zero polynomial is the bottom element rather than an integer sentinel.
/// Bottom absorbs multiplication and is below every finite value.
class LogNorm {
 public:
  constexpr LogNorm() = default;  // bottom
  static constexpr LogNorm zero() { return LogNorm(); }
  static constexpr LogNorm of(std::int64_t e) { return LogNorm(e); }

  constexpr bool is_zero() const { return zero_; }
  std::int64_t exponent() const {
    if (zero_) throw DomainError("exponent of the zero norm");
    return e_;
  }

  friend constexpr bool operator==(const LogNorm& a, const LogNorm& b) {
    return a.zero_ == b.zero_ && (a.zero_ || a.e_ == b.e_);
  }
  friend constexpr std::strong_ordering operator<=>(const LogNorm& a, const LogNorm& b) {
    if (a.zero_ || b.zero_) return b.zero_ <=> a.zero_;
    return a.e_ <=> b.e_;
  }

  /// Norm of a product.
  friend constexpr LogNorm operator*(const LogNorm& a, const LogNorm& b) {
    if (a.zero_ || b.zero_) return LogNorm();
    return LogNorm(a.e_ + b.e_);
  }
  /// Scale by q^k.
  constexpr LogNorm shifted(std::int64_t k) const { return zero_ ? *this : LogNorm(e_ + k); }

  std::string to_string() const { return zero_ ? "0" : "q^" + std::to_string(e_); }

 private:
  constexpr explicit LogNorm(std::int64_t e) : zero_(false), e_(e) {}
  bool zero_ = true;
  std::int64_t e_ = 0;
};

inline LogNorm max(const LogNorm& a, const LogNorm& b) { return a < b ? b : a; }
inline LogNorm min(const LogNorm& a, const LogNorm& b) { return b < a ? b : a; }

}  // namespace ulab
