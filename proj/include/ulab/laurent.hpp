#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ulab/field.hpp"
#include "ulab/lognorm.hpp"
#include "ulab/poly.hpp"

namespace ulab {

/// Default number of coefficients kept below exponent 0 when an exact value
/// has to be expanded into an infinite series (inversion).  256 unless the
/// ULAB_PRECISION environment variable overrides it.
int default_precision();

/// A formal Laurent series in X^-1 over F_q, i.e. an element of
/// F_q((X^-1)) with uniformizer X^-1 and |X| = q.
///
/// A value is either exact (every coefficient below the stored ones is zero)
/// or carries a precision floor f: coefficients at exponents >= f are known,
/// those below f are unknown.  Arithmetic propagates floors so that no
/// reported digit depends on unknown input digits.  "Zero to precision"
/// (all known digits vanish) is distinct from exact zero; asking for its
/// norm raises PrecisionError.
class Laurent {
 public:
  explicit Laurent(const Field& f) : f_(&f) {}  // exact zero

  static Laurent from_poly(const Poly& p);
  static Laurent monomial(const Field& f, std::int64_t e, Elem c = 1);
  /// Coefficients for exponents low, low+1, ...; `floor` = nullopt for exact.
  static Laurent from_coeffs(const Field& f, std::int64_t low, std::vector<Elem> coeffs,
                             std::optional<std::int64_t> floor);

  const Field& field() const { return *f_; }
  bool is_exact() const { return !floor_.has_value(); }
  std::optional<std::int64_t> floor() const { return floor_; }
  /// Exact zero.
  bool is_zero() const { return c_.empty() && is_exact(); }
  /// Every known coefficient is zero but the value is not exact.
  bool is_zero_to_precision() const { return c_.empty() && !is_exact(); }
  bool is_nonzero() const { return !c_.empty(); }

  /// Exponent of the leading nonzero coefficient; PrecisionError or
  /// DomainError when there is none.
  std::int64_t top() const;
  Elem lead() const;
  /// Coefficient at exponent e; PrecisionError below the floor.
  Elem coeff(std::int64_t e) const;
  /// Lowest exponent with a stored coefficient (exact values: lowest nonzero).
  std::int64_t low() const { return low_; }
  const std::vector<Elem>& coeffs() const { return c_; }

  /// |x| as q^top; bottom for exact zero; PrecisionError when zero to
  /// precision.
  LogNorm norm() const;
  /// Largest exponent e for which |x| <= q^e is certified (top when nonzero,
  /// floor-1 when zero to precision); nullopt for exact zero.
  std::optional<std::int64_t> norm_bound() const;

  Laurent operator-() const;
  friend Laurent operator+(const Laurent& a, const Laurent& b);
  friend Laurent operator-(const Laurent& a, const Laurent& b) { return a + (-b); }
  friend Laurent operator*(const Laurent& a, const Laurent& b);
  Laurent scaled(Elem c) const;
  /// Multiply by X^k (any sign).
  Laurent shifted(std::int64_t k) const;

  /// Multiplicative inverse.  Inexact inputs keep their relative precision;
  /// exact non-monomials are expanded down to exponent `exact_floor`.
  /// Throws PrecisionError when the input is zero to precision and
  /// DomainError for exact zero.
  Laurent inverse(std::optional<std::int64_t> exact_floor = std::nullopt) const;

  /// Drop digits below `floor` (no-op if already coarser).
  Laurent truncated(std::int64_t floor) const;

  /// Sum of the terms with nonnegative exponent.  PrecisionError if the
  /// floor is above 0.
  Poly polynomial_part() const;
  /// x - polynomial_part(x).
  Laurent fractional_part() const;

  /// Exact equality of representation (same known digits, same floor).
  friend bool operator==(const Laurent& a, const Laurent& b);
  /// Agreement on every digit known to both.
  bool agrees_with(const Laurent& o) const;

 private:
  void normalize();
  const Field* f_;
  std::int64_t low_ = 0;
  std::vector<Elem> c_;
  std::optional<std::int64_t> floor_;
};

}  // namespace ulab
