#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ulab {

/// An element of F_q encoded as the integer sum c_i p^i of its coordinates
/// in the polynomial basis 1, x, ..., x^(k-1) over F_p.  0 and 1 encode the
/// additive and multiplicative identities.
using Elem = std::uint32_t;

/// The finite field F_q, q = p^k, in a polynomial basis over F_p.
///
/// Fields are immutable; `Field::get(q)` returns a process-wide instance
/// built from the canonical modulus (the lexicographically first monic
/// primitive polynomial of degree k), so every value of a given q shares a
/// single field object and pointer comparison is field equality.
///
/// Multiplication uses log/antilog tables for q <= 2^16; the table-free
/// path (`mul_slow`, `inv_slow`) multiplies residues modulo the modulus and
/// is always available for cross-checking.
class Field {
 public:
  static constexpr std::uint32_t kTableLimit = 1u << 16;
  static constexpr std::uint32_t kMaxOrder = 1u << 24;

  /// Canonical field of order q.  Throws DomainError unless q is a prime
  /// power with 2 <= q <= kMaxOrder.
  static const Field& get(std::uint32_t q);

  /// Field with an explicit modulus (coefficients over F_p, low to high,
  /// monic).  Throws DomainError if p is not prime or the modulus is not
  /// irreducible.
  Field(std::uint32_t p, std::vector<std::uint32_t> modulus, bool build_tables = true);

  std::uint32_t order() const { return q_; }
  std::uint32_t characteristic() const { return p_; }
  std::uint32_t degree() const { return k_; }
  const std::vector<std::uint32_t>& modulus() const { return modulus_; }
  bool has_tables() const { return !exp_.empty(); }

  Elem add(Elem a, Elem b) const {
    if (p_ == 2) return a ^ b;
    if (k_ == 1) {
      const std::uint32_t s = a + b;
      return s >= p_ ? s - p_ : s;
    }
    return add_digits(a, b);
  }
  Elem neg(Elem a) const {
    if (p_ == 2) return a;
    if (k_ == 1) return a == 0 ? 0 : p_ - a;
    return neg_digits(a);
  }
  Elem sub(Elem a, Elem b) const { return add(a, neg(b)); }

  Elem mul(Elem a, Elem b) const {
    if (a == 0 || b == 0) return 0;
    if (!exp_.empty()) return exp_[log_[a] + log_[b]];
    return mul_slow(a, b);
  }
  /// Throws DomainError for a == 0.
  Elem inv(Elem a) const;
  Elem div(Elem a, Elem b) const { return mul(a, inv(b)); }

  /// Table-free arithmetic on residues modulo the defining polynomial.
  Elem mul_slow(Elem a, Elem b) const;
  Elem inv_slow(Elem a) const;

  /// Image of an integer under Z -> F_p -> F_q.
  Elem from_int(std::int64_t v) const;

  std::uint32_t primitive_element() const { return generator_; }

 private:
  Elem add_digits(Elem a, Elem b) const;
  Elem neg_digits(Elem a) const;
  void build_tables();

  std::uint32_t p_ = 0;
  std::uint32_t k_ = 0;
  std::uint32_t q_ = 0;
  std::vector<std::uint32_t> modulus_;
  Elem generator_ = 0;
  std::vector<Elem> exp_;  // exp_[i] = g^i for i < 2(q-1)
  std::vector<std::uint32_t> log_;
};

/// Decompose q = p^k; returns false if q is not a prime power.
bool prime_power(std::uint32_t q, std::uint32_t& p, std::uint32_t& k);
bool is_prime(std::uint32_t n);

}  // namespace ulab
