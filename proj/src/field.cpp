#include "ulab/field.hpp"

#include <map>
#include <memory>
#include <mutex>

#include "ulab/errors.hpp"

namespace ulab {

namespace {

using Digits = std::vector<std::uint32_t>;

void trim(Digits& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

// Remainder of a modulo a monic m, coefficients in F_p.
Digits mod_monic(Digits a, const Digits& m, std::uint32_t p) {
  trim(a);
  const std::size_t dm = m.size() - 1;
  while (a.size() > dm) {
    const std::uint64_t c = a.back();
    const std::size_t shift = a.size() - 1 - dm;
    for (std::size_t i = 0; i <= dm; ++i) {
      const std::uint64_t sub = (c * m[i]) % p;
      a[shift + i] = static_cast<std::uint32_t>((a[shift + i] + p - sub) % p);
    }
    trim(a);
  }
  return a;
}

Digits mul_mod(const Digits& a, const Digits& b, const Digits& m, std::uint32_t p) {
  if (a.empty() || b.empty()) return {};
  Digits r(a.size() + b.size() - 1, 0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (std::size_t j = 0; j < b.size(); ++j) {
      r[i + j] = static_cast<std::uint32_t>((r[i + j] + static_cast<std::uint64_t>(a[i]) * b[j]) % p);
    }
  }
  return mod_monic(std::move(r), m, p);
}

Digits to_digits(Elem a, std::uint32_t p) {
  Digits d;
  while (a > 0) {
    d.push_back(a % p);
    a /= p;
  }
  return d;
}

Elem from_digits(const Digits& d, std::uint32_t p) {
  Elem v = 0;
  for (std::size_t i = d.size(); i-- > 0;) v = v * p + d[i];
  return v;
}

// Trial division by every monic polynomial of degree 1..deg/2.
bool irreducible(const Digits& f, std::uint32_t p) {
  const std::size_t k = f.size() - 1;
  if (k <= 1) return k == 1;
  for (std::size_t d = 1; d <= k / 2; ++d) {
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < d; ++i) count *= p;
    for (std::uint64_t lower = 0; lower < count; ++lower) {
      Digits g(d + 1, 0);
      std::uint64_t v = lower;
      for (std::size_t i = 0; i < d; ++i) {
        g[i] = static_cast<std::uint32_t>(v % p);
        v /= p;
      }
      g[d] = 1;
      if (mod_monic(f, g, p).empty()) return false;
    }
  }
  return true;
}

std::vector<std::uint32_t> prime_factors(std::uint32_t n) {
  std::vector<std::uint32_t> out;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d) {
    if (n % d == 0) {
      out.push_back(d);
      while (n % d == 0) n /= d;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

Digits pow_mod(Digits base, std::uint64_t e, const Digits& m, std::uint32_t p) {
  Digits r{1};
  while (e > 0) {
    if (e & 1) r = mul_mod(r, base, m, p);
    base = mul_mod(base, base, m, p);
    e >>= 1;
  }
  return r;
}

bool has_full_order(const Digits& g, const Digits& m, std::uint32_t p, std::uint32_t q) {
  if (g.empty()) return false;
  for (std::uint32_t l : prime_factors(q - 1)) {
    Digits r = pow_mod(g, (q - 1) / l, m, p);
    if (r.size() == 1 && r[0] == 1) return false;
  }
  return true;
}

Digits canonical_modulus(std::uint32_t p, std::uint32_t k, std::uint32_t q) {
  if (k == 1) return {0, 1};
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < k; ++i) count *= p;
  for (std::uint64_t lower = 0; lower < count; ++lower) {
    Digits f(k + 1, 0);
    std::uint64_t v = lower;
    for (std::uint32_t i = 0; i < k; ++i) {
      f[i] = static_cast<std::uint32_t>(v % p);
      v /= p;
    }
    f[k] = 1;
    if (f[0] == 0 || !irreducible(f, p)) continue;
    if (has_full_order(Digits{0, 1}, f, p, q)) return f;
  }
  throw DomainError("no primitive polynomial found");
}

}  // namespace

bool is_prime(std::uint32_t n) {
  if (n < 2) return false;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= n; ++d) {
    if (n % d == 0) return false;
  }
  return true;
}

bool prime_power(std::uint32_t q, std::uint32_t& p, std::uint32_t& k) {
  if (q < 2) return false;
  std::uint32_t d = 2;
  while (q % d != 0) ++d;
  p = d;
  k = 0;
  while (q % d == 0) {
    q /= d;
    ++k;
  }
  return q == 1;
}

const Field& Field::get(std::uint32_t q) {
  static std::mutex mu;
  static std::map<std::uint32_t, std::unique_ptr<Field>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(q);
  if (it != cache.end()) return *it->second;
  std::uint32_t p = 0, k = 0;
  if (!prime_power(q, p, k) || q > kMaxOrder) {
    throw DomainError("field order " + std::to_string(q) + " is not a supported prime power");
  }
  auto field = std::make_unique<Field>(p, canonical_modulus(p, k, q));
  const Field& ref = *field;
  cache.emplace(q, std::move(field));
  return ref;
}

Field::Field(std::uint32_t p, std::vector<std::uint32_t> modulus, bool tables)
    : p_(p), modulus_(std::move(modulus)) {
  if (!is_prime(p)) throw DomainError("characteristic " + std::to_string(p) + " is not prime");
  trim(modulus_);
  if (modulus_.size() < 2 || modulus_.back() != 1) throw DomainError("modulus must be monic of degree >= 1");
  for (auto c : modulus_) {
    if (c >= p) throw DomainError("modulus coefficient out of range");
  }
  if (!irreducible(modulus_, p)) throw DomainError("modulus is not irreducible");
  k_ = static_cast<std::uint32_t>(modulus_.size() - 1);
  std::uint64_t q = 1;
  for (std::uint32_t i = 0; i < k_; ++i) q *= p;
  if (q > kMaxOrder) throw DomainError("field too large");
  q_ = static_cast<std::uint32_t>(q);

  for (Elem g = 1; g < q_; ++g) {
    if (q_ == 2 || has_full_order(to_digits(g, p_), modulus_, p_, q_)) {
      generator_ = g;
      break;
    }
  }
  if (tables && q_ <= kTableLimit) build_tables();
}

void Field::build_tables() {
  const std::uint32_t n = q_ - 1;
  exp_.assign(2 * static_cast<std::size_t>(n), 0);
  log_.assign(q_, 0);
  Elem x = 1;
  for (std::uint32_t i = 0; i < n; ++i) {
    exp_[i] = x;
    log_[x] = i;
    x = mul_slow(x, generator_);
  }
  for (std::uint32_t i = n; i < 2 * n; ++i) exp_[i] = exp_[i - n];
}

Elem Field::add_digits(Elem a, Elem b) const {
  Elem r = 0, scale = 1;
  while (a > 0 || b > 0) {
    r += ((a % p_ + b % p_) % p_) * scale;
    a /= p_;
    b /= p_;
    scale *= p_;
  }
  return r;
}

Elem Field::neg_digits(Elem a) const {
  Elem r = 0, scale = 1;
  while (a > 0) {
    r += ((p_ - a % p_) % p_) * scale;
    a /= p_;
    scale *= p_;
  }
  return r;
}

Elem Field::mul_slow(Elem a, Elem b) const {
  return from_digits(mul_mod(to_digits(a, p_), to_digits(b, p_), modulus_, p_), p_);
}

Elem Field::inv(Elem a) const {
  if (a == 0) throw DomainError("inverse of zero in F_q");
  if (!exp_.empty()) return exp_[(q_ - 1 - log_[a]) % (q_ - 1)];
  return inv_slow(a);
}

Elem Field::inv_slow(Elem a) const {
  if (a == 0) throw DomainError("inverse of zero in F_q");
  return from_digits(pow_mod(to_digits(a, p_), q_ - 2, modulus_, p_), p_);
}

Elem Field::from_int(std::int64_t v) const {
  std::int64_t r = v % static_cast<std::int64_t>(p_);
  if (r < 0) r += p_;
  return static_cast<Elem>(r);
}

}  // namespace ulab
