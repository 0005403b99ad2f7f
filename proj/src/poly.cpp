#include "ulab/poly.hpp"

#include <algorithm>

#include "ulab/errors.hpp"

namespace ulab {

Poly::Poly(const Field& f, std::vector<Elem> coeffs) : f_(&f), c_(std::move(coeffs)) {
  for (Elem c : c_) {
    if (c >= f.order()) throw DomainError("coefficient outside F_q");
  }
  normalize();
}

Poly Poly::constant(const Field& f, Elem c) { return Poly(f, {c}); }

Poly Poly::monomial(const Field& f, std::int64_t deg, Elem c) {
  if (deg < 0) throw DomainError("negative monomial degree");
  std::vector<Elem> v(static_cast<std::size_t>(deg) + 1, 0);
  v.back() = c;
  return Poly(f, std::move(v));
}

void Poly::normalize() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

std::int64_t Poly::deg() const {
  if (c_.empty()) throw DomainError("degree of the zero polynomial");
  return static_cast<std::int64_t>(c_.size()) - 1;
}

Poly Poly::operator-() const {
  Poly r(*this);
  for (auto& c : r.c_) c = f_->neg(c);
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = f_->add(c_[i], o.c_[i]);
  normalize();
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), 0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] = f_->sub(c_[i], o.c_[i]);
  normalize();
  return *this;
}

Poly operator*(const Poly& a, const Poly& b) {
  Poly r(*a.f_);
  if (a.c_.empty() || b.c_.empty()) return r;
  const Field& f = *a.f_;
  r.c_.assign(a.c_.size() + b.c_.size() - 1, 0);
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    const Elem ai = a.c_[i];
    if (ai == 0) continue;
    for (std::size_t j = 0; j < b.c_.size(); ++j) {
      r.c_[i + j] = f.add(r.c_[i + j], f.mul(ai, b.c_[j]));
    }
  }
  r.normalize();
  return r;
}

Poly Poly::scaled(Elem c) const {
  Poly r(*this);
  for (auto& x : r.c_) x = f_->mul(x, c);
  r.normalize();
  return r;
}

Poly Poly::shifted(std::int64_t k) const {
  if (k < 0) throw DomainError("negative shift of a polynomial");
  if (c_.empty()) return *this;
  Poly r(*f_);
  r.c_.assign(static_cast<std::size_t>(k), 0);
  r.c_.insert(r.c_.end(), c_.begin(), c_.end());
  return r;
}

void Poly::sub_scaled_shifted(const Poly& o, Elem c, std::int64_t k) {
  if (o.c_.empty() || c == 0) return;
  const std::size_t off = static_cast<std::size_t>(k);
  if (o.c_.size() + off > c_.size()) c_.resize(o.c_.size() + off, 0);
  for (std::size_t i = 0; i < o.c_.size(); ++i) {
    c_[i + off] = f_->sub(c_[i + off], f_->mul(c, o.c_[i]));
  }
  normalize();
}

std::pair<Poly, Poly> divmod(const Poly& a, const Poly& b) {
  if (b.is_zero()) throw DomainError("polynomial division by zero");
  const Field& f = a.field();
  Poly r = a;
  if (a.size() < b.size()) return {Poly(f), r};
  const std::int64_t db = b.deg();
  std::vector<Elem> quot(a.size() - b.size() + 1, 0);
  const Elem inv_lead = f.inv(b.lead());
  while (!r.is_zero() && r.deg() >= db) {
    const std::int64_t shift = r.deg() - db;
    const Elem c = f.mul(r.lead(), inv_lead);
    quot[static_cast<std::size_t>(shift)] = c;
    r.sub_scaled_shifted(b, c, shift);
  }
  return {Poly(f, std::move(quot)), r};
}

}  // namespace ulab
