#include "ulab/laurent.hpp"

#include <algorithm>
#include <cstdlib>
#include <limits>
#include <string>

#include "ulab/errors.hpp"

namespace ulab {

int default_precision() {
  static const int value = [] {
    if (const char* env = std::getenv("ULAB_PRECISION")) {
      try {
        const int v = std::stoi(env);
        if (v > 0) return v;
      } catch (const std::exception&) {
      }
    }
    return 256;
  }();
  return value;
}

Laurent Laurent::from_poly(const Poly& p) {
  Laurent x(p.field());
  x.c_.assign(p.coeffs().begin(), p.coeffs().end());
  x.normalize();
  return x;
}

Laurent Laurent::monomial(const Field& f, std::int64_t e, Elem c) {
  Laurent x(f);
  if (c != 0) {
    x.low_ = e;
    x.c_ = {c};
  }
  return x;
}

Laurent Laurent::from_coeffs(const Field& f, std::int64_t low, std::vector<Elem> coeffs,
                             std::optional<std::int64_t> floor) {
  for (Elem c : coeffs) {
    if (c >= f.order()) throw DomainError("coefficient outside F_q");
  }
  Laurent x(f);
  x.low_ = low;
  x.c_ = std::move(coeffs);
  x.floor_ = floor;
  if (floor && low > *floor) {
    x.c_.insert(x.c_.begin(), static_cast<std::size_t>(low - *floor), 0);
    x.low_ = *floor;
  }
  x.normalize();
  return x;
}

void Laurent::normalize() {
  if (floor_ && low_ < *floor_) {
    const auto drop = static_cast<std::size_t>(std::min<std::int64_t>(*floor_ - low_, static_cast<std::int64_t>(c_.size())));
    c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(drop));
    low_ = *floor_;
  }
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
  if (floor_) {
    if (c_.empty()) low_ = *floor_;
    return;
  }
  std::size_t lead_zeros = 0;
  while (lead_zeros < c_.size() && c_[lead_zeros] == 0) ++lead_zeros;
  if (lead_zeros == c_.size()) {
    c_.clear();
    low_ = 0;
    return;
  }
  c_.erase(c_.begin(), c_.begin() + static_cast<std::ptrdiff_t>(lead_zeros));
  low_ += static_cast<std::int64_t>(lead_zeros);
}

std::int64_t Laurent::top() const {
  if (c_.empty()) {
    if (is_exact()) throw DomainError("top exponent of exact zero");
    throw PrecisionError("top exponent of a value that is zero to precision (floor " +
                         std::to_string(*floor_) + ")");
  }
  return low_ + static_cast<std::int64_t>(c_.size()) - 1;
}

Elem Laurent::lead() const { return c_.empty() ? 0 : c_.back(); }

Elem Laurent::coeff(std::int64_t e) const {
  if (floor_ && e < *floor_) {
    throw PrecisionError("coefficient at exponent " + std::to_string(e) + " is below the precision floor " +
                         std::to_string(*floor_));
  }
  if (e < low_ || e >= low_ + static_cast<std::int64_t>(c_.size())) return 0;
  return c_[static_cast<std::size_t>(e - low_)];
}

LogNorm Laurent::norm() const {
  if (c_.empty()) {
    if (is_exact()) return LogNorm::zero();
    throw PrecisionError("norm of a value that is zero to precision (floor " + std::to_string(*floor_) + ")");
  }
  return LogNorm::of(top());
}

std::optional<std::int64_t> Laurent::norm_bound() const {
  if (!c_.empty()) return top();
  if (is_exact()) return std::nullopt;
  return *floor_ - 1;
}

Laurent Laurent::operator-() const {
  Laurent r(*this);
  for (auto& c : r.c_) c = f_->neg(c);
  return r;
}

Laurent operator+(const Laurent& a, const Laurent& b) {
  const Field& f = *a.f_;
  Laurent r(f);
  if (a.floor_ || b.floor_) {
    r.floor_ = std::max(a.floor_.value_or(std::numeric_limits<std::int64_t>::min()),
                        b.floor_.value_or(std::numeric_limits<std::int64_t>::min()));
  }
  const bool a_empty = a.c_.empty(), b_empty = b.c_.empty();
  if (a_empty && b_empty) {
    r.normalize();
    return r;
  }
  std::int64_t lo = std::numeric_limits<std::int64_t>::max(), hi = std::numeric_limits<std::int64_t>::min();
  if (!a_empty) {
    lo = std::min(lo, a.low_);
    hi = std::max(hi, a.top());
  }
  if (!b_empty) {
    lo = std::min(lo, b.low_);
    hi = std::max(hi, b.top());
  }
  if (r.floor_) lo = std::max(lo, *r.floor_);
  if (hi < lo) {
    r.normalize();
    return r;
  }
  r.low_ = lo;
  r.c_.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  auto accumulate = [&](const Laurent& x) {
    for (std::size_t i = 0; i < x.c_.size(); ++i) {
      const std::int64_t e = x.low_ + static_cast<std::int64_t>(i);
      if (e < lo) continue;
      auto& slot = r.c_[static_cast<std::size_t>(e - lo)];
      slot = f.add(slot, x.c_[i]);
    }
  };
  accumulate(a);
  accumulate(b);
  r.normalize();
  return r;
}

Laurent operator*(const Laurent& a, const Laurent& b) {
  const Field& f = *a.f_;
  if (a.is_zero() || b.is_zero()) return Laurent(f);
  // Uncertainty of x is bounded by X^(floor_x - 1); collect the exponents of
  // every error term and keep digits strictly above the largest.
  std::optional<std::int64_t> floor;
  auto bump = [&](std::int64_t v) { floor = floor ? std::max(*floor, v) : v; };
  if (b.floor_ && !a.c_.empty()) bump(a.top() + *b.floor_);
  if (a.floor_ && !b.c_.empty()) bump(b.top() + *a.floor_);
  if (a.floor_ && b.floor_) bump(*a.floor_ + *b.floor_ - 1);

  Laurent r(f);
  r.floor_ = floor;
  if (a.c_.empty() || b.c_.empty()) {
    r.normalize();
    return r;
  }
  const std::int64_t lo_raw = a.low_ + b.low_;
  const std::int64_t hi = a.top() + b.top();
  const std::int64_t lo = floor ? std::max(lo_raw, *floor) : lo_raw;
  if (hi < lo) {
    r.normalize();
    return r;
  }
  r.low_ = lo;
  r.c_.assign(static_cast<std::size_t>(hi - lo + 1), 0);
  const auto nb = static_cast<std::int64_t>(b.c_.size());
  for (std::size_t i = 0; i < a.c_.size(); ++i) {
    const Elem ai = a.c_[i];
    if (ai == 0) continue;
    const std::int64_t ea = a.low_ + static_cast<std::int64_t>(i);
    const std::int64_t j0 = std::max<std::int64_t>(0, lo - ea - b.low_);
    for (std::int64_t j = j0; j < nb; ++j) {
      const std::int64_t e = ea + b.low_ + j;
      auto& slot = r.c_[static_cast<std::size_t>(e - lo)];
      slot = f.add(slot, f.mul(ai, b.c_[static_cast<std::size_t>(j)]));
    }
  }
  r.normalize();
  return r;
}

Laurent Laurent::scaled(Elem c) const {
  if (c == 0) {
    Laurent r(*f_);
    return r;
  }
  Laurent r(*this);
  for (auto& x : r.c_) x = f_->mul(x, c);
  return r;
}

Laurent Laurent::shifted(std::int64_t k) const {
  Laurent r(*this);
  r.low_ += k;
  if (r.floor_) *r.floor_ += k;
  return r;
}

Laurent Laurent::inverse(std::optional<std::int64_t> exact_floor) const {
  if (c_.empty()) {
    if (is_exact()) throw DomainError("inverse of zero Laurent series");
    throw PrecisionError("inverse of a value that is zero to precision (floor " + std::to_string(*floor_) + ")");
  }
  const std::int64_t e = top();
  const Elem c0_inv = f_->inv(lead());
  if (is_exact() && c_.size() == 1) return monomial(*f_, -e, c0_inv);

  std::int64_t result_floor;
  if (is_exact()) {
    result_floor = exact_floor.value_or(-static_cast<std::int64_t>(default_precision()));
  } else {
    result_floor = *floor_ - 2 * e;
  }
  const std::int64_t digits = -e - result_floor;  // number of digits after the leading one
  Laurent r(*f_);
  r.floor_ = result_floor;
  if (digits < 0) {
    r.normalize();
    return r;
  }
  const auto n = static_cast<std::size_t>(digits) + 1;
  // x = X^e (c_0 + c_1 X^-1 + ...), c_j = coeff(e - j).
  std::vector<Elem> cx(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const std::int64_t ex = e - static_cast<std::int64_t>(j);
    if (ex < low_) break;
    cx[j] = c_[static_cast<std::size_t>(ex - low_)];
  }
  std::vector<Elem> d(n, 0);
  d[0] = c0_inv;
  for (std::size_t k = 1; k < n; ++k) {
    Elem s = 0;
    for (std::size_t j = 1; j <= k; ++j) {
      if (cx[j] != 0 && d[k - j] != 0) s = f_->add(s, f_->mul(cx[j], d[k - j]));
    }
    d[k] = f_->neg(f_->mul(c0_inv, s));
  }
  // d[k] is the coefficient at exponent -e - k; store low to high.
  std::reverse(d.begin(), d.end());
  r.low_ = result_floor;
  r.c_ = std::move(d);
  r.normalize();
  return r;
}

Laurent Laurent::truncated(std::int64_t floor) const {
  Laurent r(*this);
  r.floor_ = r.floor_ ? std::max(*r.floor_, floor) : floor;
  if (r.low_ > *r.floor_ && !r.c_.empty()) {
    r.c_.insert(r.c_.begin(), static_cast<std::size_t>(r.low_ - *r.floor_), 0);
    r.low_ = *r.floor_;
  }
  r.normalize();
  return r;
}

Poly Laurent::polynomial_part() const {
  if (floor_ && *floor_ > 0) {
    throw PrecisionError("polynomial part needs digits down to exponent 0; floor is " + std::to_string(*floor_));
  }
  std::vector<Elem> v;
  for (std::size_t i = 0; i < c_.size(); ++i) {
    const std::int64_t e = low_ + static_cast<std::int64_t>(i);
    if (e < 0) continue;
    if (v.size() <= static_cast<std::size_t>(e)) v.resize(static_cast<std::size_t>(e) + 1, 0);
    v[static_cast<std::size_t>(e)] = c_[i];
  }
  return Poly(*f_, std::move(v));
}

Laurent Laurent::fractional_part() const {
  Laurent r(*this);
  const std::int64_t keep = std::clamp<std::int64_t>(-low_, 0, static_cast<std::int64_t>(c_.size()));
  r.c_.resize(static_cast<std::size_t>(keep));
  if (floor_ && *floor_ > 0) throw PrecisionError("fractional part is unknown above exponent 0");
  r.normalize();
  return r;
}

bool operator==(const Laurent& a, const Laurent& b) {
  return a.f_ == b.f_ && a.floor_ == b.floor_ && a.low_ == b.low_ && a.c_ == b.c_;
}

bool Laurent::agrees_with(const Laurent& o) const {
  std::int64_t lo = std::numeric_limits<std::int64_t>::min();
  if (floor_) lo = std::max(lo, *floor_);
  if (o.floor_) lo = std::max(lo, *o.floor_);
  std::int64_t hi = lo;
  if (!c_.empty()) hi = std::max(hi, top());
  if (!o.c_.empty()) hi = std::max(hi, o.top());
  std::int64_t start = lo;
  if (lo == std::numeric_limits<std::int64_t>::min()) {
    start = std::min(c_.empty() ? 0 : low_, o.c_.empty() ? 0 : o.low_);
  }
  for (std::int64_t e = start; e <= hi; ++e) {
    if (coeff(e) != o.coeff(e)) return false;
  }
  return true;
}

}  // namespace ulab
