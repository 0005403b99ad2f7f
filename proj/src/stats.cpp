#include "ulab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>

namespace ulab::stats {

double chi_square_quantile(int dof, double level) {
  boost::math::chi_squared dist(static_cast<double>(dof));
  return boost::math::quantile(dist, level);
}

ChiSquare chi_square_test(std::span<const std::uint64_t> counts, std::span<const double> probs, double level) {
  if (counts.size() != probs.size() || counts.empty()) throw std::invalid_argument("chi-square: size mismatch");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
  std::vector<double> obs, exp;
  double o_acc = 0, e_acc = 0;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    o_acc += static_cast<double>(counts[i]);
    e_acc += probs[i] * total;
    if (e_acc >= 5.0) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
      o_acc = e_acc = 0;
    }
  }
  if (e_acc > 0 || o_acc > 0) {
    if (exp.empty()) {
      obs.push_back(o_acc);
      exp.push_back(e_acc);
    } else {
      obs.back() += o_acc;
      exp.back() += e_acc;
    }
  }
  ChiSquare r;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double d = obs[i] - exp[i];
    r.statistic += d * d / exp[i];
  }
  r.dof = static_cast<int>(obs.size()) - 1;
  if (r.dof < 1) {
    r.critical = 0;
    r.accepted = false;
    return r;
  }
  r.critical = chi_square_quantile(r.dof, level);
  r.accepted = r.statistic <= r.critical;
  return r;
}

double quantile(std::vector<double> v, double p) {
  if (v.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(v.begin(), v.end());
  const double pos = p * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, v.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return v[lo] * (1 - frac) + v[hi] * frac;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double mean(std::span<const double> v) {
  if (v.empty()) return 0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs >= 2 points");
  const double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0) throw std::invalid_argument("least squares: degenerate abscissae");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0;
  for (int k = 1; k <= 100; ++k) {
    const double term = 2 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    p += term;
    if (std::abs(term) < 1e-12) break;
  }
  KsResult r;
  r.statistic = d;
  r.p_value = std::clamp(p, 0.0, 1.0);
  if (lambda < 1e-3) r.p_value = 1.0;
  return r;
}

}  // namespace ulab::stats
