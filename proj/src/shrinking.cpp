#include "ulab/shrinking.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ulab/errors.hpp"
#include "ulab/random.hpp"
#include "ulab/stats.hpp"

namespace ulab {

HitFamily::HitFamily(std::size_t samples, std::size_t times)
    : samples_(samples), times_(times), words_((times + 63) / 64), bits_(samples * words_, 0), mu_(times, 0.0) {}

void HitFamily::set_mu(std::vector<double> mu, bool analytic) {
  if (mu.size() != times_) throw DomainError("mu must have one entry per time");
  for (double m : mu) {
    if (!(m >= 0 && m <= 1)) throw DomainError("target measures must lie in [0, 1]");
  }
  mu_ = std::move(mu);
  analytic_ = analytic;
}

double HitFamily::mu_hat(std::size_t t) const {
  if (samples_ == 0) return 0;
  std::size_t c = 0;
  for (std::size_t j = 0; j < samples_; ++j) c += hit(j, t);
  return static_cast<double>(c) / static_cast<double>(samples_);
}

HitFamily HitFamily::independent(const std::vector<double>& mu, std::size_t samples, std::uint64_t seed,
                                 int workers) {
  HitFamily h(samples, mu.size());
  h.set_mu(mu, true);
  // each sample owns whole words of the bit matrix
  parallel_for(samples, workers, [&](std::size_t j) {
    Rng rng(derive_seed(seed, j));
    for (std::size_t t = 1; t <= mu.size(); ++t) {
      if (rng.bernoulli(mu[t - 1])) h.set(j, t);
    }
  });
  return h;
}

HitFamily HitFamily::duplicated(std::size_t samples, std::size_t times, std::uint64_t seed) {
  HitFamily h(samples, times);
  h.set_mu(std::vector<double>(times, 0.5), true);
  for (std::size_t j = 0; j < samples; ++j) {
    Rng rng(derive_seed(seed, j));
    if (rng.bernoulli(0.5)) {
      for (std::size_t t = 1; t <= times; ++t) h.set(j, t);
    }
  }
  return h;
}

HitFamily HitFamily::constant(std::size_t samples, std::size_t times, bool value) {
  HitFamily h(samples, times);
  h.set_mu(std::vector<double>(times, value ? 1.0 : 0.0), true);
  if (value) {
    for (std::size_t j = 0; j < samples; ++j) {
      for (std::size_t t = 1; t <= times; ++t) h.set(j, t);
    }
  }
  return h;
}

HitFamily HitFamily::cusp(const PsiSpec& psi, std::uint32_t q, std::size_t m, std::size_t n, std::size_t samples,
                          std::size_t times, std::uint64_t seed, int workers) {
  const Field& f = Field::get(q);
  HitFamily h(samples, times);
  const auto tt = static_cast<std::int64_t>(times);
  std::vector<std::int64_t> r(times + 1, -1);
  for (std::int64_t t = 1; t <= tt; ++t) {
    try {
      r[static_cast<std::size_t>(t)] = solve_rt(psi, m, n, t);
    } catch (const DomainError&) {
      r[static_cast<std::size_t>(t)] = 0;  // vacuous target below t0
    }
  }
  const std::int64_t digits = static_cast<std::int64_t>(m + n) * tt + 8;
  parallel_for(samples, workers, [&](std::size_t j) {
    const DaniLattice dl(random_matrix(f, m, n, digits, derive_seed(seed, j)));
    for (std::int64_t t = 1; t <= tt; ++t) {
      if (-dl.at(t).delta().exponent() >= r[static_cast<std::size_t>(t)]) h.set(j, static_cast<std::size_t>(t));
    }
  });
  std::vector<double> est(times);
  h.weight_.assign(times, 0);
  for (std::size_t t = 1; t <= times; ++t) {
    est[t - 1] = h.mu_hat(t);
    h.weight_[t - 1] = std::pow(static_cast<double>(q), -static_cast<double>(m + n) * static_cast<double>(r[t]));
  }
  h.set_mu(std::move(est), false);
  return h;
}

namespace {

// Hits of sample j at times M..N.
std::uint64_t window_count(const HitFamily& h, std::size_t j, std::size_t M, std::size_t N) {
  std::uint64_t c = 0;
  for (std::size_t t = M; t <= N; ++t) c += h.hit(j, t);
  return c;
}

// Running counts of sample j read off at the (increasing) grid points.
std::vector<std::uint64_t> running_counts(const HitFamily& h, std::size_t j, const std::vector<std::size_t>& grid) {
  std::vector<std::uint64_t> out;
  std::uint64_t c = 0;
  std::size_t t = 1;
  for (std::size_t g : grid) {
    for (; t <= g; ++t) c += h.hit(j, t);
    out.push_back(c);
  }
  return out;
}

double mu_sum(const HitFamily& h, std::size_t N) {
  double e = 0;
  for (std::size_t t = 1; t <= N; ++t) e += h.mu(t);
  return e;
}

void check_horizon(const HitFamily& h, std::size_t N) {
  if (N > h.times()) {
    throw DomainError("N = " + std::to_string(N) + " exceeds the data horizon " + std::to_string(h.times()));
  }
}

}  // namespace

SprindzhukSums sprindzhuk_sums(const HitFamily& h, std::size_t N) {
  check_horizon(h, N);
  SprindzhukSums out;
  out.s.resize(h.samples());
  for (std::size_t j = 0; j < h.samples(); ++j) out.s[j] = N ? window_count(h, j, 1, N) : 0;
  out.e = mu_sum(h, N);
  return out;
}

std::vector<TrajectoryRow> sprindzhuk_trajectory(const HitFamily& h, const std::vector<std::size_t>& grid) {
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("grid must be increasing");
  if (!grid.empty()) check_horizon(h, grid.back());
  std::vector<std::vector<double>> s(grid.size(), std::vector<double>(h.samples()));
  for (std::size_t j = 0; j < h.samples(); ++j) {
    const auto c = running_counts(h, j, grid);
    for (std::size_t g = 0; g < grid.size(); ++g) s[g][j] = static_cast<double>(c[g]);
  }
  std::vector<TrajectoryRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    TrajectoryRow r{grid[g], h.samples() ? stats::median(s[g]) : 0.0, mu_sum(h, grid[g]), 0.0};
    r.ratio = r.e > 0 ? r.s_median / r.e : 0.0;
    rows.push_back(r);
  }
  return rows;
}

std::string trajectory_csv(const std::vector<TrajectoryRow>& rows) {
  std::ostringstream os;
  os.precision(10);
  os << "N,S_median,E,ratio\n";
  for (const auto& r : rows) os << r.N << ',' << r.s_median << ',' << r.e << ',' << r.ratio << '\n';
  return os.str();
}

PairCorrelation pair_correlation(const HitFamily& h, std::size_t M, std::size_t N) {
  if (h.samples() < 2) throw DomainError("pair correlation needs at least two samples");
  if (M < 1 || M > N) throw DomainError("need 1 <= M <= N");
  check_horizon(h, N);
  PairCorrelation pc;
  pc.M = M;
  pc.N = N;
  pc.effective_samples = h.samples();
  const auto J = static_cast<double>(h.samples());
  double sum = 0, sum2 = 0;
  for (std::size_t j = 0; j < h.samples(); ++j) {
    const auto w = static_cast<double>(window_count(h, j, M, N));
    sum += w;
    sum2 += w * w;
  }
  // sum_{s,t} (mu^(h_s h_t) - mu^(h_s) mu^(h_t)) = Var^(sum_t h_t)
  pc.excess = sum2 / J - (sum / J) * (sum / J);
  double mass = 0, diag = 0;
  for (std::size_t t = M; t <= N; ++t) {
    const double m = h.mu_hat(t);
    mass += m;
    diag += m * (1 - m);
  }
  pc.off_diagonal = pc.excess - diag;
  pc.ratio = mass > 0 ? pc.excess / mass : 0.0;
  return pc;
}

QuasiIndependence quasi_independence(const HitFamily& h) {
  QuasiIndependence qi;
  std::vector<double> xs, ys;
  for (std::size_t N = h.times(); N >= 16; N /= 2) {
    const auto pc = pair_correlation(h, 1, N);
    qi.windows.push_back(pc);
    if (pc.ratio > 0) {
      xs.push_back(std::log(static_cast<double>(N)));
      ys.push_back(std::log(pc.ratio));
    }
  }
  std::reverse(qi.windows.begin(), qi.windows.end());
  if (xs.size() >= 2) qi.growth_slope = stats::least_squares(xs, ys).slope;
  qi.violated = qi.growth_slope > 0.5;
  return qi;
}

std::string to_string(BcVerdict v) {
  switch (v) {
    case BcVerdict::MeasureZero:
      return "measure-zero";
    case BcVerdict::FullMeasure:
      return "full-measure";
    case BcVerdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, std::size_t n) {
  if (lo < 1 || hi < lo || n < 2) throw DomainError("bad grid");
  std::vector<std::size_t> g;
  const double a = std::log(static_cast<double>(lo)), b = std::log(static_cast<double>(hi));
  for (std::size_t i = 0; i < n; ++i) {
    const auto v = static_cast<std::size_t>(std::llround(std::exp(a + (b - a) * static_cast<double>(i) / (n - 1))));
    if (g.empty() || v > g.back()) g.push_back(std::clamp(v, lo, hi));
  }
  g.back() = hi;
  return g;
}

BcReport bc_verdict(const HitFamily& h) {
  BcReport rep;
  const std::size_t N = h.times();
  rep.e_total = mu_sum(h, N);
  rep.e_gain = rep.e_total - mu_sum(h, N / 2);
  if (N == 0 || h.samples() == 0 || rep.e_total == 0) {
    rep.verdict = BcVerdict::MeasureZero;
    rep.finite_fraction = 1;
    return rep;
  }
  rep.trajectory = sprindzhuk_trajectory(h, log_grid(1, N, 16));
  const auto J = static_cast<double>(h.samples());
  std::vector<double> ratios;
  double mean = 0, sq = 0;
  std::size_t finite = 0, near = 0;
  for (std::size_t j = 0; j < h.samples(); ++j) {
    const auto s = static_cast<double>(window_count(h, j, 1, N));
    mean += s;
    sq += s * s;
    ratios.push_back(s / rep.e_total);
    near += std::abs(s / rep.e_total - 1) <= 0.1;
    finite += window_count(h, j, N / 2 + 1, N) == 0;
  }
  mean /= J;
  const double sd = std::sqrt(std::max(0.0, sq / J - mean * mean));
  rep.mean_ratio = mean / rep.e_total;
  rep.median_ratio = stats::median(ratios);
  rep.finite_fraction = static_cast<double>(finite) / J;
  rep.near_one_fraction = static_cast<double>(near) / J;

  if (rep.e_gain <= 0.05) {
    rep.verdict = BcVerdict::MeasureZero;
  } else if (rep.e_gain >= 0.15) {
    const bool ratio_ok = std::abs(mean - rep.e_total) <= std::max(0.05 * rep.e_total, 3 * sd / std::sqrt(J));
    const bool qi_ok = h.samples() < 2 || !quasi_independence(h).violated;
    rep.verdict = ratio_ok && qi_ok ? BcVerdict::FullMeasure : BcVerdict::Inconclusive;
  }
  return rep;
}

ErrorTermReport error_term_check(const HitFamily& h, const std::vector<std::size_t>& grid, double eps) {
  if (grid.size() < 3) throw DomainError("error term check needs at least three grid points");
  if (!std::is_sorted(grid.begin(), grid.end())) throw DomainError("grid must be increasing");
  check_horizon(h, grid.back());
  ErrorTermReport rep;
  std::vector<double> e(grid.size()), bound(grid.size());
  for (std::size_t g = 0; g < grid.size(); ++g) {
    e[g] = mu_sum(h, grid[g]);
    const double l = std::log(std::max(e[g], std::exp(1.0)));
    bound[g] = std::sqrt(e[g]) * std::pow(l, 1.5 + eps);
  }
  const std::size_t early = std::max<std::size_t>(1, grid.size() / 3);
  std::vector<std::vector<std::uint64_t>> s(h.samples());
  for (std::size_t j = 0; j < h.samples(); ++j) {
    s[j] = running_counts(h, j, grid);
    for (std::size_t g = 0; g < early; ++g) {
      if (bound[g] > 0) rep.c = std::max(rep.c, std::abs(static_cast<double>(s[j][g]) - e[g]) / bound[g]);
    }
  }
  std::size_t ok = 0;
  rep.within.assign(h.samples(), true);
  for (std::size_t j = 0; j < h.samples(); ++j) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      if (std::abs(static_cast<double>(s[j][g]) - e[g]) > rep.c * bound[g] * (1 + 1e-12) + 1e-9) rep.within[j] = false;
    }
    ok += rep.within[j];
  }
  rep.fraction_within = h.samples() ? static_cast<double>(ok) / static_cast<double>(h.samples()) : 1.0;
  std::vector<double> xs, ys;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double dev = 0;
    for (std::size_t j = 0; j < h.samples(); ++j) dev += std::abs(static_cast<double>(s[j][g]) - e[g]);
    dev /= static_cast<double>(std::max<std::size_t>(h.samples(), 1));
    if (dev > 0 && e[g] > 0) {
      xs.push_back(std::log(e[g]));
      ys.push_back(std::log(dev));
    }
  }
  if (xs.size() >= 2) rep.exponent = stats::least_squares(xs, ys).slope;
  return rep;
}

bool EdReport::all_certified() const {
  return std::all_of(results.begin(), results.end(), [](const EdResult& r) { return r.certified; });
}

EdReport ed_check(const std::function<double(std::int64_t, std::int64_t)>& distance, std::int64_t horizon,
                  const std::vector<double>& betas) {
  if (horizon < 4) throw DomainError("ED horizon too short to certify (need >= 4)");
  const auto H = static_cast<std::size_t>(horizon);
  std::vector<double> d(H * H);
  for (std::size_t s = 0; s < H; ++s) {
    for (std::size_t t = 0; t < H; ++t) {
      const double v = distance(static_cast<std::int64_t>(s + 1), static_cast<std::int64_t>(t + 1));
      if (!(v >= 0)) throw DomainError("distance must be nonnegative");
      d[s * H + t] = v;
    }
  }
  EdReport rep;
  auto witness = [&](std::size_t limit) {
    double c = std::numeric_limits<double>::infinity();
    for (std::size_t s = 0; s < limit; ++s) {
      for (std::size_t t = 0; t < limit; ++t) {
        if (s != t) c = std::min(c, d[s * H + t] / std::abs(static_cast<double>(s) - static_cast<double>(t)));
      }
    }
    return c;
  };
  rep.slope = witness(H);
  rep.half_slope = witness(H / 2);
  const bool linear = rep.slope > 0 && rep.slope >= rep.half_slope * (1 - 1e-12);
  for (double beta : betas) {
    EdResult r;
    r.beta = beta;
    for (std::size_t t = 0; t < H; ++t) {
      double sum = 0;
      for (std::size_t s = 0; s < H; ++s) sum += std::exp(-beta * d[s * H + t]);
      r.partial_sup = std::max(r.partial_sup, sum);
    }
    r.certified = beta > 0 && linear;
    if (r.certified) {
      const double x = std::exp(-beta * rep.slope);
      r.bound = 1 + 2 * x / (1 - x);
    } else {
      r.bound = std::numeric_limits<double>::infinity();
    }
    rep.results.push_back(r);
  }
  return rep;
}

namespace {

struct WeightedFit {
  double slope = 0, intercept = 0;
};

WeightedFit weighted_fit(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& w) {
  double sw = 0, sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sw += w[i];
    sx += w[i] * x[i];
    sy += w[i] * y[i];
  }
  const double mx = sx / sw, my = sy / sw;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += w[i] * (x[i] - mx) * (y[i] - my);
    sxx += w[i] * (x[i] - mx) * (x[i] - mx);
  }
  WeightedFit f;
  f.slope = sxx > 0 ? sxy / sxx : 0;
  f.intercept = my - f.slope * mx;
  return f;
}

// Fit -ln Phi on [begin, end) from per-value counts.
WeightedFit fit_counts(const std::vector<double>& z, const std::vector<std::size_t>& counts, std::size_t total,
                       std::size_t begin, std::size_t end) {
  std::vector<std::size_t> surv(z.size() + 1, 0);
  for (std::size_t k = z.size(); k-- > 0;) surv[k] = surv[k + 1] + counts[k];
  std::vector<double> x, y, w;
  for (std::size_t k = begin; k < end; ++k) {
    if (surv[k] == 0) continue;
    x.push_back(z[k]);
    y.push_back(std::log(static_cast<double>(surv[k]) / static_cast<double>(total)));
    w.push_back(static_cast<double>(surv[k]));
  }
  return weighted_fit(x, y, w);
}

}  // namespace

TailFit tail_fit(const std::vector<double>& samples, std::uint64_t seed, std::size_t bootstrap,
                 std::size_t min_survivors) {
  if (samples.size() < 1000) throw DomainError("tail fit needs at least 1000 samples");
  std::vector<double> sorted = samples;
  std::sort(sorted.begin(), sorted.end());
  TailFit fit;
  std::vector<std::size_t> counts;
  std::vector<std::size_t> index(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (fit.z.empty() || sorted[i] != fit.z.back()) {
      fit.z.push_back(sorted[i]);
      counts.push_back(0);
    }
    ++counts.back();
    index[i] = fit.z.size() - 1;
  }
  const std::size_t n = sorted.size();
  std::size_t above = n;
  for (std::size_t k = 0; k < fit.z.size(); ++k) {
    fit.survivors.push_back(above);
    fit.phi_hat.push_back(static_cast<double>(above) / static_cast<double>(n));
    above -= counts[k];
  }
  const double decile = stats::quantile(sorted, 0.1);
  std::size_t b = 0;
  while (b < fit.z.size() && fit.z[b] <= decile) ++b;
  std::size_t e = b;
  while (e < fit.z.size() && fit.survivors[e] >= min_survivors) ++e;
  fit.fit_begin = b;
  fit.fit_end = e;
  if (e - b < 3) throw DomainError("no linear regime: fewer than three tail points in the fit window");

  const WeightedFit wf = fit_counts(fit.z, counts, n, b, e);
  fit.kappa = -wf.slope;
  fit.intercept = wf.intercept;
  fit.c1 = std::numeric_limits<double>::infinity();
  fit.c2 = 0;
  for (std::size_t k = b; k < e; ++k) {
    const double c = fit.phi_hat[k] * std::exp(fit.kappa * fit.z[k]);
    fit.c1 = std::min(fit.c1, c);
    fit.c2 = std::max(fit.c2, c);
  }

  std::vector<double> boot;
  Rng rng(seed);
  std::vector<std::size_t> bc(fit.z.size());
  for (std::size_t r = 0; r < bootstrap; ++r) {
    std::fill(bc.begin(), bc.end(), 0);
    for (std::size_t i = 0; i < n; ++i) ++bc[index[rng.below(n)]];
    boot.push_back(-fit_counts(fit.z, bc, n, b, e).slope);
  }
  if (boot.empty()) {
    fit.kappa_lo = fit.kappa_hi = fit.kappa;
  } else {
    fit.kappa_lo = stats::quantile(boot, 0.025);
    fit.kappa_hi = stats::quantile(boot, 0.975);
  }
  return fit;
}

std::string TailFit::csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "z,phi_hat,fit,lo,hi\n";
  for (std::size_t k = 0; k < z.size(); ++k) {
    const double g = std::exp(-kappa * z[k]);
    os << z[k] << ',' << phi_hat[k] << ',' << std::exp(intercept) * g << ',' << c1 * g << ',' << c2 * g << '\n';
  }
  return os.str();
}

}  // namespace ulab
