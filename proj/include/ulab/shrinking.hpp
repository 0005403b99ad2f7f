#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "ulab/dani.hpp"

namespace ulab {

/// Indicators h_t(x_j) for samples j < J and times t = 1..N, one bit each,
/// with the per-time target measures mu(h_t).
class HitFamily {
 public:
  HitFamily(std::size_t samples, std::size_t times);

  /// Independent targets with the given measures (mu[t-1] for time t).
  static HitFamily independent(const std::vector<double>& mu, std::size_t samples, std::uint64_t seed,
                               int workers = 1);
  /// h_t = h_1 for every t, mu = 1/2: maximally correlated.
  static HitFamily duplicated(std::size_t samples, std::size_t times, std::uint64_t seed);
  static HitFamily constant(std::size_t samples, std::size_t times, bool value);
  /// Cusp excursions {delta(g_t Lambda_A) <= q^-r(t)} for random A.  mu is
  /// estimated from the samples; analytic_weight() keeps q^-(m+n) r(t).
  static HitFamily cusp(const PsiSpec& psi, std::uint32_t q, std::size_t m, std::size_t n, std::size_t samples,
                        std::size_t times, std::uint64_t seed, int workers = 1);

  std::size_t samples() const { return samples_; }
  std::size_t times() const { return times_; }
  bool hit(std::size_t j, std::size_t t) const {
    return (bits_[j * words_ + (t - 1) / 64] >> ((t - 1) % 64)) & 1;
  }
  void set(std::size_t j, std::size_t t) { bits_[j * words_ + (t - 1) / 64] |= std::uint64_t{1} << ((t - 1) % 64); }

  /// mu(h_t), t = 1..N.
  double mu(std::size_t t) const { return mu_[t - 1]; }
  bool mu_is_analytic() const { return analytic_; }
  void set_mu(std::vector<double> mu, bool analytic);
  /// Fraction of samples with h_t = 1.
  double mu_hat(std::size_t t) const;
  const std::vector<double>& analytic_weight() const { return weight_; }

 private:
  std::size_t samples_, times_, words_;
  std::vector<std::uint64_t> bits_;
  std::vector<double> mu_;
  std::vector<double> weight_;
  bool analytic_ = false;
};

struct SprindzhukSums {
  std::vector<std::uint64_t> s;  // per sample
  double e = 0;
};
SprindzhukSums sprindzhuk_sums(const HitFamily& h, std::size_t N);

struct TrajectoryRow {
  std::size_t N;
  double s_median;
  double e;
  double ratio;  // s_median / e (0 when e = 0)
};
std::vector<TrajectoryRow> sprindzhuk_trajectory(const HitFamily& h, const std::vector<std::size_t>& grid);
/// Rows "N,S_median,E,ratio".
std::string trajectory_csv(const std::vector<TrajectoryRow>& rows);

/// sum_{s,t=M..N} (mu^(h_s h_t) - mu^(h_s) mu^(h_t)), i.e. the sample
/// variance of the window sums.
struct PairCorrelation {
  std::size_t M = 0, N = 0;
  double excess = 0;
  double off_diagonal = 0;  // s != t terms only
  double ratio = 0;         // excess / sum mu^(h_t): the constant C
  std::size_t effective_samples = 0;
};
PairCorrelation pair_correlation(const HitFamily& h, std::size_t M, std::size_t N);

/// C over nested windows [1, N / 2^k]; C growing like a power of the window
/// length (log-log slope above 0.5) flags a failure of quasi-independence.
struct QuasiIndependence {
  std::vector<PairCorrelation> windows;
  double growth_slope = 0;
  bool violated = false;
};
QuasiIndependence quasi_independence(const HitFamily& h);

enum class BcVerdict { MeasureZero, FullMeasure, Inconclusive };
std::string to_string(BcVerdict v);

/// E_N - E_{N/2} <= 0.05 reads as a convergent series (measure zero);
/// >= 0.15 together with mean S / E within 5% of 1 and no quasi-independence
/// failure reads as full measure; anything else is inconclusive.
struct BcReport {
  BcVerdict verdict = BcVerdict::Inconclusive;
  double e_total = 0;
  double e_gain = 0;          // E_N - E_{N/2}
  double mean_ratio = 0;      // mean_j S_j / E
  double median_ratio = 0;
  double finite_fraction = 0; // samples with no hit in (N/2, N]
  double near_one_fraction = 0; // samples with |S/E - 1| <= 0.1
  std::vector<TrajectoryRow> trajectory;
};
BcReport bc_verdict(const HitFamily& h);

struct ErrorTermReport {
  double c = 0;             // fitted on the first third of the grid
  double exponent = 0;      // slope of log mean|S - E| against log E
  std::vector<bool> within; // per sample
  double fraction_within = 0;
};
/// |S - E| <= C E^1/2 (log E)^(3/2 + eps) along the grid.
ErrorTermReport error_term_check(const HitFamily& h, const std::vector<std::size_t>& grid, double eps);

/// Log-spaced grid of n points in [lo, hi].
std::vector<std::size_t> log_grid(std::size_t lo, std::size_t hi, std::size_t n);

struct EdResult {
  double beta = 0;
  bool certified = false;
  double partial_sup = 0; // max_t sum_{s <= H} exp(-beta d(s, t)) over the horizon
  double bound = 0;       // closed-form geometric bound (inf when uncertified)
};
struct EdReport {
  double slope = 0;       // linear witness min d(s, t) / |s - t| over the horizon
  double half_slope = 0;  // same over the first half
  std::vector<EdResult> results;
  bool all_certified() const;
};
/// distance(s, t) = d(f_s f_t^-1, e) for s, t in [1, horizon].  Certified
/// when d >= c |s - t| with c > 0 not shrinking as the horizon doubles, in
/// which case sup_t sum_s exp(-beta d) <= 1 + 2 e^(-beta c) / (1 - e^(-beta c)).
EdReport ed_check(const std::function<double(std::int64_t, std::int64_t)>& distance, std::int64_t horizon,
                  const std::vector<double>& betas);

struct TailFit {
  std::vector<double> z;
  std::vector<double> phi_hat;
  std::vector<std::size_t> survivors;
  std::size_t fit_begin = 0, fit_end = 0;  // window [begin, end) into z
  double kappa = 0;                        // natural-log decay rate
  double kappa_lo = 0, kappa_hi = 0;       // 95% bootstrap interval
  double intercept = 0;
  double c1 = 0, c2 = 0;
  /// Rows "z,phi_hat,fit,lo,hi"; lo/hi are the C1/C2 envelope.
  std::string csv() const;
};
/// Phi^(z) = P(sample >= z) on the distinct sample values.  The fit window
/// drops z at or below the lowest sample decile and z with fewer than
/// `min_survivors` samples at or above it; kappa is the weighted least
/// squares slope of -ln Phi^.  Throws DomainError for fewer than 1000
/// samples or fewer than three points in the window.
TailFit tail_fit(const std::vector<double>& samples, std::uint64_t seed = 1, std::size_t bootstrap = 200,
                 std::size_t min_survivors = 30);

}  // namespace ulab
