#include "doctest.h"

#include <cmath>

#include "ulab/cartan.hpp"
#include "ulab/errors.hpp"
#include "ulab/random.hpp"
#include "ulab/shrinking.hpp"

using namespace ulab;

namespace {

std::vector<double> measures(std::size_t N, double (*mu)(double)) {
  std::vector<double> v(N);
  for (std::size_t t = 1; t <= N; ++t) v[t - 1] = std::min(1.0, mu(static_cast<double>(t)));
  return v;
}

}  // namespace

TEST_CASE("Sprindzhuk sums") {
  const auto zero = sprindzhuk_sums(HitFamily::constant(5, 100, false), 100);
  CHECK(zero.e == 0);
  for (auto s : zero.s) CHECK(s == 0);
  const auto ones = sprindzhuk_sums(HitFamily::constant(5, 100, true), 100);
  CHECK(ones.e == 100);
  for (auto s : ones.s) CHECK(s == 100);

  const HitFamily coins = HitFamily::independent(std::vector<double>(10000, 0.5), 300, 1);
  const auto sums = sprindzhuk_sums(coins, 10000);
  std::size_t good = 0;
  for (auto s : sums.s) {
    CHECK(s <= 10000);
    good += std::abs(static_cast<double>(s) / sums.e - 1) <= 0.03;
  }
  CHECK(good >= 297);
  CHECK_THROWS_AS(sprindzhuk_sums(coins, 10001), DomainError);
  const auto rows = sprindzhuk_trajectory(coins, log_grid(10, 10000, 8));
  CHECK(rows.back().ratio == doctest::Approx(1).epsilon(0.02));
  CHECK(trajectory_csv(rows).rfind("N,S_median,E,ratio\n", 0) == 0);
}

TEST_CASE("pair correlation") {
  const HitFamily coins = HitFamily::independent(std::vector<double>(2000, 0.5), 2000, 3);
  const auto pc = pair_correlation(coins, 1, 2000);
  // all of the excess sits on the diagonal
  CHECK(std::abs(pc.off_diagonal) < 0.1 * pc.excess);
  CHECK(pc.ratio == doctest::Approx(0.5).epsilon(0.1));
  CHECK_FALSE(quasi_independence(coins).violated);

  const HitFamily dup = HitFamily::duplicated(2000, 2000, 3);
  const auto pd = pair_correlation(dup, 11, 1010);
  CHECK(pd.excess == doctest::Approx(1000.0 * 1000.0 / 4).epsilon(0.05));
  const auto qi = quasi_independence(dup);
  CHECK(qi.violated);
  CHECK(qi.growth_slope == doctest::Approx(1).epsilon(0.05));
  CHECK_THROWS_AS(pair_correlation(HitFamily::constant(1, 10, true), 1, 10), DomainError);
}

TEST_CASE("Borel-Cantelli verdicts on independent families") {
  const std::size_t N = 10000, J = 200;
  struct Case {
    const char* name;
    double (*mu)(double);
    BcVerdict want;
  };
  const Case cases[] = {
      {"2^-t", [](double t) { return std::exp2(-t); }, BcVerdict::MeasureZero},
      {"1/t^2", [](double t) { return 1 / (t * t); }, BcVerdict::MeasureZero},
      {"t^-1.5", [](double t) { return std::pow(t, -1.5); }, BcVerdict::MeasureZero},
      {"0.5 t^-3", [](double t) { return 0.5 * std::pow(t, -3.0); }, BcVerdict::MeasureZero},
      {"1/t", [](double t) { return 1 / t; }, BcVerdict::FullMeasure},
      {"1/2", [](double) { return 0.5; }, BcVerdict::FullMeasure},
      {"1/sqrt t", [](double t) { return 1 / std::sqrt(t); }, BcVerdict::FullMeasure},
      {"0.3/t", [](double t) { return 0.3 / t; }, BcVerdict::FullMeasure},
      {"2/t", [](double t) { return 2 / t; }, BcVerdict::FullMeasure},
      {"0.5/t + 1/t^2", [](double t) { return 0.5 / t + 1 / (t * t); }, BcVerdict::FullMeasure},
  };
  for (const auto& c : cases) {
    const std::string name = c.name;
    CAPTURE(name);
    const auto rep = bc_verdict(HitFamily::independent(measures(N, c.mu), J, 11));
    CHECK(rep.verdict == c.want);
    if (rep.e_gain < 1e-3) CHECK(rep.finite_fraction >= 0.99);
  }
  // too slow to call at this horizon, but never called convergent
  CHECK(bc_verdict(HitFamily::independent(measures(N, [](double t) { return 1 / (t * std::log(t + 1)); }), J, 11))
            .verdict == BcVerdict::Inconclusive);
  CHECK(bc_verdict(HitFamily(10, 0)).verdict == BcVerdict::MeasureZero);
  // the duplicated family has the right means but is not quasi-independent
  CHECK(bc_verdict(HitFamily::duplicated(400, 4096, 2)).verdict == BcVerdict::Inconclusive);

  const auto harmonic = bc_verdict(HitFamily::independent(measures(100000, [](double t) { return 1 / t; }), 200, 5));
  CHECK(harmonic.median_ratio == doctest::Approx(1).epsilon(0.05));
}

TEST_CASE("error term") {
  const std::size_t N = 100000;
  const HitFamily coins = HitFamily::independent(std::vector<double>(N, 0.5), 200, 17);
  const auto grid = log_grid(100, N, 12);
  const auto rep = error_term_check(coins, grid, 0.1);
  CHECK(rep.exponent == doctest::Approx(0.5).epsilon(0.1));
  CHECK(rep.fraction_within >= 0.95);

  const auto ones = error_term_check(HitFamily::constant(4, 1000, true), log_grid(10, 1000, 5), 0.1);
  CHECK(ones.fraction_within == 1);

  const auto dup = error_term_check(HitFamily::duplicated(200, 20000, 4), log_grid(10, 20000, 12), 0.1);
  CHECK(dup.fraction_within < 0.75);
  CHECK(dup.exponent == doctest::Approx(1).epsilon(0.05));
}

TEST_CASE("exponential divergence") {
  const Field& f = Field::get(2);
  const std::vector<double> betas{0.01, 0.1, 1, 10};
  for (auto [m, n] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{2, 3}}) {
    auto dist = [&](std::int64_t s, std::int64_t t) {
      return static_cast<double>(cartan_distance(diagonal_matrix(f, FlowSpec{std::size_t(m), std::size_t(n), s - t}.exponents())));
    };
    const auto rep = ed_check(dist, 32, betas);
    CHECK(rep.slope == doctest::Approx(2.0 * m * n));
    CHECK(rep.all_certified());
    for (const auto& r : rep.results) CHECK(r.partial_sup <= r.bound * (1 + 1e-12));
  }
  const auto flat = ed_check([](std::int64_t, std::int64_t) { return 0.0; }, 32, betas);
  for (const auto& r : flat.results) CHECK_FALSE(r.certified);
  const auto slow = ed_check([](std::int64_t s, std::int64_t t) { return std::log(1.0 + std::abs(double(s - t))); }, 64,
                             betas);
  CHECK_FALSE(slow.results[0].certified);
  // certified at beta implies certified at every larger beta
  bool seen = false;
  for (const auto& r : ed_check([](std::int64_t s, std::int64_t t) { return 0.5 * std::abs(double(s - t)); }, 16, betas)
                           .results) {
    if (seen) CHECK(r.certified);
    seen = seen || r.certified;
  }
  CHECK_THROWS_AS(ed_check([](std::int64_t, std::int64_t) { return 1.0; }, 3, betas), DomainError);
}

TEST_CASE("tail fit") {
  for (std::uint32_t q : {2u, 3u}) {
    Rng rng(q);
    std::vector<double> s(100000);
    // P(sample >= k) = q^-2k
    for (auto& x : s) {
      int k = 0;
      while (rng.uniform() < 1.0 / (q * q)) ++k;
      x = k;
    }
    const TailFit fit = tail_fit(s, 7);
    const double kappa = 2 * std::log(static_cast<double>(q));
    CHECK(fit.kappa == doctest::Approx(kappa).epsilon(0.02));
    CHECK(fit.kappa_lo <= fit.kappa);
    CHECK(fit.kappa <= fit.kappa_hi);
    CHECK(fit.c1 <= fit.c2);
    CHECK(std::is_sorted(fit.phi_hat.rbegin(), fit.phi_hat.rend()));
    CHECK(fit.csv().rfind("z,phi_hat,fit,lo,hi\n", 0) == 0);
  }
  CHECK_THROWS_AS(tail_fit(std::vector<double>(999, 1.0)), DomainError);
  CHECK_THROWS_AS(tail_fit(std::vector<double>(5000, 1.0)), DomainError);
}

TEST_CASE("cusp hit family") {
  const HitFamily h = HitFamily::cusp(PsiSpec::power(1), 2, 1, 1, 200, 24, 5, 4);
  const HitFamily h1 = HitFamily::cusp(PsiSpec::power(1), 2, 1, 1, 200, 24, 5, 1);
  for (std::size_t t = 1; t <= 24; ++t) {
    CHECK(h.mu(t) == h1.mu(t));
    // r(t) = 0 for psi = 1/x: every lattice is in the target
    CHECK(h.mu(t) == 1);
  }
  const HitFamily c = HitFamily::cusp(PsiSpec::power(3), 2, 1, 1, 400, 24, 5, 4);
  CHECK_FALSE(c.mu_is_analytic());
  CHECK(c.analytic_weight()[9] == doctest::Approx(std::exp2(-2.0 * 5)));
  const auto qi = quasi_independence(c);
  CHECK(qi.windows.size() >= 1);
}
