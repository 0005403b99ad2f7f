#include "doctest.h"

#include <cmath>

#include "ulab/cfrac.hpp"
#include "ulab/errors.hpp"
#include "ulab/random.hpp"

using namespace ulab;

namespace {

Laurent random_unit_ball(const Field& f, Rng& rng, int precision) {
  std::vector<Elem> c(static_cast<std::size_t>(precision));
  for (auto& x : c) x = rng.elem(f);
  return Laurent::from_coeffs(f, -precision, std::move(c), -precision);
}

// Reference expansion by repeated polynomial part and inversion in Laurent
// arithmetic.  Stops as soon as a quotient is no longer determined.
std::vector<Poly> slow_expand(Laurent x, std::size_t max_terms) {
  std::vector<Poly> out;
  while (out.size() < max_terms) {
    Poly a(x.field());
    try {
      a = x.polynomial_part();
    } catch (const PrecisionError&) {
      break;
    }
    out.push_back(a);
    const Laurent frac = x - Laurent::from_poly(a);
    if (frac.is_zero() || frac.is_zero_to_precision()) break;
    x = frac.inverse();
  }
  return out;
}

}  // namespace

TEST_CASE("cf_expand examples") {
  const Field& f = Field::get(2);
  SUBCASE("polynomial") {
    const Poly p(f, {1, 0, 1, 1});
    const auto cf = cf_expand(Laurent::from_poly(p), 10);
    REQUIRE(cf.size() == 1);
    CHECK(cf.quotients[0] == p);
    CHECK(cf.stop == CfStop::Complete);
  }
  SUBCASE("X + 1/X") {
    const Laurent a = Laurent::monomial(f, 1) + Laurent::monomial(f, -1);
    const auto cf = cf_expand(a, 10);
    REQUIRE(cf.size() == 2);
    CHECK(cf.quotients[0] == Poly(f, {0, 1}));
    CHECK(cf.quotients[1] == Poly(f, {0, 1}));
    CHECK(cf_evaluate(cf, -20).agrees_with(a));
    // |alpha - X| = |X^-1|
    CHECK(approx_quality(a, cf, 0) == LogNorm::of(-1));
  }
  SUBCASE("1/(X+1)") {
    const Laurent a = Laurent::from_poly(Poly(f, {1, 1})).inverse(-64);
    const auto cf = cf_expand(a, 10);
    REQUIRE(cf.size() >= 2);
    CHECK(cf.quotients[0].is_zero());
    CHECK(cf.quotients[1] == Poly(f, {1, 1}));
    CHECK(cf.size() == 2);
    CHECK(cf_evaluate(cf, -64).agrees_with(a));
  }
  SUBCASE("exact polynomial quality is zero") {
    const Laurent a = Laurent::from_poly(Poly(f, {1, 1}));
    CHECK(approx_quality(a, cf_expand(a, 3), 0).is_zero());
  }
  SUBCASE("no digits at exponent 0") {
    const Laurent a = Laurent::from_coeffs(f, 2, {1}, 2);
    CHECK_THROWS_AS(cf_expand(a, 3), PrecisionError);
  }
}

TEST_CASE("stop reasons are distinct") {
  const Field& f = Field::get(3);
  Rng rng(2);
  const Laurent a = random_unit_ball(f, rng, 40);
  CHECK(cf_expand(a, 2).stop == CfStop::MaxTerms);
  CHECK(cf_expand(a, 1000).stop == CfStop::PrecisionExhausted);
}

TEST_CASE("Euclid expansion matches reference Laurent expansion") {
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const Field& f = Field::get(q);
    Rng rng(q * 17);
    for (int i = 0; i < 200; ++i) {
      const Laurent a = random_unit_ball(f, rng, 48) + Laurent::from_poly(Poly(f, {rng.elem(f), rng.elem(f)}));
      const auto cf = cf_expand(a, 1000);
      const auto ref = slow_expand(a, 1000);
      // every certified quotient is determined by the known digits
      REQUIRE(cf.size() <= ref.size());
      for (std::size_t k = 0; k < cf.size(); ++k) CHECK(cf.quotients[k] == ref[k]);
    }
  }
}

TEST_CASE("certified terms never change at higher precision") {
  const Field& f = Field::get(2);
  Rng rng(8);
  for (int i = 0; i < 300; ++i) {
    const Laurent hi = random_unit_ball(f, rng, 120);
    const Laurent lo = hi.truncated(-40);
    const auto a = cf_expand(lo, 1000), b = cf_expand(hi, 1000);
    REQUIRE(a.size() <= b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a.quotients[k] == b.quotients[k]);
    // certification is tight: the next term needs more than the floor allows
    if (a.size() < b.size()) CHECK(2 * b.deg_q(a.size()) > 40);
  }
}

TEST_CASE("determinant identity, degree sums and quality law") {
  for (std::uint32_t q : {2u, 3u, 5u}) {
    const Field& f = Field::get(q);
    Rng rng(q);
    for (int i = 0; i < 100; ++i) {
      const Laurent a = random_unit_ball(f, rng, 64);
      const auto cf = cf_expand(a, 1000);
      std::int64_t sum = 0;
      for (std::size_t k = 0; k < cf.size(); ++k) {
        if (k >= 1) {
          REQUIRE(cf.quotients[k].deg() >= 1);
          sum += cf.quotients[k].deg();
          const Poly det = cf.p[k] * cf.q[k - 1] - cf.p[k - 1] * cf.q[k];
          CHECK(det.degree() == LogNorm::of(0));
        }
        CHECK(cf.deg_q(k) == sum);
        if (k + 1 < cf.size()) {
          CHECK(approx_quality(a, cf, k) == LogNorm::of(-cf.deg_q(k) - cf.deg_q(k + 1)));
        }
      }
      CHECK(cf_evaluate(cf, -2 * cf.deg_q(cf.size() - 1)).agrees_with(a.truncated(-2 * cf.deg_q(cf.size() - 1))));
    }
  }
}

TEST_CASE("exhaustive degree table over F_2 at N = 12") {
  const DegreeTable t = pq_degree_enumerate(2, 12, 1000);
  REQUIRE(t.samples == 4096);
  // Every tallied quotient follows a q_{i-1} of degree <= 2, so degrees up
  // to 12/2 - 2 are always certified and their counts halve exactly.
  REQUIRE(t.counts.size() >= 5);
  for (std::size_t d = 1; d + 1 <= 4; ++d) {
    CAPTURE(d);
    CHECK(t.counts[d] == 2 * t.counts[d + 1]);
  }
  CHECK(t.frequency(1) == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("Monte Carlo degree frequencies") {
  const DegreeTable t2 = pq_degree_stats(20000, 2, 64, 7);
  CHECK(t2.frequency(1) == doctest::Approx(0.5).epsilon(0.03));
  CHECK(t2.frequency(2) == doctest::Approx(0.25).epsilon(0.05));
  CHECK(t2.chi_square().accepted);
  const DegreeTable t4 = pq_degree_stats(20000, 4, 64, 7);
  CHECK(t4.frequency(1) == doctest::Approx(0.75).epsilon(0.03));
  double sum = static_cast<double>(t4.truncated) / static_cast<double>(t4.total());
  for (std::size_t d = 0; d < t4.counts.size(); ++d) sum += t4.frequency(d);
  CHECK(sum == doctest::Approx(1.0));
}

TEST_CASE("degree stats are worker-count independent") {
  const DegreeTable a = pq_degree_stats(3000, 3, 64, 1, 64, 1);
  const DegreeTable b = pq_degree_stats(3000, 3, 64, 1, 64, 4);
  CHECK(a.csv() == b.csv());
  CHECK(a.truncated == b.truncated);
}
