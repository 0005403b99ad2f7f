#include "doctest.h"

#include "oracles.hpp"
#include "ulab/cartan.hpp"
#include "ulab/errors.hpp"
#include "ulab/polylattice.hpp"

using namespace ulab;

namespace {

PolyMatrix mat2(const Field& f, std::vector<std::vector<Elem>> a, std::vector<std::vector<Elem>> b,
                std::vector<std::vector<Elem>> c, std::vector<std::vector<Elem>> d) {
  return {{Poly(f, a[0]), Poly(f, b[0])}, {Poly(f, c[0]), Poly(f, d[0])}};
}

// Is v in the row module of b?  v adj(b) must vanish modulo det b.
bool in_module(const PolyRow& v, const PolyMatrix& b) {
  const PolyMatrix adj = oracle::adjugate(b);
  const Poly det = oracle::leibniz_det(b);
  for (std::size_t j = 0; j < b.size(); ++j) {
    Poly s(det.field());
    for (std::size_t i = 0; i < b.size(); ++i) s += v[i] * adj[i][j];
    if (!divmod(s, det).second.is_zero()) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("weak Popov examples") {
  const Field& f = Field::get(2);
  SUBCASE("identity is already reduced") {
    const PolyLattice l = PolyLattice::standard(f, 3);
    CHECK(l.reduced() == l.basis());
    CHECK(l.delta() == LogNorm::of(0));
    CHECK(l.successive_minima() == std::vector<LogNorm>(3, LogNorm::of(0)));
  }
  SUBCASE("(X,1),(1,X)") {
    const PolyMatrix b = mat2(f, {{0, 1}}, {{1}}, {{1}}, {{0, 1}});
    const PolyLattice l(b, 0);
    for (const auto& row : l.reduced()) CHECK(row_degree(row) == LogNorm::of(1));
    CHECK(l.delta() == LogNorm::of(1));
    CHECK(oracle::enumerate_min_degree(b, 3) == 1);
  }
  SUBCASE("pivots are distinct") {
    const PolyMatrix b = mat2(f, {{1, 1, 1}}, {{0, 1, 1}}, {{1, 0, 1}}, {{1, 1}});
    const auto piv = pivot_columns(weak_popov_reduce(b));
    CHECK(piv[0] != piv[1]);
  }
  SUBCASE("singular input is rejected") {
    const PolyMatrix b = mat2(f, {{0, 1}}, {{1}}, {{0, 1}}, {{1}});
    CHECK_THROWS_AS(PolyLattice(b, 0), DomainError);
    CHECK_THROWS_AS(weak_popov_reduce(b), DomainError);
  }
}

TEST_CASE("reduction preserves the module") {
  const Field& f = Field::get(3);
  Rng rng(4);
  for (int i = 0; i < 60; ++i) {
    const PolyMatrix b = oracle::random_unimodular(f, rng, 3, 4);
    const PolyMatrix r = weak_popov_reduce(b);
    for (const auto& row : b) CHECK(in_module(row, r));
    for (const auto& row : r) CHECK(in_module(row, b));
    CHECK(oracle::leibniz_det(r).degree() == LogNorm::of(0));
  }
}

TEST_CASE("Bareiss determinant matches Leibniz") {
  for (std::uint32_t q : {2u, 3u, 4u}) {
    const Field& f = Field::get(q);
    Rng rng(q);
    for (int i = 0; i < 100; ++i) {
      PolyMatrix b(4, PolyRow(4, Poly(f)));
      for (auto& row : b) {
        for (auto& e : row) e = oracle::random_poly(f, rng, 3);
      }
      CHECK(determinant(b) == oracle::leibniz_det(b));
    }
  }
}

TEST_CASE("delta equals exhaustive counts") {
  for (std::uint32_t q : {2u, 3u}) {
    const Field& f = Field::get(q);
    Rng rng(100 + q);
    for (std::size_t d : {2u, 3u}) {
      for (int i = 0; i < 40; ++i) {
        const PolyMatrix b = oracle::random_nonsingular(f, rng, d, 4);
        const PolyLattice l(b, 0);
        const oracle::KernelCounter counter(b);
        const auto minima = counter.minima();
        const auto got = l.successive_minima();
        for (std::size_t k = 0; k < d; ++k) CHECK(got[k] == LogNorm::of(minima[k]));
        CHECK(l.deg_det() == oracle::leibniz_det(b).deg());
      }
    }
  }
}

TEST_CASE("delta equals coefficient enumeration on small lattices") {
  const Field& f = Field::get(2);
  Rng rng(77);
  for (int i = 0; i < 30; ++i) {
    const PolyMatrix b = oracle::random_nonsingular(f, rng, 2, 3);
    const PolyLattice l(b, 0);
    CHECK(l.delta() == LogNorm::of(oracle::enumerate_min_degree(b, 6)));
  }
}

TEST_CASE("minima product equals covolume") {
  const Field& f = Field::get(3);
  Rng rng(5);
  for (int i = 0; i < 100; ++i) {
    const PolyMatrix b = oracle::random_unimodular(f, rng, 3, 4);
    const auto s = static_cast<std::int64_t>(rng.below(5));
    const PolyLattice l(b, 0);
    std::int64_t sum = 0;
    for (auto m : l.successive_minima()) sum += m.exponent();
    CHECK(sum == 0);
    CHECK(l.is_unimodular());
    const PolyLattice flowed = apply_flow(l, FlowSpec{2, 1, s});
    CHECK(flowed.is_unimodular());
  }
}

TEST_CASE("homogeneity and diagonal lattices") {
  const Field& f = Field::get(2);
  const PolyLattice std2 = PolyLattice::standard(f, 2);
  const PolyLattice d = scale_coordinates(std2, {1, -1});
  CHECK(d.successive_minima() == std::vector<LogNorm>{LogNorm::of(-1), LogNorm::of(1)});
  Rng rng(3);
  for (int i = 0; i < 30; ++i) {
    const PolyLattice l(oracle::random_nonsingular(f, rng, 3, 3), 0);
    const PolyLattice s = scale_coordinates(l, {2, 2, 2});
    CHECK(s.delta() == l.delta().shifted(2));
  }
}

TEST_CASE("flow") {
  const Field& f = Field::get(2);
  const PolyLattice std2 = PolyLattice::standard(f, 2);
  CHECK(apply_flow(std2, FlowSpec{1, 1, 0}).basis() == std2.basis());
  const PolyLattice g1 = apply_flow(std2, FlowSpec{1, 1, 1});
  CHECK(g1.successive_minima() == std::vector<LogNorm>{LogNorm::of(-1), LogNorm::of(1)});
  CHECK(g1.delta() == LogNorm::of(-1));
  for (std::int64_t t = 0; t <= 20; ++t) {
    CHECK(cusp_member(apply_flow(std2, FlowSpec{1, 1, t}), t));
    CHECK_FALSE(cusp_member(apply_flow(std2, FlowSpec{1, 1, t}), t + 1));
  }
  CHECK_FALSE(cusp_member(std2, 1));
  CHECK(cusp_member(std2, 0));

  Rng rng(6);
  for (int i = 0; i < 50; ++i) {
    const PolyLattice l(oracle::random_nonsingular(f, rng, 3, 3), 0);
    const auto t = static_cast<std::int64_t>(rng.below(51));
    const PolyLattice g = apply_flow(l, FlowSpec{1, 2, t});
    CHECK(g.log_covolume() == l.log_covolume());
    CHECK(oracle::leibniz_det(g.basis()).deg() - 3 * g.sigma() == l.log_covolume());
    // delta read off a fresh reduction of the flowed basis
    const PolyLattice again(g.basis(), g.sigma());
    CHECK(again.delta() == g.delta());
    // cusp sets are nested
    const auto r = -g.delta().exponent();
    CHECK(cusp_member(g, r));
    CHECK(cusp_member(g, r - 1));
    CHECK_FALSE(cusp_member(g, r + 1));
  }
}

TEST_CASE("lattice fixture round trip") {
  const Field& f = Field::get(3);
  Rng rng(1);
  for (int i = 0; i < 20; ++i) {
    const PolyLattice l(oracle::random_nonsingular(f, rng, 3, 4), static_cast<std::int64_t>(rng.below(7)) - 3);
    const std::string text = format_lattice(l);
    const PolyLattice back = parse_lattice(text);
    CHECK(back.basis() == l.basis());
    CHECK(back.sigma() == l.sigma());
    CHECK(format_lattice(back) == text);
  }
  CHECK_THROWS_AS(parse_lattice("d=2 sigma=0 q=2\n1:1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_lattice("d=2 sigma=0 q=6\n1 0\n0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_lattice("d=2 sigma=0 q=2 x=1\n1 0\n0 1\n"), ParseError);
  CHECK_THROWS_AS(parse_lattice("d=2 sigma=0 q=2\n1:1 0:1\n1:1 0:1\n"), DomainError);
}

TEST_CASE("cartan distance") {
  const Field& f = Field::get(2);
  CHECK(cartan_distance(identity_matrix(f, 3)) == 0);
  CHECK(cartan_distance(diagonal_matrix(f, {1, -1})) == 2);
  CHECK(elementary_divisor_valuations(diagonal_matrix(f, {1, -1})) == std::vector<std::int64_t>{-1, 1});
  // g_s g_t^-1 for m = 2, n = 1 is diag(X^(s-t), X^(s-t), X^-2(s-t))
  for (std::int64_t u = -5; u <= 5; ++u) {
    const FlowSpec fl{2, 1, u};
    CHECK(cartan_distance(diagonal_matrix(f, fl.exponents())) == 4 * std::abs(u));
  }
  const Field& f3 = Field::get(3);
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    const LaurentMatrix g = to_laurent(oracle::random_nonsingular(f3, rng, 2, 3));
    const LaurentMatrix h = to_laurent(oracle::random_nonsingular(f3, rng, 2, 3));
    const auto dg = cartan_distance(g), dh = cartan_distance(h);
    CHECK(cartan_distance(inverse(g)) == dg);
    CHECK(cartan_distance(multiply(g, h)) <= dg + dh);
    // bi-invariance under polynomial unimodular (here: permutation) factors
    const LaurentMatrix k = to_laurent({{Poly(f3), Poly::constant(f3, 1)}, {Poly::constant(f3, 2), Poly(f3)}});
    CHECK(cartan_distance(multiply(k, g)) == dg);
  }
  CHECK_THROWS_AS(cartan_distance({{Laurent(f), Laurent(f)}, {Laurent(f), Laurent::monomial(f, 0)}}), DomainError);
}
