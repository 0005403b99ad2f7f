#include "ulab/cfrac.hpp"

#include <cmath>
#include <sstream>

#include "ulab/errors.hpp"
#include "ulab/random.hpp"

namespace ulab {

CFExpansion cf_expand(const Laurent& alpha, std::size_t max_terms) {
  const Field& f = alpha.field();
  CFExpansion cf;
  cf.source_floor = alpha.floor();

  // alpha = A / X^K + (unknown digits below the floor).
  std::int64_t K = 0;
  if (alpha.floor()) {
    K = -*alpha.floor();
    if (K < 0) throw PrecisionError("continued fraction needs digits down to exponent 0");
  } else if (alpha.is_nonzero()) {
    K = std::max<std::int64_t>(0, -alpha.low());
  }
  std::vector<Elem> digits;
  if (alpha.is_nonzero()) {
    const std::int64_t lo = alpha.low();
    digits.assign(static_cast<std::size_t>(alpha.top() - (-K) + 1), 0);
    for (std::size_t i = 0; i < alpha.coeffs().size(); ++i) {
      const std::int64_t e = lo + static_cast<std::int64_t>(i);
      digits[static_cast<std::size_t>(e + K)] = alpha.coeffs()[i];
    }
  }
  Poly num(f, std::move(digits));
  Poly den = Poly::monomial(f, K);
  const bool exact = alpha.is_exact();

  Poly p_prev = Poly::constant(f, 1), q_prev(f);  // p_{-1}, q_{-1}
  Poly p_prev2(f), q_prev2 = Poly::constant(f, 1);
  bool first = true;
  std::int64_t deg_q = 0;
  cf.stop = CfStop::MaxTerms;
  while (cf.quotients.size() < max_terms) {
    if (!first && num.is_zero()) {
      // nothing remains: exact rationals end here, truncated data ran dry
      cf.stop = exact ? CfStop::Complete : CfStop::PrecisionExhausted;
      return cf;
    }
    auto [a, r] = first ? divmod(num, den) : divmod(den, num);
    if (!first) {
      deg_q += a.deg();
      if (!exact && 2 * deg_q > K) {
        cf.stop = CfStop::PrecisionExhausted;
        return cf;
      }
      den = std::move(num);
      num = std::move(r);
    } else {
      num = std::move(r);
    }
    Poly p_new = a * p_prev + p_prev2;
    Poly q_new = a * q_prev + q_prev2;
    if (first) {
      p_new = a;
      q_new = Poly::constant(f, 1);
    }
    p_prev2 = std::move(p_prev);
    q_prev2 = std::move(q_prev);
    p_prev = p_new;
    q_prev = q_new;
    cf.quotients.push_back(std::move(a));
    cf.p.push_back(std::move(p_new));
    cf.q.push_back(std::move(q_new));
    first = false;
  }
  if (!num.is_zero() || !exact) return cf;
  cf.stop = CfStop::Complete;
  return cf;
}

LogNorm approx_quality(const Laurent& alpha, const CFExpansion& cf, std::size_t i) {
  if (i >= cf.size()) throw DomainError("convergent index out of range");
  const Laurent diff = alpha * Laurent::from_poly(cf.q[i]) - Laurent::from_poly(cf.p[i]);
  if (diff.is_zero_to_precision()) {
    throw PrecisionError("|alpha q_i - p_i| is below the precision floor at i = " + std::to_string(i));
  }
  return diff.norm().shifted(-cf.deg_q(i));
}

Laurent cf_evaluate(const CFExpansion& cf, std::int64_t floor) {
  if (cf.quotients.empty()) throw DomainError("empty continued fraction");
  Laurent acc = Laurent::from_poly(cf.quotients.back());
  for (std::size_t k = cf.quotients.size() - 1; k-- > 0;) {
    acc = Laurent::from_poly(cf.quotients[k]) + acc.inverse(floor).truncated(floor);
  }
  return acc;
}

std::uint64_t DegreeTable::total() const {
  std::uint64_t t = truncated;
  for (auto c : counts) t += c;
  return t;
}

double DegreeTable::frequency(std::size_t d) const {
  const auto t = total();
  if (t == 0 || d >= counts.size()) return 0;
  return static_cast<double>(counts[d]) / static_cast<double>(t);
}

double DegreeTable::expected(std::size_t d) const {
  if (d == 0) return 0;
  return (q - 1.0) * std::pow(static_cast<double>(q), -static_cast<double>(d));
}

stats::ChiSquare DegreeTable::chi_square() const {
  std::vector<std::uint64_t> obs;
  std::vector<double> probs;
  double mass = 0;
  for (std::size_t d = 1; d < counts.size(); ++d) {
    obs.push_back(counts[d]);
    probs.push_back(expected(d));
    mass += expected(d);
  }
  obs.push_back(truncated);
  probs.push_back(std::max(0.0, 1.0 - mass));
  return stats::chi_square_test(obs, probs);
}

std::string DegreeTable::csv() const {
  std::ostringstream os;
  os << "d,count,freq,expected\n";
  for (std::size_t d = 1; d < counts.size(); ++d) {
    os << d << ',' << counts[d] << ',' << frequency(d) << ',' << expected(d) << '\n';
  }
  return os.str();
}

DegreeRun partial_quotient_degrees(const Field& f, const std::vector<Elem>& digits, std::size_t max_terms) {
  // alpha = A / X^N with A = sum c_j X^(N-j).
  const auto N = static_cast<std::int64_t>(digits.size());
  std::vector<Elem> a_coeffs(digits.size(), 0);
  for (std::size_t j = 0; j < digits.size(); ++j) a_coeffs[digits.size() - 1 - j] = digits[j];
  Poly num(f, std::move(a_coeffs));
  Poly den = Poly::monomial(f, N);
  DegreeRun run;
  std::int64_t deg_q = 0;
  while (run.degrees.size() < max_terms) {
    if (num.is_zero()) {
      run.next_uncertified = true;
      return run;
    }
    const std::int64_t d = den.deg() - num.deg();
    if (2 * (deg_q + d) > N) {
      run.next_uncertified = true;
      return run;
    }
    run.degrees.push_back(d);
    deg_q += d;
    Poly r = divmod(den, num).second;
    den = std::move(num);
    num = std::move(r);
  }
  return run;
}

namespace {

void tally(DegreeTable& table, const DegreeRun& run, std::size_t max_terms) {
  std::int64_t deg_q = 0;
  for (std::size_t i = 0; i < max_terms; ++i) {
    if (deg_q >= table.horizon) return;
    if (i >= run.degrees.size()) {
      if (run.next_uncertified) ++table.truncated;
      return;
    }
    const auto d = static_cast<std::size_t>(run.degrees[i]);
    if (table.counts.size() <= d) table.counts.resize(d + 1, 0);
    ++table.counts[d];
    deg_q += run.degrees[i];
  }
}

DegreeTable empty_table(std::uint32_t q, int precision) {
  if (precision < 4) throw DomainError("degree statistics need precision >= 4");
  DegreeTable t;
  t.q = q;
  t.precision = precision;
  t.horizon = precision / 4;
  t.counts.assign(2, 0);
  return t;
}

}  // namespace

DegreeTable pq_degree_stats(std::size_t sample_count, std::uint32_t q, std::size_t max_terms, std::uint64_t seed,
                            int precision, int workers) {
  if (sample_count == 0) throw DomainError("sample_count must be >= 1");
  const Field& f = Field::get(q);
  DegreeTable table = empty_table(q, precision);
  table.samples = sample_count;
  std::vector<DegreeRun> runs(sample_count);
  parallel_for(sample_count, workers, [&](std::size_t i) {
    Rng rng(derive_seed(seed, i));
    std::vector<Elem> digits(static_cast<std::size_t>(precision));
    for (auto& c : digits) c = rng.elem(f);
    runs[i] = partial_quotient_degrees(f, digits, max_terms);
  });
  for (const auto& run : runs) tally(table, run, max_terms);
  return table;
}

DegreeTable pq_degree_enumerate(std::uint32_t q, int precision, std::size_t max_terms) {
  const Field& f = Field::get(q);
  DegreeTable table = empty_table(q, precision);
  double space = std::pow(static_cast<double>(q), precision);
  if (space > 1e8) throw DomainError("enumeration space too large");
  std::vector<Elem> digits(static_cast<std::size_t>(precision), 0);
  const auto n = static_cast<std::uint64_t>(space);
  for (std::uint64_t k = 0; k < n; ++k) {
    std::uint64_t v = k;
    for (auto& c : digits) {
      c = static_cast<Elem>(v % q);
      v /= q;
    }
    tally(table, partial_quotient_degrees(f, digits, max_terms), max_terms);
  }
  table.samples = n;
  return table;
}

}  // namespace ulab
