#include "ulab/dani.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "ulab/errors.hpp"
#include "ulab/random.hpp"
#include "ulab/stats.hpp"

namespace ulab {

// ---------------------------------------------------------------- PsiSpec

PsiSpec PsiSpec::power(std::int64_t num, std::int64_t den, std::int64_t offset) {
  if (den <= 0) throw DomainError("psi exponent denominator must be positive");
  if (num < 0) throw DomainError("psi must be non-increasing (tau >= 0)");
  const std::int64_t g = std::gcd(num, den);
  PsiSpec p;
  p.kind_ = Kind::Power;
  p.num_ = g ? num / g : 0;
  p.den_ = g ? den / g : 1;
  p.tau_ = static_cast<double>(p.num_) / static_cast<double>(p.den_);
  p.offset_ = offset;
  return p;
}

PsiSpec PsiSpec::power_log(double tau, double c, std::int64_t offset) {
  if (tau < 0 || c < 0) throw DomainError("psi must be non-increasing (tau, c >= 0)");
  PsiSpec p;
  p.kind_ = Kind::PowerLog;
  p.tau_ = tau;
  p.c_ = c;
  p.offset_ = offset;
  return p;
}

PsiSpec PsiSpec::table(std::vector<double> values, std::int64_t offset) {
  if (values.size() < 2) throw DomainError("psi table needs at least two values");
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1]) throw DomainError("psi table must be non-increasing");
  }
  PsiSpec p;
  p.kind_ = Kind::Table;
  p.table_ = std::move(values);
  p.offset_ = offset;
  return p;
}

namespace {

double parse_double(std::string_view s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(std::string(s), &used);
    if (used != s.size()) throw ParseError("");
    return v;
  } catch (const std::exception&) {
    throw ParseError("bad number '" + std::string(s) + "' in psi spec");
  }
}

std::int64_t parse_i64(std::string_view s) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError("bad integer '" + std::string(s) + "' in psi spec");
  return v;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

PsiSpec PsiSpec::parse(std::string_view text) {
  std::int64_t offset = 0;
  // trailing "+k" / "-k" after the last ':' field
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) throw ParseError("psi spec needs '<kind>:<params>'");
  const auto kind = text.substr(0, colon);
  auto params = text.substr(colon + 1);
  const auto sign = params.find_last_of("+");
  if (sign != std::string_view::npos) {
    offset = parse_i64(params.substr(sign + 1));
    params = params.substr(0, sign);
  } else if (kind != "table") {
    const auto minus = params.find_last_of('-');
    if (minus != std::string_view::npos && minus > 0 && params[minus - 1] != 'e') {
      offset = -parse_i64(params.substr(minus + 1));
      params = params.substr(0, minus);
    }
  }
  try {
    if (kind == "power") {
      const auto slash = params.find('/');
      if (slash != std::string_view::npos) {
        return power(parse_i64(params.substr(0, slash)), parse_i64(params.substr(slash + 1)), offset);
      }
      if (params.find_first_of(".eE") == std::string_view::npos) return power(parse_i64(params), 1, offset);
      // decimal tau: exact as a ratio over a power of ten
      const auto dot = params.find('.');
      if (dot != std::string_view::npos && params.find_first_of("eE") == std::string_view::npos) {
        const std::string digits = std::string(params.substr(0, dot)) + std::string(params.substr(dot + 1));
        std::int64_t den = 1;
        for (std::size_t i = dot + 1; i < params.size(); ++i) den *= 10;
        return power(parse_i64(digits), den, offset);
      }
      throw ParseError("power exponent must be an integer, a ratio a/b or a decimal");
    }
    if (kind == "power-log") {
      const auto sep = params.find(':');
      if (sep == std::string_view::npos) throw ParseError("power-log needs 'power-log:<tau>:<c>'");
      return power_log(parse_double(params.substr(0, sep)), parse_double(params.substr(sep + 1)), offset);
    }
    if (kind == "table") {
      std::vector<double> v;
      std::size_t start = 0;
      for (std::size_t i = 0; i <= params.size(); ++i) {
        if (i == params.size() || params[i] == ',') {
          v.push_back(parse_double(params.substr(start, i - start)));
          start = i + 1;
        }
      }
      return table(std::move(v), offset);
    }
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  throw ParseError("unknown psi kind '" + std::string(kind) + "'");
}

std::string PsiSpec::to_string() const {
  std::string s;
  switch (kind_) {
    case Kind::Power:
      s = "power:" + std::to_string(num_) + (den_ != 1 ? "/" + std::to_string(den_) : "");
      break;
    case Kind::PowerLog:
      s = "power-log:" + format_double(tau_) + ":" + format_double(c_);
      break;
    case Kind::Table:
      s = "table:";
      for (std::size_t i = 0; i < table_.size(); ++i) s += (i ? "," : "") + format_double(table_[i]);
      break;
  }
  if (offset_ > 0) s += "+" + std::to_string(offset_);
  if (offset_ < 0) s += "-" + std::to_string(-offset_);
  return s;
}

PsiSpec PsiSpec::scaled(std::int64_t k) const {
  PsiSpec p = *this;
  p.offset_ += k;
  return p;
}

double PsiSpec::tau() const {
  if (kind_ == Kind::Table) throw DomainError("table psi has no exponent");
  return tau_;
}

double PsiSpec::value(std::int64_t j) const {
  switch (kind_) {
    case Kind::Power:
      return -tau_ * static_cast<double>(j) + static_cast<double>(offset_);
    case Kind::PowerLog: {
      const double jj = static_cast<double>(std::max<std::int64_t>(j, 1));
      return -tau_ * jj - c_ * std::log(jj) + static_cast<double>(offset_);
    }
    case Kind::Table: {
      const auto n = static_cast<std::int64_t>(table_.size());
      if (j < 0) j = 0;
      if (j < n) return table_[static_cast<std::size_t>(j)] + static_cast<double>(offset_);
      const double slope = table_[table_.size() - 1] - table_[table_.size() - 2];
      return table_.back() + slope * static_cast<double>(j - n + 1) + static_cast<double>(offset_);
    }
  }
  return 0;
}

int PsiSpec::compare(std::int64_t j, std::int64_t y) const {
  if (kind_ == Kind::Power) {
    // -num/den * j + offset - y
    const std::int64_t lhs = -num_ * j + den_ * (offset_ - y);
    return (lhs > 0) - (lhs < 0);
  }
  const double v = value(j) - static_cast<double>(y);
  if (std::abs(v) < 1e-9) return 0;
  return v > 0 ? 1 : -1;
}

// ------------------------------------------------------------ Dani lattice

DaniLattice::DaniLattice(LaurentMatrix a_) : a(std::move(a_)) {
  if (a.empty() || a[0].empty()) throw DomainError("empty matrix A");
  m = a.size();
  n = a[0].size();
  for (const auto& row : a) {
    if (row.size() != n) throw DomainError("ragged matrix A");
  }
}

PolyLattice DaniLattice::at(std::int64_t t, std::int64_t extra) const {
  if (t < 0) throw DomainError("flow time must be >= 0");
  const Field& f = a[0][0].field();
  const std::int64_t nu = digits_needed(t) + extra;
  const auto mi = static_cast<std::int64_t>(m), ni = static_cast<std::int64_t>(n);
  const std::size_t d = m + n;
  PolyMatrix b(d, PolyRow(d, Poly(f)));
  for (std::size_t i = 0; i < m; ++i) b[i][i] = Poly::monomial(f, nu + (mi + ni) * t);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      const Laurent& x = a[i][j];
      if (x.floor() && *x.floor() > -nu) {
        throw PrecisionError("A carries digits to exponent " + std::to_string(*x.floor()) + ", time " +
                             std::to_string(t) + " needs " + std::to_string(-nu));
      }
      b[m + j][i] = x.truncated(-nu).shifted(nu).polynomial_part().shifted((mi + ni) * t);
    }
    b[m + j][m + j] = Poly::monomial(f, nu);
  }
  return PolyLattice(std::move(b), nu + mi * t);
}

PolyLattice lattice_of(const LaurentMatrix& a, std::int64_t digits) { return DaniLattice(a).at(0, digits); }

// ----------------------------------------------------------------- r(t)

std::int64_t solve_rt(const PsiSpec& psi, std::size_t m, std::size_t n, std::int64_t t) {
  if (t < 0) throw DomainError("r(t) needs t >= 0");
  const auto mi = static_cast<std::int64_t>(m), ni = static_cast<std::int64_t>(n);
  auto ok = [&](std::int64_t r) { return psi.compare(ni * (mi * t - r), -mi * (ni * t + r)) <= 0; };
  if (!ok(0)) {
    throw DomainError("r(t) is undefined at t = " + std::to_string(t) + " for psi " + psi.to_string() +
                      " (below t0)");
  }
  std::int64_t lo = 0, hi = mi * t;  // ok(lo) holds
  if (ok(hi)) return hi;
  while (hi - lo > 1) {
    const std::int64_t mid = lo + (hi - lo) / 2;
    (ok(mid) ? lo : hi) = mid;
  }
  return lo;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Convergent:
      return "convergent";
    case Verdict::Divergent:
      return "divergent";
    case Verdict::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

namespace {

// Dyadic block sums of term(k), k = 1..horizon; partial sums at k = 2^i - 1.
Verdict block_verdict(const std::vector<double>& terms, std::vector<double>& partial) {
  std::vector<double> blocks;
  double total = 0, block = 0;
  std::size_t next = 2;
  for (std::size_t k = 1; k < terms.size(); ++k) {
    block += terms[k];
    total += terms[k];
    if (k + 1 == next) {
      blocks.push_back(block);
      partial.push_back(total);
      block = 0;
      next *= 2;
    }
  }
  if (blocks.size() < 6) return Verdict::Inconclusive;
  const double last = blocks.back(), first = blocks[blocks.size() - 5];
  if (last == 0) return Verdict::Convergent;
  if (first == 0) return Verdict::Divergent;
  const double rho = std::pow(last / first, 0.25);
  if (rho <= 0.85) return Verdict::Convergent;
  if (rho >= 0.97) return Verdict::Divergent;
  return Verdict::Inconclusive;
}

}  // namespace

SeriesReport series_test(const PsiSpec& psi, std::size_t m, std::size_t n, std::int64_t horizon) {
  SeriesReport rep;
  rep.horizon = horizon;
  const double qd = static_cast<double>(m + n);
  std::vector<double> cusp_terms(static_cast<std::size_t>(horizon) + 1, 0.0);
  std::vector<double> psi_terms(static_cast<std::size_t>(horizon) + 1, 0.0);
  // Terms are evaluated with q = 2; the verdict does not depend on q.
  for (std::int64_t k = 1; k <= horizon; ++k) {
    double term = 1.0;
    try {
      term = std::exp2(-qd * static_cast<double>(solve_rt(psi, m, n, k)));
    } catch (const DomainError&) {
      term = 1.0;  // below t0 the cusp condition is vacuous
    }
    cusp_terms[static_cast<std::size_t>(k)] = term;
    psi_terms[static_cast<std::size_t>(k)] = std::exp2(std::min(psi.value(k) + static_cast<double>(k), 1000.0));
  }
  rep.cusp_side = block_verdict(cusp_terms, rep.cusp_partial);
  rep.psi_side = block_verdict(psi_terms, rep.psi_partial);
  if (psi.is_power()) {
    rep.analytic = true;
    const Verdict v = psi.tau() > 1 ? Verdict::Convergent : Verdict::Divergent;
    rep.cusp_side = rep.psi_side = v;
  }
  rep.agree = rep.cusp_side == rep.psi_side && rep.cusp_side != Verdict::Inconclusive;
  return rep;
}

// ----------------------------------------------------------- brute force

namespace {

constexpr std::int64_t kExactZero = std::numeric_limits<std::int64_t>::min();

struct Enumerator {
  const LaurentMatrix& a;
  const PsiSpec& psi;
  std::int64_t D;
  std::size_t m, n;
  int W = 0;

  Enumerator(const LaurentMatrix& a_, const PsiSpec& psi_, std::int64_t D_) : a(a_), psi(psi_), D(D_) {
    if (a.empty() || a[0].empty()) throw DomainError("empty matrix A");
    if (D < 0) throw DomainError("degree bound must be >= 0");
    m = a.size();
    n = a[0].size();
    std::int64_t avail = 64;
    for (const auto& row : a) {
      for (const auto& x : row) {
        if (x.floor()) avail = std::min(avail, -*x.floor() - D);
      }
    }
    if (avail < 1) throw PrecisionError("A lacks the digits to enumerate solutions up to degree " + std::to_string(D));
    W = static_cast<int>(avail);
  }

  bool is_solution(std::int64_t deg, std::int64_t quality) const {
    if (quality == kExactZero) return true;
    return psi.compare(static_cast<std::int64_t>(n) * deg, static_cast<std::int64_t>(m) * quality) > 0;
  }

  // Slow exact path for candidates whose digit window vanishes.
  std::int64_t exact_quality(const std::vector<Poly>& q, std::int64_t deg) const {
    const Field& f = a[0][0].field();
    std::optional<std::int64_t> known, unknown;
    for (std::size_t i = 0; i < m; ++i) {
      Laurent s(f);
      for (std::size_t j = 0; j < n; ++j) s = s + a[i][j] * Laurent::from_poly(q[j]);
      const Laurent fr = s.fractional_part();
      if (fr.is_zero()) continue;
      auto& slot = fr.is_nonzero() ? known : unknown;
      slot = slot ? std::max(*slot, *fr.norm_bound()) : *fr.norm_bound();
    }
    if (known && !is_solution(deg, *known)) return *known;
    if (!unknown) return known ? *known : kExactZero;
    // zero to precision: only an upper bound is known
    const std::int64_t bound = known ? std::max(*known, *unknown) : *unknown;
    if (!is_solution(deg, bound)) {
      throw PrecisionError("cannot certify |Aq + p| against psi at deg q = " + std::to_string(deg));
    }
    return bound;
  }

  std::vector<Poly> q_from_digits(const std::vector<Elem>& digits) const {
    const Field& f = a[0][0].field();
    std::vector<Poly> q;
    const auto per = static_cast<std::size_t>(D + 1);
    for (std::size_t j = 0; j < n; ++j) {
      q.emplace_back(f, std::vector<Elem>(digits.begin() + static_cast<std::ptrdiff_t>(j * per),
                                          digits.begin() + static_cast<std::ptrdiff_t>((j + 1) * per)));
    }
    return q;
  }

  // Calls emit(digits, deg, quality) for every solution.
  template <typename Emit>
  void run(Emit&& emit) const {
    const Field& f = a[0][0].field();
    const std::size_t per = static_cast<std::size_t>(D + 1);
    const std::size_t slots = n * per;
    if (f.order() == 2 && slots <= 62 && W <= 64) {
      run_binary(emit, slots, per);
      return;
    }
    const double space = std::pow(static_cast<double>(f.order()), static_cast<double>(slots));
    if (space > 4e9) throw DomainError("solution search space too large");
    // window[(i * slots + s) * W + k] = digit at exponent -(k+1) of frac(A_ij X^e), s = j*per + e
    std::vector<Elem> window(m * slots * static_cast<std::size_t>(W));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t s = 0; s < slots; ++s) {
        const std::size_t j = s / per;
        const auto e = static_cast<std::int64_t>(s % per);
        for (int k = 0; k < W; ++k) window[(i * slots + s) * W + k] = a[i][j].coeff(-(k + 1) - e);
      }
    }
    std::vector<Elem> digits(slots, 0), acc(m * static_cast<std::size_t>(W), 0);
    const Elem top = static_cast<Elem>(f.order() - 1);
    // acc += (to - from) * window of slot s; digit codes are not additive in F_q
    auto step = [&](std::size_t s, Elem from, Elem to) {
      const Elem diff = f.sub(to, from);
      for (std::size_t i = 0; i < m; ++i) {
        for (int k = 0; k < W; ++k) {
          auto& x = acc[i * W + k];
          x = f.add(x, f.mul(diff, window[(i * slots + s) * W + k]));
        }
      }
    };
    for (;;) {
      std::size_t s = 0;
      while (s < slots && digits[s] == top) {
        step(s, top, 0);
        digits[s++] = 0;
      }
      if (s == slots) break;
      step(s, digits[s], digits[s] + 1);
      ++digits[s];
      std::int64_t deg = -1;
      for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t e = per; e-- > 0;) {
          if (digits[j * per + e] != 0) {
            deg = std::max(deg, static_cast<std::int64_t>(e));
            break;
          }
        }
      }
      std::int64_t quality = kExactZero;
      bool unknown = false;
      for (std::size_t i = 0; i < m; ++i) {
        int k = 0;
        while (k < W && acc[i * W + k] == 0) ++k;
        if (k == W) {
          unknown = true;
          continue;
        }
        quality = quality == kExactZero ? -(k + 1) : std::max<std::int64_t>(quality, -(k + 1));
      }
      // a vanished window hides the digits below it
      if (unknown) quality = exact_quality(q_from_digits(digits), deg);
      if (is_solution(deg, quality)) emit(digits, deg, quality);
    }
  }

  template <typename Emit>
  void run_binary(Emit&& emit, std::size_t slots, std::size_t per) const {
    std::vector<std::uint64_t> win(m * slots, 0);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t s = 0; s < slots; ++s) {
        const std::size_t j = s / per;
        const auto e = static_cast<std::int64_t>(s % per);
        std::uint64_t w = 0;
        for (int k = 0; k < W; ++k) {
          if (a[i][j].coeff(-(k + 1) - e)) w |= std::uint64_t{1} << k;
        }
        win[i * slots + s] = w;
      }
    }
    std::vector<std::uint64_t> acc(m, 0);
    std::uint64_t qbits = 0;
    const std::uint64_t count = std::uint64_t{1} << slots;
    const std::uint64_t block = (per >= 64) ? ~0ULL : ((std::uint64_t{1} << per) - 1);
    std::vector<Elem> digits(slots, 0);
    for (std::uint64_t k = 1; k < count; ++k) {
      const auto s = static_cast<std::size_t>(std::countr_zero(k));
      qbits ^= std::uint64_t{1} << s;
      for (std::size_t i = 0; i < m; ++i) acc[i] ^= win[i * slots + s];
      std::int64_t deg = -1;
      for (std::size_t j = 0; j < n; ++j) {
        const std::uint64_t bj = (qbits >> (j * per)) & block;
        if (bj) deg = std::max<std::int64_t>(deg, 63 - std::countl_zero(bj));
      }
      std::int64_t quality = kExactZero;
      bool unknown = false;
      for (std::size_t i = 0; i < m; ++i) {
        if (acc[i] == 0) {
          unknown = true;
          continue;
        }
        const std::int64_t b = -(std::countr_zero(acc[i]) + 1);
        quality = quality == kExactZero ? b : std::max(quality, b);
      }
      if (unknown) {
        for (std::size_t t = 0; t < slots; ++t) digits[t] = (qbits >> t) & 1;
        quality = exact_quality(q_from_digits(digits), deg);
      } else if (!is_solution(deg, quality)) {
        continue;
      }
      if (is_solution(deg, quality)) {
        for (std::size_t t = 0; t < slots; ++t) digits[t] = (qbits >> t) & 1;
        emit(digits, deg, quality);
      }
    }
  }
};

}  // namespace

std::vector<Solution> brute_force_solutions(const LaurentMatrix& a, const PsiSpec& psi, std::int64_t D) {
  const Enumerator en(a, psi, D);
  std::vector<std::pair<std::vector<Elem>, Solution>> found;
  en.run([&](const std::vector<Elem>& digits, std::int64_t deg, std::int64_t quality) {
    Solution s;
    s.q = en.q_from_digits(digits);
    s.deg_q = deg;
    s.quality = quality;
    const Field& f = a[0][0].field();
    for (std::size_t i = 0; i < en.m; ++i) {
      Laurent acc(f);
      for (std::size_t j = 0; j < en.n; ++j) acc = acc + a[i][j] * Laurent::from_poly(s.q[j]);
      s.p.push_back(-acc.polynomial_part());
    }
    std::vector<Elem> key(digits.rbegin(), digits.rend());
    found.emplace_back(std::move(key), std::move(s));
  });
  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) {
    if (x.second.deg_q != y.second.deg_q) return x.second.deg_q < y.second.deg_q;
    return x.first < y.first;
  });
  std::vector<Solution> out;
  for (auto& [k, s] : found) out.push_back(std::move(s));
  return out;
}

std::vector<SolutionStat> solution_stats(const LaurentMatrix& a, const PsiSpec& psi, std::int64_t D) {
  const Enumerator en(a, psi, D);
  std::vector<SolutionStat> out;
  en.run([&](const std::vector<Elem>&, std::int64_t deg, std::int64_t quality) { out.push_back({deg, quality}); });
  std::sort(out.begin(), out.end(), [](const SolutionStat& x, const SolutionStat& y) {
    return x.deg_q != y.deg_q ? x.deg_q < y.deg_q : x.quality < y.quality;
  });
  return out;
}

// -------------------------------------------------------------- dynamics

ExcursionTrace dynamical_test(const LaurentMatrix& a, const PsiSpec& psi, std::int64_t t_lo, std::int64_t t_hi) {
  const DaniLattice dl(a);
  ExcursionTrace trace;
  for (std::int64_t t = t_lo; t <= t_hi; ++t) {
    TraceRecord rec;
    rec.t = t;
    rec.r = solve_rt(psi, dl.m, dl.n, t);
    rec.delta_exp = -dl.at(t).delta().exponent();
    rec.hit = rec.delta_exp >= rec.r;
    trace.push_back(rec);
  }
  return trace;
}

std::string trace_csv(const ExcursionTrace& trace) {
  std::ostringstream os;
  os << "t,r_t,delta_exp,hit\n";
  for (const auto& r : trace) os << r.t << ',' << r.r << ',' << r.delta_exp << ',' << (r.hit ? 1 : 0) << '\n';
  return os.str();
}

CorrespondenceReport correspondence_check(const LaurentMatrix& a, const PsiSpec& psi, std::int64_t D) {
  const DaniLattice dl(a);
  const auto mi = static_cast<std::int64_t>(dl.m), ni = static_cast<std::int64_t>(dl.n);
  CorrespondenceReport rep;
  const auto sols = solution_stats(a, psi, D);
  rep.solutions = sols.size();

  // t(a) = min{t : mt - r(t) >= a}; tabulate r over the needed range.
  std::int64_t t_max = 0;
  std::vector<std::int64_t> r_of;
  auto r_at = [&](std::int64_t t) -> std::int64_t {
    while (static_cast<std::int64_t>(r_of.size()) <= t) {
      r_of.push_back(solve_rt(psi, dl.m, dl.n, static_cast<std::int64_t>(r_of.size())));
    }
    return r_of[static_cast<std::size_t>(t)];
  };
  std::int64_t t_start = 0;
  for (;; ++t_start) {
    try {
      solve_rt(psi, dl.m, dl.n, t_start);
      break;
    } catch (const DomainError&) {
      if (t_start > 4 * D + 16) throw;
    }
  }
  for (std::int64_t t = t_start; mi * t - r_at(t) <= D + 1; ++t) t_max = t;
  t_max += 1;

  ExcursionTrace trace = dynamical_test(a, psi, t_start, t_max);
  auto rec_at = [&](std::int64_t t) -> const TraceRecord& { return trace[static_cast<std::size_t>(t - t_start)]; };
  for (const auto& r : trace) rep.hits += r.hit;

  // solution => hit
  for (const auto& s : sols) {
    std::int64_t t = t_start;
    while (t <= t_max && mi * t - rec_at(t).r < s.deg_q) ++t;
    if (t > t_max) continue;
    const auto& rec = rec_at(t);
    if (mi * t - rec.r == s.deg_q) {
      ++rep.checked;
      if (!rec.hit) {
        ++rep.violations;
        rep.notes.push_back("solution deg " + std::to_string(s.deg_q) + " without hit at t=" + std::to_string(t));
      }
    } else if (!rec.hit) {
      ++rep.band;
    }
  }
  // strict hit => solution
  for (const auto& rec : trace) {
    if (!rec.hit) continue;
    const std::int64_t deg_bound = mi * rec.t - rec.r - 1;
    if (rec.delta_exp == rec.r) {
      ++rep.band;
      continue;
    }
    if (deg_bound > D || deg_bound < 0) continue;
    ++rep.checked;
    const std::int64_t b_bound = -(ni * rec.t + rec.r + 1);
    const bool found = std::any_of(sols.begin(), sols.end(), [&](const SolutionStat& s) {
      return s.deg_q <= deg_bound && (s.quality == kExactZero || s.quality <= b_bound);
    });
    if (!found) {
      ++rep.violations;
      rep.notes.push_back("hit at t=" + std::to_string(rec.t) + " (delta_exp " + std::to_string(rec.delta_exp) +
                          ", r " + std::to_string(rec.r) + ") without a solution");
    }
  }
  return rep;
}

// ----------------------------------------------------------- experiment

LaurentMatrix random_matrix(const Field& f, std::size_t m, std::size_t n, std::int64_t digits, std::uint64_t seed) {
  Rng rng(seed);
  LaurentMatrix a(m, std::vector<Laurent>(n, Laurent(f)));
  for (auto& row : a) {
    for (auto& x : row) {
      std::vector<Elem> c(static_cast<std::size_t>(digits));
      for (auto& v : c) v = rng.elem(f);
      x = Laurent::from_coeffs(f, -digits, std::move(c), -digits);
    }
  }
  return a;
}

KgReport kg_experiment(const KgConfig& cfg) {
  if (cfg.samples == 0) throw DomainError("kg needs samples >= 1");
  if (cfg.D < 2) throw DomainError("kg needs D >= 2");
  const Field& f = Field::get(cfg.q);
  KgReport rep;
  rep.config = cfg;
  rep.series = series_test(cfg.psi, cfg.m, cfg.n);
  const auto mn = static_cast<std::int64_t>(cfg.m + cfg.n);
  const std::int64_t digits = cfg.D + 64 + mn * cfg.D;

  struct Sample {
    std::int64_t max_deg = -1;
    bool top = false;
    std::size_t hits = 0;
  };
  std::vector<Sample> out(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](std::size_t i) {
    const LaurentMatrix a = random_matrix(f, cfg.m, cfg.n, digits, derive_seed(cfg.seed, i));
    Sample s;
    for (const auto& sol : solution_stats(a, cfg.psi, cfg.D)) {
      s.max_deg = std::max(s.max_deg, sol.deg_q);
      if (2 * sol.deg_q > cfg.D) s.top = true;
    }
    const DaniLattice dl(a);
    for (std::int64_t t = 1; t <= cfg.D; ++t) {
      std::int64_t r = 0;
      try {
        r = solve_rt(cfg.psi, cfg.m, cfg.n, t);
      } catch (const DomainError&) {
        continue;
      }
      if (-dl.at(t).delta().exponent() >= r) ++s.hits;
    }
    out[i] = s;
  });

  rep.beyond.assign(static_cast<std::size_t>(cfg.D), 0);
  std::size_t top = 0, hits = 0;
  for (const auto& s : out) {
    top += s.top;
    hits += s.hits;
    for (std::int64_t d0 = 0; d0 < cfg.D; ++d0) {
      if (s.max_deg > d0) ++rep.beyond[static_cast<std::size_t>(d0)];
    }
  }
  const auto ns = static_cast<double>(cfg.samples);
  rep.top_window_fraction = static_cast<double>(top) / ns;
  rep.mean_hits = static_cast<double>(hits) / ns;
  std::vector<double> xs, ys;
  for (std::size_t d0 = 0; d0 < rep.beyond.size(); ++d0) {
    if (rep.beyond[d0] >= 10) {
      xs.push_back(static_cast<double>(d0));
      ys.push_back(std::log(static_cast<double>(rep.beyond[d0])));
    }
  }
  rep.decay_points = xs.size();
  if (xs.size() >= 2) rep.decay_factor = std::exp(-stats::least_squares(xs, ys).slope);
  return rep;
}

std::string KgReport::text() const {
  std::ostringstream os;
  os.precision(6);
  os << "psi: " << config.psi.to_string() << '\n';
  os << "m: " << config.m << "\nn: " << config.n << "\nq: " << config.q << '\n';
  os << "samples: " << config.samples << "\nD: " << config.D << '\n';
  os << "series cusp side: " << to_string(series.cusp_side) << '\n';
  os << "series psi side: " << to_string(series.psi_side) << '\n';
  os << "series agree: " << (series.agree ? "yes" : "no") << (series.analytic ? " (closed form)" : " (dyadic blocks)")
     << '\n';
  const double ns = static_cast<double>(config.samples);
  auto wilson = [&](double p) {
    const double z = 2.5758, den = 1 + z * z / ns;
    const double centre = (p + z * z / (2 * ns)) / den;
    const double half = z * std::sqrt(p * (1 - p) / ns + z * z / (4 * ns * ns)) / den;
    std::ostringstream s;
    s.precision(4);
    s << "[" << std::max(0.0, centre - half) << ", " << std::min(1.0, centre + half) << "]";
    return s.str();
  };
  os << "fraction with a solution in (D/2, D]: " << top_window_fraction << " 99% CI " << wilson(top_window_fraction)
     << '\n';
  const double b8 = beyond.size() > 8 ? static_cast<double>(beyond[8]) / ns : 0.0;
  os << "fraction with a solution beyond D0=8: " << b8 << " 99% CI " << wilson(b8) << '\n';
  os << "decay factor per unit D0: " << decay_factor << " (" << decay_points << " points with count >= 10)\n";
  os << "mean hits for 1 <= t <= D: " << mean_hits << '\n';
  return os.str();
}

std::string KgReport::beyond_csv() const {
  std::ostringstream os;
  os << "D0,count,fraction\n";
  for (std::size_t d0 = 0; d0 < beyond.size(); ++d0) {
    os << d0 << ',' << beyond[d0] << ',' << static_cast<double>(beyond[d0]) / static_cast<double>(config.samples)
       << '\n';
  }
  return os.str();
}

std::vector<double> flow_delta_samples(std::uint32_t q, std::size_t m, std::size_t n, std::int64_t t, std::size_t count,
                                       std::uint64_t seed, int workers) {
  const Field& f = Field::get(q);
  const std::int64_t digits = static_cast<std::int64_t>(m + n) * t + 4;
  std::vector<double> out(count);
  parallel_for(count, workers, [&](std::size_t j) {
    const DaniLattice dl(random_matrix(f, m, n, digits, derive_seed(seed, j)));
    out[j] = static_cast<double>(-dl.at(t).delta().exponent());
  });
  return out;
}

}  // namespace ulab
