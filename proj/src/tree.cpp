#include "ulab/tree.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "ulab/cfrac.hpp"
#include "ulab/dani.hpp"
#include "ulab/errors.hpp"
#include "ulab/random.hpp"
#include "ulab/stats.hpp"

namespace ulab {

// -------------------------------------------------------------- coding

GeodesicCode geodesic_code(const Laurent& alpha, std::int64_t horizon) {
  GeodesicCode code;
  const Laurent frac = alpha.fractional_part();
  // entry times grow at least by one per excursion
  const CFExpansion cf = cf_expand(frac, static_cast<std::size_t>(std::max<std::int64_t>(horizon, 0)) + 2);
  for (std::size_t n = 1; n < cf.size(); ++n) {
    const std::int64_t entry = cf.deg_q(n - 1) + cf.deg_q(n);
    if (entry > horizon) return code;
    code.excursions.push_back({n, entry, cf.quotients[n].deg()});
  }
  if (cf.stop == CfStop::Complete) code.rational = true;
  else code.truncated = true;
  return code;
}

std::vector<std::int64_t> flow_profile(const Laurent& alpha, std::int64_t s_max) {
  if (s_max < 0) throw DomainError("s_max must be >= 0");
  const PolyLattice base = lattice_of({{alpha.fractional_part()}}, 2 * s_max + 2);
  std::vector<std::int64_t> d;
  for (std::int64_t s = 0; s <= s_max; ++s) {
    const auto l1 = scale_coordinates(base, {s, 0}).successive_minima()[0].exponent();
    d.push_back(s - 2 * l1);
  }
  return d;
}

std::vector<Excursion> flow_excursions(const Laurent& alpha, std::int64_t s_max) {
  const auto d = flow_profile(alpha, s_max);
  std::vector<Excursion> out;
  for (std::int64_t s = 1; s < s_max; ++s) {
    const auto i = static_cast<std::size_t>(s);
    if (d[i] > d[i - 1] && d[i] > d[i + 1]) out.push_back({out.size() + 1, s, d[i]});
  }
  return out;
}

// -------------------------------------------------------------- log law

double loglaw_statistic(const std::vector<Excursion>& code, std::uint32_t q) {
  const double lq = std::log(static_cast<double>(q));
  double best = 0;
  for (std::size_t k = code.size() / 2; k < code.size(); ++k) {
    if (code[k].entry_time > 1) {
      best = std::max(best, static_cast<double>(code[k].depth) * lq / std::log(static_cast<double>(code[k].entry_time)));
    }
  }
  return best;
}

namespace {

// P(d) = (q-1) q^-d, d >= 1.
std::int64_t geometric_depth(Rng& rng, std::uint32_t q) {
  if (q == 2) {
    std::uint64_t x;
    std::int64_t d = 1;
    while ((x = rng.next()) == 0) d += 64;
    return d + std::countr_zero(x);
  }
  std::int64_t d = 1;
  while (rng.below(q) == 0) ++d;
  return d;
}

template <typename Next>
LoglawReport run_loglaw(std::size_t sample_count, std::size_t horizon, std::uint32_t q, int workers,
                        std::size_t trace_samples, Next&& next) {
  if (horizon < 2) throw DomainError("log-law horizon must be >= 2");
  Field::get(q);
  LoglawReport rep;
  rep.q = q;
  rep.horizon = horizon;
  rep.statistics.assign(sample_count, 0);
  std::vector<std::vector<LoglawReport::Row>> rows(sample_count);
  const double lq = std::log(static_cast<double>(q));
  parallel_for(sample_count, workers, [&](std::size_t j) {
    auto source = next(j);
    double block = 0, window = 0;
    std::size_t next_grid = 1;
    for (std::size_t n = 1; n <= horizon; ++n) {
      const Excursion e = source(n);
      const double ratio = e.entry_time > 1 ? static_cast<double>(e.depth) * lq /
                                                  std::log(static_cast<double>(e.entry_time))
                                            : 0.0;
      block = std::max(block, ratio);
      if (2 * n > horizon) window = std::max(window, ratio);
      if (j < trace_samples && (n == next_grid || n == horizon)) {
        rows[j].push_back({j, n, e.depth, e.entry_time, n == horizon ? window : block});
      }
      if (n == next_grid) {
        next_grid *= 2;
        block = 0;
      }
    }
    rep.statistics[j] = window;
  });
  for (auto& r : rows) rep.rows.insert(rep.rows.end(), r.begin(), r.end());
  rep.median = sample_count ? stats::median(rep.statistics) : 0.0;
  return rep;
}

}  // namespace

std::vector<Excursion> cf_law_stream(std::uint32_t q, std::size_t count, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Excursion> out;
  std::int64_t deg_q = 0;
  for (std::size_t n = 1; n <= count; ++n) {
    const std::int64_t d = geometric_depth(rng, q);
    out.push_back({n, 2 * deg_q + d, d});
    deg_q += d;
  }
  return out;
}

LoglawReport loglaw_limsup(std::size_t sample_count, std::size_t horizon, std::uint32_t q, std::uint64_t seed,
                           int workers, std::size_t trace_samples) {
  return run_loglaw(sample_count, horizon, q, workers, trace_samples, [&](std::size_t j) {
    return [rng = Rng(derive_seed(seed, j)), deg_q = std::int64_t{0}, q](std::size_t n) mutable {
      const std::int64_t d = geometric_depth(rng, q);
      const Excursion e{n, 2 * deg_q + d, d};
      deg_q += d;
      return e;
    };
  });
}

LoglawReport loglaw_geometric(std::size_t sample_count, std::size_t horizon, std::uint32_t q, std::uint64_t seed,
                              int workers) {
  return run_loglaw(sample_count, horizon, q, workers, 0, [&](std::size_t j) {
    return [rng = Rng(derive_seed(seed, j)), q](std::size_t n) mutable {
      return Excursion{n, static_cast<std::int64_t>(n), geometric_depth(rng, q)};
    };
  });
}

std::string LoglawReport::csv() const {
  std::ostringstream os;
  os.precision(10);
  os << "sample,n,depth,entry_time,running_sup\n";
  for (const auto& r : rows) os << r.sample << ',' << r.n << ',' << r.depth << ',' << r.entry_time << ',' << r.running_sup << '\n';
  return os.str();
}

// ---------------------------------------------------------------- ray

namespace {

// Vertex (b, u): the class of the O-lattice spanned by (1, u), (0, pi^b),
// u = sum_e u[e] pi^e over e < b.
struct Vertex {
  std::int64_t b = 0;
  std::map<std::int64_t, Elem> u;
  bool operator<(const Vertex& o) const { return b != o.b ? b < o.b : u < o.u; }
};

std::int64_t depth_of(const Field& f, const Vertex& v) {
  // inverse basis (1, -u X^b; 0, X^b), scaled by X^c to be polynomial
  const std::int64_t c = std::max<std::int64_t>(0, -v.b);
  std::int64_t top = v.b + c;
  for (const auto& [e, x] : v.u) top = std::max(top, v.b - e + c);
  std::vector<Elem> cu(static_cast<std::size_t>(top) + 1, 0);
  for (const auto& [e, x] : v.u) cu[static_cast<std::size_t>(v.b - e + c)] = f.sub(0, x);
  PolyMatrix m{{Poly::monomial(f, c), Poly(f, cu)}, {Poly(f), Poly::monomial(f, v.b + c)}};
  const auto mins = PolyLattice(std::move(m), 0).successive_minima();
  return mins[1].exponent() - mins[0].exponent();
}

std::vector<Vertex> neighbours(const Field& f, const Vertex& v) {
  std::vector<Vertex> out;
  for (Elem c = 0; c < f.order(); ++c) {
    Vertex w = v;
    w.b = v.b + 1;
    if (c) w.u[v.b] = c;
    out.push_back(std::move(w));
  }
  Vertex p = v;
  p.b = v.b - 1;
  p.u.erase(v.b - 1);
  out.push_back(std::move(p));
  return out;
}

}  // namespace

std::int64_t vertex_depth(const Field& f, std::int64_t b, std::int64_t low, const std::vector<Elem>& coeffs) {
  Vertex v;
  v.b = b;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::int64_t e = low + static_cast<std::int64_t>(i);
    if (coeffs[i] == 0) continue;
    if (e >= b) throw DomainError("u must only carry exponents below b");
    v.u[e] = coeffs[i];
  }
  return depth_of(f, v);
}

RayModel ray_measure(std::uint32_t q, std::int64_t L) {
  if (L < 0 || L > 40) throw DomainError("ray depth must lie in [0, 40]");
  if (static_cast<double>(L + 3) * std::log2(static_cast<double>(q)) + 2 * std::log2(q + 1.0) > 60) {
    throw DomainError("ray depth too large for exact 64-bit rationals at this q");
  }
  const Field& f = Field::get(q);
  constexpr std::size_t kReps = 6;
  RayModel ray;
  ray.q = q;
  ray.depth = L;
  const auto levels = static_cast<std::size_t>(L) + 2;
  std::vector<std::size_t> reps(levels, 0);
  std::vector<std::array<std::int64_t, 3>> tally(levels, {-1, -1, -1});  // down, same, up
  std::set<Vertex> seen;
  std::vector<std::pair<Vertex, std::int64_t>> queue{{Vertex{}, 0}};
  seen.insert(Vertex{});
  reps[0] = 1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const auto [v, l] = queue[head];
    std::array<std::int64_t, 3> t{0, 0, 0};
    for (auto& w : neighbours(f, v)) {
      const std::int64_t lw = depth_of(f, w);
      if (std::abs(lw - l) > 1) throw std::logic_error("tree neighbours differ in depth by more than one");
      ++t[static_cast<std::size_t>(lw - l + 1)];
      const auto lu = static_cast<std::size_t>(lw);
      if (lu < levels && reps[lu] < kReps && !seen.count(w)) {
        seen.insert(w);
        ++reps[lu];
        queue.emplace_back(std::move(w), lw);
      }
    }
    auto& known = tally[static_cast<std::size_t>(l)];
    if (known[0] < 0) known = t;
    else if (known != t) throw std::logic_error("neighbour counts differ inside one orbit");
  }
  ray.vertices_visited = queue.size();
  for (std::size_t l = 0; l < levels; ++l) {
    if (tally[l][0] < 0) throw std::logic_error("depth " + std::to_string(l) + " never reached");
    ray.down.push_back(tally[l][0]);
    ray.up.push_back(tally[l][2]);
  }
  ray.raw.push_back(Rational(1));
  for (std::int64_t l = 0; l <= L; ++l) {
    const auto i = static_cast<std::size_t>(l);
    ray.raw.push_back(ray.raw[i] * Rational(ray.up[i], ray.down[i + 1]));
  }
  // raw has L + 2 entries; the last one seeds the geometric tail
  const Rational next = ray.raw.back();
  ray.raw.pop_back();
  Rational tail_raw(0);
  if (L >= 1) {
    const Rational rho = next / ray.raw.back();
    tail_raw = next / (Rational(1) - rho);
  }
  Rational total = tail_raw;
  for (const auto& w : ray.raw) total += w;
  for (const auto& w : ray.raw) ray.weights.push_back(w / total);
  ray.tail = tail_raw / total;
  return ray;
}

Rational RayModel::tail_mass(std::int64_t T) const {
  if (T < 0 || T > depth + 1) throw DomainError("tail mass needs 0 <= T <= L + 1");
  Rational s = tail;
  for (std::int64_t l = T; l <= depth; ++l) s += weights[static_cast<std::size_t>(l)];
  return s;
}

double RayModel::c1() const {
  double c = std::numeric_limits<double>::infinity();
  for (std::int64_t T = 2; T <= depth; ++T) c = std::min(c, boost::rational_cast<double>(tail_mass(T)) * std::pow(q, T));
  return c;
}

double RayModel::c2() const {
  double c = 0;
  for (std::int64_t T = 2; T <= depth; ++T) c = std::max(c, boost::rational_cast<double>(tail_mass(T)) * std::pow(q, T));
  return c;
}

std::string RayModel::csv() const {
  std::ostringstream os;
  os << "l,num,den\n";
  for (std::size_t l = 0; l < weights.size(); ++l) os << l << ',' << weights[l].numerator() << ',' << weights[l].denominator() << '\n';
  return os.str();
}

// ------------------------------------------------------- Haar sampling

std::uint64_t HaarSample::ball_count(std::uint32_t q, std::int64_t B) const {
  // minima after rescaling are lambda_i + s with s = -(lambda1 + lambda2) / 2
  auto digits = [&](std::int64_t lam) -> std::int64_t {
    const std::int64_t twice = 2 * B - 2 * lam + lambda1 + lambda2;  // 2 (B - lambda_i - s)
    const std::int64_t fl = twice >= 0 ? twice / 2 : -((-twice + 1) / 2);
    return std::max<std::int64_t>(0, fl + 1);
  };
  const std::int64_t e = digits(lambda1) + digits(lambda2);
  if (static_cast<double>(e) * std::log2(static_cast<double>(q)) >= 63) throw DomainError("ball count overflows");
  std::uint64_t v = 1;
  for (std::int64_t i = 0; i < e; ++i) v *= q;
  return v - 1;
}

HaarBatch haar_sample_d2(const RayModel& ray, std::size_t count, std::int64_t depth_cap, std::uint64_t seed,
                         int workers) {
  if (depth_cap < 0 || depth_cap > ray.depth) throw DomainError("depth cap must lie in [0, L]");
  const Field& f = Field::get(ray.q);
  std::vector<double> cdf;
  double acc = 0;
  for (std::int64_t l = 0; l <= depth_cap; ++l) {
    acc += boost::rational_cast<double>(ray.weights[static_cast<std::size_t>(l)]);
    cdf.push_back(acc);
  }
  HaarBatch batch;
  batch.truncated_mass = 1 - acc;
  batch.samples.resize(count);
  constexpr std::int64_t P = 8;
  parallel_for(count, workers, [&](std::size_t j) {
    Rng rng(derive_seed(seed, j));
    const double u = rng.uniform() * acc;
    const auto l = static_cast<std::int64_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const std::int64_t level = std::min(l, depth_cap);
    // k in GL_2(O) at P digits: entries sum_{i<P} c_i pi^i, unit determinant
    std::array<std::array<std::vector<Elem>, 2>, 2> k;
    for (;;) {
      for (auto& row : k) {
        for (auto& e : row) {
          e.assign(static_cast<std::size_t>(P), 0);
          for (auto& c : e) c = rng.elem(f);
        }
      }
      if (f.sub(f.mul(k[0][0][0], k[1][1][0]), f.mul(k[0][1][0], k[1][0][0])) != 0) break;
    }
    // X^(P-1) diag(1, X^l) k
    PolyMatrix m(2, PolyRow(2, Poly(f)));
    for (std::size_t r = 0; r < 2; ++r) {
      for (std::size_t c = 0; c < 2; ++c) {
        std::vector<Elem> rev(k[r][c].rbegin(), k[r][c].rend());
        m[r][c] = Poly(f, rev).shifted(r == 1 ? level : 0);
      }
    }
    const auto mins = PolyLattice(std::move(m), P - 1).successive_minima();
    HaarSample s;
    s.level = level;
    s.lambda1 = mins[0].exponent();
    s.lambda2 = mins[1].exponent();
    batch.samples[j] = s;
  });
  return batch;
}

SiegelReport siegel_check_d2(std::uint32_t q, const std::vector<std::int64_t>& radii, std::size_t count,
                             std::uint64_t seed, int workers) {
  if (count < 100) throw DomainError("Siegel check needs at least 100 samples");
  const auto cap = static_cast<std::int64_t>(std::min(30.0, std::floor(54 / std::log2(static_cast<double>(q)))) - 3);
  const RayModel ray = ray_measure(q, cap);
  const HaarBatch batch = haar_sample_d2(ray, count, cap, seed, workers);
  SiegelReport rep;
  double lo_ratio = std::numeric_limits<double>::infinity(), hi_ratio = 0;
  for (std::int64_t B : radii) {
    SiegelPoint p;
    p.B = B;
    p.lhs = std::pow(static_cast<double>(q), 2.0 * static_cast<double>(B));
    double sum = 0, sq = 0;
    for (const auto& s : batch.samples) {
      const auto c = static_cast<double>(s.ball_count(q, B));
      sum += c;
      sq += c * c;
    }
    const auto n = static_cast<double>(count);
    p.rhs = sum / n;
    p.rhs_se = std::sqrt(std::max(0.0, sq / n - p.rhs * p.rhs) / n);
    p.ratio = p.rhs / p.lhs;
    p.ratio_lo = (p.rhs - 2.5758 * p.rhs_se) / p.lhs;
    p.ratio_hi = (p.rhs + 2.5758 * p.rhs_se) / p.lhs;
    lo_ratio = std::min(lo_ratio, p.ratio);
    hi_ratio = std::max(hi_ratio, p.ratio);
    rep.points.push_back(p);
  }
  rep.spread = rep.points.empty() ? 0 : hi_ratio / lo_ratio - 1;
  return rep;
}

}  // namespace ulab
