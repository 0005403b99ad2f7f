#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "ulab/laurent.hpp"
#include "ulab/polylattice.hpp"

namespace ulab {

using Rational = boost::rational<std::int64_t>;

/// One cusp excursion of the geodesic in direction alpha: excursion n climbs
/// to depth deg a_n, peaking at entry_time = deg q_{n-1} + deg q_n (tree
/// length units).
struct Excursion {
  std::size_t n = 0;
  std::int64_t entry_time = 0;
  std::int64_t depth = 0;
  friend bool operator==(const Excursion&, const Excursion&) = default;
};

struct GeodesicCode {
  std::vector<Excursion> excursions;
  bool rational = false;   // the expansion terminates; excluded from statistics
  bool truncated = false;  // precision ran out before the horizon
};

/// Excursions with entry_time <= horizon, read off the continued fraction of
/// the fractional part of alpha.
GeodesicCode geodesic_code(const Laurent& alpha, std::int64_t horizon);

/// D(s) = s - 2 log_q lambda_1(diag(X^s, 1) Lambda_alpha) for s = 0..s_max,
/// i.e. twice -log_q delta of the unimodular rescaling.  Needs 2 s_max + 2
/// digits of alpha.
std::vector<std::int64_t> flow_profile(const Laurent& alpha, std::int64_t s_max);
/// Strict local maxima (s, D(s)) of the profile with 0 < s < s_max.
std::vector<Excursion> flow_excursions(const Laurent& alpha, std::int64_t s_max);

/// max over n in (N/2, N] of depth_n / log_q(entry_time_n).
double loglaw_statistic(const std::vector<Excursion>& code, std::uint32_t q);

struct LoglawReport {
  std::uint32_t q = 2;
  std::size_t horizon = 0;
  std::vector<double> statistics;  // per sample
  double median = 0;
  std::size_t rational_excluded = 0;
  struct Row {
    std::size_t sample, n;
    std::int64_t depth, entry_time;
    double running_sup;  // max of the ratio over (n/2, n]
  };
  std::vector<Row> rows;  // n = 2^k and n = N, first `trace_samples` samples
  /// Rows "sample,n,depth,entry_time,running_sup".
  std::string csv() const;
};

/// Log-law statistic on excursion streams with the exact law of a
/// Haar-random direction: the partial quotient degrees are independent with
/// P(d) = (q-1) q^-d, and entry times follow from the running degree sums.
LoglawReport loglaw_limsup(std::size_t sample_count, std::size_t horizon, std::uint32_t q, std::uint64_t seed,
                           int workers = 1, std::size_t trace_samples = 4);
/// Same statistic on independent geometric depths at unit spacing.
LoglawReport loglaw_geometric(std::size_t sample_count, std::size_t horizon, std::uint32_t q, std::uint64_t seed,
                              int workers = 1);
/// Excursion stream of the CF law (first `count` excursions).
std::vector<Excursion> cf_law_stream(std::uint32_t q, std::size_t count, std::uint64_t seed);

/// Quotient ray of the Bruhat-Tits tree by GL_2(F_q[X]).
struct RayModel {
  std::uint32_t q = 2;
  std::int64_t depth = 0;             // L
  std::vector<Rational> raw;          // w_0 = 1, w_{l+1} = w_l up[l] / down[l+1]
  std::vector<Rational> weights;      // normalized, with the tail beyond L
  Rational tail;                      // normalized mass beyond L
  std::vector<std::int64_t> up;       // neighbours one level deeper
  std::vector<std::int64_t> down;     // neighbours one level shallower
  std::size_t vertices_visited = 0;
  /// Normalized mass of depths >= T (T <= L + 1).
  Rational tail_mass(std::int64_t T) const;
  /// min / max of tail_mass(T) q^T over T in [2, L].
  double c1() const;
  double c2() const;
  /// Rows "l,num,den" of the normalized weights.
  std::string csv() const;
};

/// Vertices are homothety classes of O-lattices spanned by (1, u), (0, pi^b)
/// with u in K / pi^b O; the orbit of a vertex is its depth lambda_2 -
/// lambda_1, read from the polynomial lattice of the inverse basis.  The BFS
/// keeps a few representatives per depth and requires their neighbour depth
/// counts to agree.  Throws DomainError for L > 40.
RayModel ray_measure(std::uint32_t q, std::int64_t L);

/// Depth of the vertex (b, u) with u = sum_e coeffs[e] pi^(low + e).
std::int64_t vertex_depth(const Field& f, std::int64_t b, std::int64_t low, const std::vector<Elem>& coeffs);

struct HaarSample {
  std::int64_t level = 0;          // sampled ray depth
  std::int64_t lambda1 = 0;        // successive minima of diag(1, X^l) k
  std::int64_t lambda2 = 0;
  double delta() const { return 0.5 * static_cast<double>(lambda2 - lambda1); }
  /// Nonzero vectors of norm <= q^B after rescaling to covolume 1.
  std::uint64_t ball_count(std::uint32_t q, std::int64_t B) const;
};

struct HaarBatch {
  std::vector<HaarSample> samples;
  double truncated_mass = 0;  // ray mass beyond the depth cap
};

/// Depth l from the ray weights (capped), then the lattice diag(1, X^l) k for
/// k uniform in GL_2(O) at 8 digits.
HaarBatch haar_sample_d2(const RayModel& ray, std::size_t count, std::int64_t depth_cap, std::uint64_t seed,
                         int workers = 1);

struct SiegelPoint {
  std::int64_t B = 0;
  double lhs = 0;        // Haar volume of the ball of radius q^B
  double rhs = 0;        // mean lattice count
  double rhs_se = 0;
  double ratio = 0;      // rhs / lhs, the empirical C(2)
  double ratio_lo = 0, ratio_hi = 0;  // 99% interval
};
struct SiegelReport {
  std::vector<SiegelPoint> points;
  double spread = 0;  // max ratio / min ratio - 1
};
SiegelReport siegel_check_d2(std::uint32_t q, const std::vector<std::int64_t>& radii, std::size_t count,
                             std::uint64_t seed, int workers = 1);

}  // namespace ulab
