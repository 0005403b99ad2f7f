#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ulab/cartan.hpp"
#include "ulab/laurent.hpp"
#include "ulab/polylattice.hpp"

namespace ulab {

/// A non-increasing approximation function psi, held in log coordinates:
/// value(j) = log_q psi(q^j).
///
///   power:tau          psi(x) = x^-tau             (tau = a or a/b, exact)
///   power-log:tau:c    value(j) = -tau j - c ln j     (j clamped to >= 1)
///   table:v0,v1,...    value(j) = v_j, extended linearly past the end
///
/// Any kind may carry a suffix "+k" or "-k" (integer) that multiplies psi by
/// q^k.
class PsiSpec {
 public:
  enum class Kind { Power, PowerLog, Table };

  static PsiSpec power(std::int64_t num, std::int64_t den = 1, std::int64_t offset = 0);
  static PsiSpec power_log(double tau, double c, std::int64_t offset = 0);
  static PsiSpec table(std::vector<double> values, std::int64_t offset = 0);
  static PsiSpec parse(std::string_view text);

  Kind kind() const { return kind_; }
  std::string to_string() const;
  /// Same function times q^k.
  PsiSpec scaled(std::int64_t k) const;

  double value(std::int64_t j) const;
  /// Sign of value(j) - y, exact for the power kind.
  int compare(std::int64_t j, std::int64_t y) const;
  /// Closed-form exponent tau when psi is a pure power.
  bool is_power() const { return kind_ == Kind::Power; }
  double tau() const;
  double log_exponent() const { return c_; }

 private:
  Kind kind_ = Kind::Power;
  std::int64_t num_ = 1, den_ = 1;
  double tau_ = 1, c_ = 0;
  std::vector<double> table_;
  std::int64_t offset_ = 0;
};

/// Lambda_A = {(p + A q, q)} for an m x n matrix A of Laurent series.
struct DaniLattice {
  LaurentMatrix a;
  std::size_t m = 0;
  std::size_t n = 0;

  explicit DaniLattice(LaurentMatrix a);

  /// Digits of A below exponent 0 needed to get g_t Lambda_A exactly.
  std::int64_t digits_needed(std::int64_t t) const { return static_cast<std::int64_t>(m + n) * t; }

  /// g_t Lambda_A as a polynomial lattice.  A is truncated to
  /// digits_needed(t) + extra digits; this does not change the norm of any
  /// vector of norm <= 1, so delta and every minimum <= 1 are exact.
  /// Throws PrecisionError if A does not carry enough digits.
  PolyLattice at(std::int64_t t, std::int64_t extra = 0) const;
};

/// Lambda_A with A truncated to `digits` digits below exponent 0.
PolyLattice lattice_of(const LaurentMatrix& a, std::int64_t digits = 0);

/// Largest integer r in [0, mt] with value(n(mt - r)) <= -m(nt + r).
/// Throws DomainError when even r = 0 fails (t below t0).
std::int64_t solve_rt(const PsiSpec& psi, std::size_t m, std::size_t n, std::int64_t t);

enum class Verdict { Convergent, Divergent, Inconclusive };
std::string to_string(Verdict v);

struct SeriesReport {
  Verdict cusp_side = Verdict::Inconclusive;  // sum_t q^-(m+n) r(t)
  Verdict psi_side = Verdict::Inconclusive;   // sum_j psi(q^j) q^j
  bool agree = false;
  bool analytic = false;
  std::int64_t horizon = 0;
  std::vector<double> cusp_partial;  // partial sums at t = 2^k
  std::vector<double> psi_partial;   // partial sums at j = 2^k
};

/// Convergence of the two series attached to psi.  Pure powers are decided
/// in closed form; otherwise each series is summed over dyadic blocks up to
/// `horizon` and the block ratio decides (well below 1 converges, close to
/// or above 1 diverges, in between is inconclusive).
SeriesReport series_test(const PsiSpec& psi, std::size_t m, std::size_t n, std::int64_t horizon = 1 << 16);

struct Solution {
  std::vector<Poly> p;
  std::vector<Poly> q;
  std::int64_t deg_q = 0;   // log_q |q|
  std::int64_t quality = 0; // log_q |Aq + p|
};

/// Every q with deg q <= D (q != 0) such that |Aq + p|^m < psi(|q|^n), with
/// p = -(polynomial part of Aq).  Sorted by deg q, then by the coefficients
/// of q.
/// Throws PrecisionError when A lacks the digits to decide a candidate.
std::vector<Solution> brute_force_solutions(const LaurentMatrix& a, const PsiSpec& psi, std::int64_t D);

/// Only the degrees and qualities (no p, q), for large sweeps.
struct SolutionStat {
  std::int64_t deg_q;
  std::int64_t quality;
};
std::vector<SolutionStat> solution_stats(const LaurentMatrix& a, const PsiSpec& psi, std::int64_t D);

struct TraceRecord {
  std::int64_t t = 0;
  std::int64_t r = 0;
  std::int64_t delta_exp = 0;  // -log_q delta(g_t Lambda_A)
  bool hit = false;            // delta_exp >= r
};
using ExcursionTrace = std::vector<TraceRecord>;

ExcursionTrace dynamical_test(const LaurentMatrix& a, const PsiSpec& psi, std::int64_t t_lo, std::int64_t t_hi);
/// CSV rows "t,r_t,delta_exp,hit".
std::string trace_csv(const ExcursionTrace& trace);

/// Cross-validation of the brute-force and dynamical detectors.
///
///  * a solution of degree a forces a hit at t(a) = min{t : mt - r(t) >= a}
///    whenever mt(a) - r(t(a)) = a;
///  * a hit with delta_exp >= r(t) + 1 forces a solution with
///    deg q <= mt - r - 1 and quality <= -(nt + r + 1).
/// Events that are covered by neither rule (hits with delta_exp = r(t), or
/// solutions whose t(a) overshoots) are the boundary band.
struct CorrespondenceReport {
  std::size_t solutions = 0;
  std::size_t hits = 0;
  std::size_t checked = 0;
  std::size_t band = 0;
  std::size_t violations = 0;
  std::vector<std::string> notes;
};
CorrespondenceReport correspondence_check(const LaurentMatrix& a, const PsiSpec& psi, std::int64_t D);

/// Haar-random m x n matrix with entries in the unit ball, `digits` digits.
LaurentMatrix random_matrix(const Field& f, std::size_t m, std::size_t n, std::int64_t digits, std::uint64_t seed);

struct KgConfig {
  PsiSpec psi = PsiSpec::power(1);
  std::uint32_t q = 2;
  std::size_t m = 1;
  std::size_t n = 1;
  std::size_t samples = 1000;
  std::int64_t D = 16;
  std::uint64_t seed = 1;
  int workers = 1;
};

struct KgReport {
  KgConfig config;
  SeriesReport series;
  double top_window_fraction = 0;      // solution with D/2 < deg q <= D
  std::vector<std::size_t> beyond;     // beyond[D0] = #samples with a solution of deg q > D0
  double decay_factor = 0;             // fitted per-unit decay of beyond[D0]
  std::size_t decay_points = 0;
  double mean_hits = 0;                // trace hits for 1 <= t <= D
  std::string text() const;
  /// Rows "D0,count,fraction".
  std::string beyond_csv() const;
};

KgReport kg_experiment(const KgConfig& config);

/// Delta = -log_q delta(g_t Lambda_A) for `count` random A: samples from the
/// pushforward of the Haar measure after time t.
std::vector<double> flow_delta_samples(std::uint32_t q, std::size_t m, std::size_t n, std::int64_t t, std::size_t count,
                                       std::uint64_t seed, int workers = 1);

}  // namespace ulab
