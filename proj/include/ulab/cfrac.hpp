#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ulab/laurent.hpp"
#include "ulab/poly.hpp"
#include "ulab/stats.hpp"

namespace ulab {

enum class CfStop {
  Complete,            // the value is rational and the expansion ended exactly
  MaxTerms,            // requested number of terms reached
  PrecisionExhausted,  // the next partial quotient cannot be certified
};

/// Continued fraction alpha = a_0 + 1/(a_1 + 1/(a_2 + ...)) with
/// deg a_i >= 1 for i >= 1, and its convergents p_i/q_i.  Only certified
/// partial quotients are stored.
struct CFExpansion {
  std::vector<Poly> quotients;
  std::vector<Poly> p;
  std::vector<Poly> q;
  std::optional<std::int64_t> source_floor;
  CfStop stop = CfStop::Complete;

  std::size_t size() const { return quotients.size(); }
  std::int64_t deg_q(std::size_t i) const { return q.at(i).deg(); }
};

/// Expand alpha into at most max_terms partial quotients.
///
/// The Euclidean algorithm runs on the known digits A / X^K of alpha
/// (K = -floor).  A quotient a_i is kept only while 2 deg q_i <= K, which is
/// exactly when digit-by-digit inversion of the complete quotients would
/// still determine it.  Throws PrecisionError when not even a_0 is known.
CFExpansion cf_expand(const Laurent& alpha, std::size_t max_terms);

/// |alpha - p_i/q_i|, computed independently of the expansion as
/// |alpha q_i - p_i| / |q_i|.  Throws PrecisionError if the difference is
/// not certified at alpha's precision.
LogNorm approx_quality(const Laurent& alpha, const CFExpansion& cf, std::size_t i);

/// Horner evaluation of the continued fraction back into a series, to
/// precision `floor`.
Laurent cf_evaluate(const CFExpansion& cf, std::int64_t floor);

/// Tally of partial-quotient degrees over Haar-random alpha in the unit
/// ball.  counts[d] is the number of tallied quotients of degree d; terms
/// whose degree could not be certified go to `truncated`.
struct DegreeTable {
  std::uint32_t q = 0;
  std::size_t samples = 0;
  int precision = 0;
  std::int64_t horizon = 0;  // tally a_i only while deg q_{i-1} < horizon
  std::vector<std::uint64_t> counts;
  std::uint64_t truncated = 0;

  std::uint64_t total() const;
  double frequency(std::size_t d) const;
  /// (q-1) q^-d.
  double expected(std::size_t d) const;
  stats::ChiSquare chi_square() const;
  /// CSV rows "d, count, freq, expected" (no header comment).
  std::string csv() const;
};

/// Degrees of the certified partial quotients a_1, a_2, ... of the unit-ball
/// series sum_{j=1}^{N} c_j X^-j given by digits[j-1] = c_j, together with
/// the number of terms known to exist but not certified (0 or 1).
struct DegreeRun {
  std::vector<std::int64_t> degrees;
  bool next_uncertified = false;
};
DegreeRun partial_quotient_degrees(const Field& f, const std::vector<Elem>& digits, std::size_t max_terms);

/// Monte Carlo tally: alpha has i.i.d. uniform digits at exponents -1..-N.
/// A quotient a_i is tallied when i <= max_terms and deg q_{i-1} < N/4; the
/// stopping rule looks only at earlier quotients so tallied degrees keep
/// their i.i.d. law.
DegreeTable pq_degree_stats(std::size_t sample_count, std::uint32_t q, std::size_t max_terms, std::uint64_t seed,
                            int precision = 64, int workers = 1);

/// Same tally over every digit string of length `precision` (q^precision
/// series).  Exact, so counts are integers determined by combinatorics.
DegreeTable pq_degree_enumerate(std::uint32_t q, int precision, std::size_t max_terms);

}  // namespace ulab
