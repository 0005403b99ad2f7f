#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ulab/lognorm.hpp"
#include "ulab/poly.hpp"

namespace ulab {

/// Square or rectangular matrix of polynomials, stored as rows.
using PolyRow = std::vector<Poly>;
using PolyMatrix = std::vector<PolyRow>;

/// max_j deg v_j; bottom for the zero vector.
LogNorm row_degree(const PolyRow& v);

/// Determinant by fraction-free (Bareiss) elimination.
Poly determinant(PolyMatrix m);

/// Row reduction to weak Popov form by simple transformations.
///
/// The pivot of a row is the rightmost column attaining the row degree.
/// While two rows share a pivot column, the one of larger degree (the
/// higher index on ties) is reduced by a monomial multiple of the other.
/// The rows of the result generate the same F_q[X]-module and their
/// degrees are the successive minima of that module under the degree
/// norm.  Throws DomainError if the rows are linearly dependent.
PolyMatrix weak_popov_reduce(PolyMatrix b);

/// Pivot column of each row (rows must be nonzero).
std::vector<std::size_t> pivot_columns(const PolyMatrix& b);

/// The lattice X^-sigma * rowspan_{F_q[X]}(B) in k^d.  Nonsingular by
/// construction; the reduced basis is computed once and kept.
class PolyLattice {
 public:
  PolyLattice(PolyMatrix basis, std::int64_t sigma);
  static PolyLattice standard(const Field& f, std::size_t d);

  const Field& field() const { return basis_.front().front().field(); }
  std::size_t dim() const { return basis_.size(); }
  std::int64_t sigma() const { return sigma_; }
  const PolyMatrix& basis() const { return basis_; }
  const PolyMatrix& reduced() const { return reduced_; }

  /// deg det B.
  std::int64_t deg_det() const { return deg_det_; }
  /// log_q |det| of the lattice.
  std::int64_t log_covolume() const { return deg_det_ - static_cast<std::int64_t>(dim()) * sigma_; }
  bool is_unimodular() const { return log_covolume() == 0; }

  /// Norm of a shortest nonzero vector.
  LogNorm delta() const;
  /// The d successive minima, nondecreasing.
  std::vector<LogNorm> successive_minima() const;
  /// A shortest vector as a polynomial row (the lattice vector is X^-sigma
  /// times it).
  const PolyRow& shortest_row() const;

 private:
  PolyMatrix basis_;
  PolyMatrix reduced_;
  std::int64_t sigma_;
  std::int64_t deg_det_ = 0;
};

/// The diagonal element g_t for blocks m + n = d: the first m coordinates
/// are scaled by X^(nt), the last n by X^(-mt).
struct FlowSpec {
  std::size_t m = 1;
  std::size_t n = 1;
  std::int64_t t = 0;

  std::vector<std::int64_t> exponents() const;
};

/// g_t Lambda, exact.  Coordinates are rescaled by monomials and sigma
/// absorbs the common denominator.
PolyLattice apply_flow(const PolyLattice& lattice, const FlowSpec& flow);

/// Lambda scaled coordinate-wise by X^e_j (any integers).
PolyLattice scale_coordinates(const PolyLattice& lattice, const std::vector<std::int64_t>& exponents);

/// delta(Lambda) <= q^-r.
bool cusp_member(const PolyLattice& lattice, std::int64_t r);

/// Fixture text: header "d=<d> sigma=<s> q=<q>", then one row per line with
/// whitespace-separated polynomial strings.
std::string format_lattice(const PolyLattice& lattice);
PolyLattice parse_lattice(std::string_view text);

}  // namespace ulab
