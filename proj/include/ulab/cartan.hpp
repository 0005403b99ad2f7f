#pragma once

#include <cstdint>
#include <vector>

#include "ulab/laurent.hpp"
#include "ulab/polylattice.hpp"

namespace ulab {

using LaurentMatrix = std::vector<std::vector<Laurent>>;

LaurentMatrix identity_matrix(const Field& f, std::size_t d);
LaurentMatrix diagonal_matrix(const Field& f, const std::vector<std::int64_t>& exponents);
LaurentMatrix to_laurent(const PolyMatrix& m);
LaurentMatrix multiply(const LaurentMatrix& a, const LaurentMatrix& b);
/// Gauss-Jordan with the largest-norm pivot in each column.  Throws
/// DomainError for singular input and PrecisionError when a pivot cannot be
/// certified nonzero.
LaurentMatrix inverse(const LaurentMatrix& g);

/// Valuations a_1 <= ... <= a_d of the elementary divisors X^-a_i of g over
/// the valuation ring F_q[[X^-1]] (Smith form k1 diag(X^-a_i) k2 with k1, k2
/// in GL_d(F_q[[X^-1]])).
std::vector<std::int64_t> elementary_divisor_valuations(const LaurentMatrix& g);

/// sum_i |a_i|: a bi-invariant length of g under GL_d(F_q[[X^-1]]).
std::int64_t cartan_distance(const LaurentMatrix& g);

}  // namespace ulab
