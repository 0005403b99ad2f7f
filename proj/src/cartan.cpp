#include "ulab/cartan.hpp"

#include <algorithm>
#include <cstdlib>

#include "ulab/errors.hpp"

namespace ulab {

namespace {

void check_square(const LaurentMatrix& g) {
  if (g.empty()) throw DomainError("empty matrix");
  for (const auto& row : g) {
    if (row.size() != g.size()) throw DomainError("matrix must be square");
  }
}

// Position of the entry of largest norm in rows/cols >= k (restricted to
// column k when col_only).  Ties go to the lowest (row, col).  Returns false
// if every candidate is exactly zero; throws PrecisionError if a value that is
// zero to precision could be the largest.
bool largest_entry(const LaurentMatrix& g, std::size_t k, bool col_only, std::size_t& bi, std::size_t& bj) {
  const std::size_t d = g.size();
  bool found = false;
  std::int64_t best = 0;
  std::optional<std::int64_t> unknown;
  for (std::size_t i = k; i < d; ++i) {
    for (std::size_t j = k; j < (col_only ? k + 1 : d); ++j) {
      const Laurent& x = g[i][j];
      if (x.is_zero()) continue;
      if (x.is_zero_to_precision()) {
        unknown = unknown ? std::max(*unknown, *x.norm_bound()) : *x.norm_bound();
        continue;
      }
      if (!found || x.top() > best) {
        best = x.top();
        bi = i;
        bj = j;
        found = true;
      }
    }
  }
  if (unknown && (!found || *unknown >= best)) {
    throw PrecisionError("pivot cannot be certified: an entry is zero only to precision");
  }
  return found;
}

}  // namespace

LaurentMatrix identity_matrix(const Field& f, std::size_t d) {
  LaurentMatrix m(d, std::vector<Laurent>(d, Laurent(f)));
  for (std::size_t i = 0; i < d; ++i) m[i][i] = Laurent::monomial(f, 0);
  return m;
}

LaurentMatrix diagonal_matrix(const Field& f, const std::vector<std::int64_t>& exponents) {
  LaurentMatrix m = identity_matrix(f, exponents.size());
  for (std::size_t i = 0; i < exponents.size(); ++i) m[i][i] = Laurent::monomial(f, exponents[i]);
  return m;
}

LaurentMatrix to_laurent(const PolyMatrix& m) {
  LaurentMatrix out;
  for (const auto& row : m) {
    std::vector<Laurent> r;
    for (const auto& p : row) r.push_back(Laurent::from_poly(p));
    out.push_back(std::move(r));
  }
  return out;
}

LaurentMatrix multiply(const LaurentMatrix& a, const LaurentMatrix& b) {
  if (a.empty() || b.empty() || a[0].size() != b.size()) throw DomainError("matrix shapes do not match");
  const Field& f = a[0][0].field();
  LaurentMatrix out(a.size(), std::vector<Laurent>(b[0].size(), Laurent(f)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b[0].size(); ++j) {
      Laurent s(f);
      for (std::size_t k = 0; k < b.size(); ++k) s = s + a[i][k] * b[k][j];
      out[i][j] = s;
    }
  }
  return out;
}

LaurentMatrix inverse(const LaurentMatrix& g) {
  check_square(g);
  const std::size_t d = g.size();
  const Field& f = g[0][0].field();
  LaurentMatrix a = g, inv = identity_matrix(f, d);
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t pi = k, pj = k;
    if (!largest_entry(a, k, true, pi, pj)) throw DomainError("singular matrix");
    std::swap(a[k], a[pi]);
    std::swap(inv[k], inv[pi]);
    const Laurent piv_inv = a[k][k].inverse();
    for (std::size_t j = 0; j < d; ++j) {
      a[k][j] = a[k][j] * piv_inv;
      inv[k][j] = inv[k][j] * piv_inv;
    }
    for (std::size_t i = 0; i < d; ++i) {
      if (i == k || a[i][k].is_zero()) continue;
      const Laurent c = a[i][k];
      for (std::size_t j = 0; j < d; ++j) {
        a[i][j] = a[i][j] - c * a[k][j];
        inv[i][j] = inv[i][j] - c * inv[k][j];
      }
    }
  }
  return inv;
}

std::vector<std::int64_t> elementary_divisor_valuations(const LaurentMatrix& g) {
  check_square(g);
  const std::size_t d = g.size();
  LaurentMatrix a = g;
  std::vector<std::int64_t> vals;
  for (std::size_t k = 0; k < d; ++k) {
    std::size_t pi = k, pj = k;
    if (!largest_entry(a, k, false, pi, pj)) throw DomainError("singular matrix");
    std::swap(a[k], a[pi]);
    for (auto& row : a) std::swap(row[k], row[pj]);
    vals.push_back(-a[k][k].top());
    // Every multiplier has norm <= 1, so these are operations over the
    // valuation ring.  Row k outside column k never influences the rest and
    // the matching column operations are left implicit.
    const Laurent piv_inv = a[k][k].inverse();
    for (std::size_t i = k + 1; i < d; ++i) {
      if (a[i][k].is_zero()) continue;
      const Laurent c = a[i][k] * piv_inv;
      for (std::size_t j = k + 1; j < d; ++j) a[i][j] = a[i][j] - c * a[k][j];
      a[i][k] = Laurent(a[i][k].field());
    }
  }
  std::sort(vals.begin(), vals.end());
  return vals;
}

std::int64_t cartan_distance(const LaurentMatrix& g) {
  std::int64_t s = 0;
  for (auto v : elementary_divisor_valuations(g)) s += std::llabs(v);
  return s;
}

}  // namespace ulab
