#include "ulab/polylattice.hpp"

#include <algorithm>
#include <sstream>

#include "ulab/errors.hpp"
#include "ulab/text_io.hpp"

namespace ulab {

LogNorm row_degree(const PolyRow& v) {
  LogNorm d = LogNorm::zero();
  for (const auto& p : v) d = max(d, p.degree());
  return d;
}

Poly determinant(PolyMatrix m) {
  const std::size_t n = m.size();
  if (n == 0) throw DomainError("determinant of an empty matrix");
  const Field& f = m[0][0].field();
  for (const auto& row : m) {
    if (row.size() != n) throw DomainError("determinant of a non-square matrix");
  }
  Poly prev = Poly::constant(f, 1);
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k].is_zero()) {
      std::size_t i = k + 1;
      while (i < n && m[i][k].is_zero()) ++i;
      if (i == n) return Poly(f);
      std::swap(m[i], m[k]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        const Poly num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        m[i][j] = divmod(num, prev).first;
      }
      m[i][k] = Poly(f);
    }
    prev = m[k][k];
  }
  return negate ? -m[n - 1][n - 1] : m[n - 1][n - 1];
}

namespace {

struct RowInfo {
  std::int64_t deg;
  std::size_t pivot;
};

RowInfo row_info(const PolyRow& row) {
  const LogNorm d = row_degree(row);
  if (d.is_zero()) throw DomainError("basis rows are linearly dependent");
  RowInfo info{d.exponent(), 0};
  for (std::size_t j = row.size(); j-- > 0;) {
    if (row[j].degree() == d) {
      info.pivot = j;
      break;
    }
  }
  return info;
}

}  // namespace

std::vector<std::size_t> pivot_columns(const PolyMatrix& b) {
  std::vector<std::size_t> out;
  for (const auto& row : b) out.push_back(row_info(row).pivot);
  return out;
}

PolyMatrix weak_popov_reduce(PolyMatrix b) {
  if (b.empty()) throw DomainError("empty basis");
  const std::size_t cols = b[0].size();
  for (const auto& row : b) {
    if (row.size() != cols) throw DomainError("ragged basis");
  }
  if (b.size() > cols) throw DomainError("more rows than columns: rows are linearly dependent");
  const Field& f = b[0][0].field();
  std::vector<RowInfo> info;
  for (const auto& row : b) info.push_back(row_info(row));

  for (;;) {
    std::size_t lo = 0, hi = 0;
    bool conflict = false;
    for (std::size_t i = 1; i < b.size() && !conflict; ++i) {
      for (std::size_t k = 0; k < i; ++k) {
        if (info[k].pivot == info[i].pivot) {
          lo = k;
          hi = i;
          conflict = true;
          break;
        }
      }
    }
    if (!conflict) return b;
    // reduce the row of larger degree; the higher index on ties
    const std::size_t r = info[lo].deg > info[hi].deg ? lo : hi;
    const std::size_t o = r == lo ? hi : lo;
    const std::size_t p = info[r].pivot;
    const Elem c = f.div(b[r][p].lead(), b[o][p].lead());
    const std::int64_t shift = info[r].deg - info[o].deg;
    for (std::size_t j = 0; j < cols; ++j) b[r][j].sub_scaled_shifted(b[o][j], c, shift);
    info[r] = row_info(b[r]);
  }
}

PolyLattice::PolyLattice(PolyMatrix basis, std::int64_t sigma) : basis_(std::move(basis)), sigma_(sigma) {
  if (basis_.empty()) throw DomainError("lattice of dimension 0");
  for (const auto& row : basis_) {
    if (row.size() != basis_.size()) throw DomainError("lattice basis must be square");
  }
  reduced_ = weak_popov_reduce(basis_);
  for (const auto& row : reduced_) deg_det_ += row_degree(row).exponent();
}

PolyLattice PolyLattice::standard(const Field& f, std::size_t d) {
  PolyMatrix b(d, PolyRow(d, Poly(f)));
  for (std::size_t i = 0; i < d; ++i) b[i][i] = Poly::constant(f, 1);
  return PolyLattice(std::move(b), 0);
}

LogNorm PolyLattice::delta() const { return row_degree(shortest_row()).shifted(-sigma_); }

std::vector<LogNorm> PolyLattice::successive_minima() const {
  std::vector<LogNorm> out;
  for (const auto& row : reduced_) out.push_back(row_degree(row).shifted(-sigma_));
  std::sort(out.begin(), out.end());
  return out;
}

const PolyRow& PolyLattice::shortest_row() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < reduced_.size(); ++i) {
    if (row_degree(reduced_[i]) < row_degree(reduced_[best])) best = i;
  }
  return reduced_[best];
}

std::vector<std::int64_t> FlowSpec::exponents() const {
  std::vector<std::int64_t> e;
  for (std::size_t i = 0; i < m; ++i) e.push_back(static_cast<std::int64_t>(n) * t);
  for (std::size_t i = 0; i < n; ++i) e.push_back(-static_cast<std::int64_t>(m) * t);
  return e;
}

PolyLattice scale_coordinates(const PolyLattice& lattice, const std::vector<std::int64_t>& exponents) {
  const std::size_t d = lattice.dim();
  if (exponents.size() != d) throw DomainError("scaling exponents do not match the dimension");
  const std::int64_t s = -*std::min_element(exponents.begin(), exponents.end());
  PolyMatrix b = lattice.basis();
  for (auto& row : b) {
    for (std::size_t j = 0; j < d; ++j) row[j] = row[j].shifted(exponents[j] + s);
  }
  return PolyLattice(std::move(b), lattice.sigma() + s);
}

PolyLattice apply_flow(const PolyLattice& lattice, const FlowSpec& flow) {
  if (flow.m + flow.n != lattice.dim()) throw DomainError("flow blocks do not match the lattice dimension");
  if (flow.t == 0) return lattice;
  return scale_coordinates(lattice, flow.exponents());
}

bool cusp_member(const PolyLattice& lattice, std::int64_t r) { return lattice.delta() <= LogNorm::of(-r); }

std::string format_lattice(const PolyLattice& lattice) {
  std::ostringstream os;
  os << "d=" << lattice.dim() << " sigma=" << lattice.sigma() << " q=" << lattice.field().order() << '\n';
  for (const auto& row : lattice.basis()) {
    for (std::size_t j = 0; j < row.size(); ++j) os << (j ? " " : "") << format_terms(row[j]);
    os << '\n';
  }
  return os.str();
}

PolyLattice parse_lattice(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    lines.push_back(line);
  }
  if (lines.empty()) throw ParseError("lattice fixture is empty");
  long long d = -1, sigma = 0, q = -1;
  bool have_sigma = false;
  {
    std::istringstream head(lines[0]);
    std::string tok;
    while (head >> tok) {
      const auto eq = tok.find('=');
      if (eq == std::string::npos) throw ParseError("bad header token '" + tok + "'");
      const std::string key = tok.substr(0, eq);
      long long v = 0;
      try {
        std::size_t used = 0;
        v = std::stoll(tok.substr(eq + 1), &used);
        if (used != tok.size() - eq - 1) throw ParseError("");
      } catch (const std::exception&) {
        throw ParseError("bad header value in '" + tok + "'");
      }
      if (key == "d") {
        d = v;
      } else if (key == "sigma") {
        sigma = v;
        have_sigma = true;
      } else if (key == "q") {
        q = v;
      } else {
        throw ParseError("unknown header key '" + key + "'");
      }
    }
  }
  if (d < 1 || q < 2 || !have_sigma) throw ParseError("header must be 'd=<int> sigma=<int> q=<int>'");
  const Field* f = nullptr;
  try {
    f = &Field::get(static_cast<std::uint32_t>(q));
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  if (lines.size() != static_cast<std::size_t>(d) + 1) {
    throw ParseError("expected " + std::to_string(d) + " rows, found " + std::to_string(lines.size() - 1));
  }
  PolyMatrix b;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    std::istringstream row_in(lines[i]);
    PolyRow row;
    std::string tok;
    while (row_in >> tok) row.push_back(parse_poly(*f, tok));
    if (row.size() != static_cast<std::size_t>(d)) throw ParseError("row " + std::to_string(i) + " has wrong length");
    b.push_back(std::move(row));
  }
  return PolyLattice(std::move(b), sigma);
}

}  // namespace ulab
