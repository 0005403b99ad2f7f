#include "ulab/text_io.hpp"

#include <cctype>
#include <charconv>
#include <map>
#include <vector>

#include "ulab/errors.hpp"

namespace ulab {

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_int(std::string_view s, const char* what) {
  s = strip(s);
  T v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(std::string("bad ") + what + ": '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

std::map<std::int64_t, Elem> parse_term_list(const Field& f, std::string_view text) {
  std::map<std::int64_t, Elem> terms;
  text = strip(text);
  if (text == "0" || text.empty()) return terms;
  for (auto item : split(text, ',')) {
    item = strip(item);
    const auto colon = item.find(':');
    if (colon == std::string_view::npos) throw ParseError("term without ':' in '" + std::string(item) + "'");
    const auto e = parse_int<std::int64_t>(item.substr(0, colon), "exponent");
    const auto c = parse_int<std::uint32_t>(item.substr(colon + 1), "coefficient");
    if (c >= f.order()) throw ParseError("coefficient " + std::to_string(c) + " outside F_" + std::to_string(f.order()));
    if (terms.count(e)) throw ParseError("repeated exponent " + std::to_string(e));
    if (c != 0) terms[e] = c;
  }
  return terms;
}

std::string format_term_list(const std::vector<std::pair<std::int64_t, Elem>>& terms) {
  if (terms.empty()) return "0";
  std::string out;
  for (const auto& [e, c] : terms) {
    if (!out.empty()) out += ',';
    out += std::to_string(e) + ":" + std::to_string(c);
  }
  return out;
}

}  // namespace

std::string format_terms(const Poly& p) {
  std::vector<std::pair<std::int64_t, Elem>> terms;
  const auto c = p.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] != 0) terms.emplace_back(static_cast<std::int64_t>(i), c[i]);
  }
  return format_term_list(terms);
}

Poly parse_poly(const Field& f, std::string_view text) {
  const auto terms = parse_term_list(f, text);
  if (terms.empty()) return Poly(f);
  if (terms.begin()->first < 0) throw ParseError("negative exponent in a polynomial");
  std::vector<Elem> v(static_cast<std::size_t>(terms.rbegin()->first) + 1, 0);
  for (const auto& [e, c] : terms) v[static_cast<std::size_t>(e)] = c;
  return Poly(f, std::move(v));
}

std::string format_laurent(const Laurent& x) {
  std::vector<std::pair<std::int64_t, Elem>> terms;
  const auto& c = x.coeffs();
  for (std::size_t i = c.size(); i-- > 0;) {
    if (c[i] != 0) terms.emplace_back(x.low() + static_cast<std::int64_t>(i), c[i]);
  }
  std::string out = "q=" + std::to_string(x.field().order()) + "; " + format_term_list(terms);
  if (x.floor()) out += "; floor=" + std::to_string(*x.floor());
  return out;
}

Laurent parse_laurent(std::string_view text) {
  const auto parts = split(text, ';');
  if (parts.size() < 2 || parts.size() > 3) throw ParseError("expected 'q=<int>; <terms>[; floor=<int>]'");
  auto head = strip(parts[0]);
  if (head.substr(0, 2) != "q=") throw ParseError("series must start with 'q='");
  const auto q = parse_int<std::uint32_t>(head.substr(2), "field order");
  const Field* f = nullptr;
  try {
    f = &Field::get(q);
  } catch (const DomainError& e) {
    throw ParseError(e.what());
  }
  std::optional<std::int64_t> floor;
  if (parts.size() == 3) {
    auto tail = strip(parts[2]);
    if (tail.substr(0, 6) != "floor=") throw ParseError("expected 'floor=<int>'");
    floor = parse_int<std::int64_t>(tail.substr(6), "floor");
  }
  const auto terms = parse_term_list(*f, parts[1]);
  if (terms.empty()) {
    if (floor) return Laurent::from_coeffs(*f, *floor, {}, floor);
    return Laurent(*f);
  }
  const std::int64_t lo = terms.begin()->first, hi = terms.rbegin()->first;
  if (floor && lo < *floor) throw ParseError("term below the stated floor");
  std::vector<Elem> v(static_cast<std::size_t>(hi - lo + 1), 0);
  for (const auto& [e, c] : terms) v[static_cast<std::size_t>(e - lo)] = c;
  return Laurent::from_coeffs(*f, lo, std::move(v), floor);
}

std::string format_elem(const Field& f, Elem c) {
  return "q=" + std::to_string(f.order()) + "; " + (c == 0 ? std::string("0") : "0:" + std::to_string(c));
}

Elem parse_elem(std::string_view text, const Field** field_out) {
  const Laurent x = parse_laurent(text);
  if (!x.is_exact()) throw ParseError("field element cannot carry a floor");
  if (x.is_zero()) {
    if (field_out) *field_out = &x.field();
    return 0;
  }
  if (x.low() != 0 || x.top() != 0) throw ParseError("field element must be a constant term");
  if (field_out) *field_out = &x.field();
  return x.lead();
}

}  // namespace ulab
