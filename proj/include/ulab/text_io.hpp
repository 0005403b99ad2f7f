#pragma once

#include <string>
#include <string_view>

#include "ulab/laurent.hpp"
#include "ulab/poly.hpp"

namespace ulab {

// Text formats used by fixtures and the CLI.
//
//   polynomial:  "<e>:<c>,<e>:<c>,..."  terms in any order, "0" for zero
//   series:      "q=<q>; <terms>[; floor=<f>]"  no floor means exact
//   element:     "q=<q>; 0:<c>"  (a constant series)
//
// Coefficients are the integer encoding of Elem.  Formatting lists terms in
// decreasing exponent order and omits zero coefficients, so the formatted
// form is canonical.

std::string format_terms(const Poly& p);
Poly parse_poly(const Field& f, std::string_view text);

std::string format_laurent(const Laurent& x);
Laurent parse_laurent(std::string_view text);

std::string format_elem(const Field& f, Elem c);
Elem parse_elem(std::string_view text, const Field** field_out = nullptr);

}  // namespace ulab
