#pragma once

#include <string>

#include "hqva/exact/series.hpp"

namespace hqva {

// Parsers for the canonical text produced by the to_string members; see
// docs/format.md. Unknown variable names and malformed input throw
// std::invalid_argument.
Poly parse_poly(const std::string& text, const VarNames& names = VarNames::defaults());
RatFunc parse_ratfunc(const std::string& text, const VarNames& names = VarNames::defaults());
Series parse_series(const std::string& text, const VarNames& names = VarNames::defaults());

}  // namespace hqva
