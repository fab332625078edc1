#pragma once

#include <iosfwd>
#include <string>

#include "semiquant/lab.hpp"

namespace semiquant {

/// INI-style scenario description; see docs/config.md for the keys. Errors
/// carry code "config" and the offending line number.
Scenario parse_scenario(std::istream& in, const std::string& source = "<input>");
Scenario load_scenario(const std::string& path);

/// Canonical text form; parse_scenario(scenario_to_text(s)) reproduces s exactly.
std::string scenario_to_text(const Scenario& s);

/// A number, "pi", or a product/quotient chain of them such as "3*pi/4".
double parse_number_expression(const std::string& text);

}  // namespace semiquant
