#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace ecgsym::text {

std::string_view trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char delimiter);
// Splits on runs of spaces/tabs.
std::vector<std::string> split_whitespace(std::string_view s);
std::string lower(std::string_view s);

// Full-string numeric parses; std::nullopt-style failure is reported by
// returning false.
bool parse_double(std::string_view s, double& out);
bool parse_size(std::string_view s, std::size_t& out);

// Accepts "p/q" fractions as well as plain decimals.
bool parse_fraction(std::string_view s, double& out);
// Renders x as "p/q" when it is a ratio with a small denominator, else as %g.
std::string format_fraction(double x);

// Shortest round-trippable decimal, stable across runs.
std::string format_double(double x);

}  // namespace ecgsym::text
