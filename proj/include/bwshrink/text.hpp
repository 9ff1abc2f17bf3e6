#ifndef BWSHRINK_TEXT_HPP
#define BWSHRINK_TEXT_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bwshrink {

// Shortest decimal form that parses back to the same double. Infinities are
// written as "inf" / "-inf".
std::string format_double(double x);

// Strict parse of a full token; accepts "inf", "infinity" and "-inf".
std::optional<double> parse_double(std::string_view token);
std::optional<long long> parse_integer(std::string_view token);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split_whitespace(std::string_view s);

} // namespace bwshrink

#endif // BWSHRINK_TEXT_HPP
