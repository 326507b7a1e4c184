#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace nsdamp::text {

/// Shortest decimal representation that round-trips.
std::string format_double(double value);

double parse_double(std::string_view s, std::string_view what);
std::int64_t parse_int(std::string_view s, std::string_view what);
bool parse_bool(std::string_view s, std::string_view what);
std::vector<double> parse_double_list(std::string_view s, std::string_view what);

std::string_view trim(std::string_view s);
std::string lower(std::string_view s);

}  // namespace nsdamp::text
