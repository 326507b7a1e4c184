#include "nsdamp/text.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "nsdamp/errors.hpp"

namespace nsdamp::text {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return out;
}

double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  double value = 0.0;
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError("expected a real number for " + std::string(what) + ", got '" +
                     std::string(s) + "'");
  }
  return value;
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  std::int64_t value = 0;
  const auto* end = s.data() + s.size();
  auto res = std::from_chars(s.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw ParseError("expected an integer for " + std::string(what) + ", got '" +
                     std::string(s) + "'");
  }
  return value;
}

bool parse_bool(std::string_view s, std::string_view what) {
  const auto v = lower(trim(s));
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ParseError("expected a boolean for " + std::string(what) + ", got '" + v + "'");
}

std::vector<double> parse_double_list(std::string_view s, std::string_view what) {
  std::vector<double> out;
  while (!s.empty()) {
    const auto comma = s.find(',');
    const auto item = trim(s.substr(0, comma));
    if (!item.empty()) out.push_back(parse_double(item, what));
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace nsdamp::text
