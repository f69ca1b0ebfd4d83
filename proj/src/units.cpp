#include "tdop/units.hpp"

#include <charconv>
#include <cstdlib>

namespace tdop {

std::string format_hundredths(std::int64_t value) {
  const bool negative = value < 0;
  const auto magnitude = static_cast<std::uint64_t>(negative ? -value : value);
  std::string out = negative ? "-" : "";
  out += std::to_string(magnitude / 100);
  out += '.';
  const auto frac = magnitude % 100;
  out += static_cast<char>('0' + frac / 10);
  out += static_cast<char>('0' + frac % 10);
  return out;
}

std::optional<std::int64_t> parse_hundredths(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  const auto dot = text.find('.');
  const auto whole = text.substr(0, dot);
  const auto frac = dot == std::string_view::npos ? std::string_view{} : text.substr(dot + 1);
  if (whole.empty() && frac.empty()) return std::nullopt;
  if (frac.size() > 2) return std::nullopt;
  std::int64_t units = 0;
  if (!whole.empty()) {
    auto [ptr, ec] = std::from_chars(whole.data(), whole.data() + whole.size(), units);
    if (ec != std::errc{} || ptr != whole.data() + whole.size() || units < 0) return std::nullopt;
  }
  std::int64_t hundredths = 0;
  for (std::size_t k = 0; k < 2; ++k) {
    hundredths *= 10;
    if (k < frac.size()) {
      const char c = frac[k];
      if (c < '0' || c > '9') return std::nullopt;
      hundredths += c - '0';
    }
  }
  const auto value = units * 100 + hundredths;
  return negative ? -value : value;
}

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

}  // namespace tdop
