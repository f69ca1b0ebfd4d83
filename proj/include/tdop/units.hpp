#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace tdop {

// Every travel time is d * eta / 100 with integer d and eta, and every prize
// is a multiple of 0.01. Both are therefore held as exact integers in
// hundredths, so comparisons against windows and budgets never drift.
using Ticks = std::int64_t;
using Cents = std::int64_t;

inline constexpr std::int64_t kHundredths = 100;

constexpr Ticks to_ticks(std::int64_t time_units) noexcept { return time_units * kHundredths; }
constexpr double ticks_to_double(Ticks t) noexcept { return static_cast<double>(t) / kHundredths; }
constexpr double cents_to_double(Cents c) noexcept { return static_cast<double>(c) / kHundredths; }

// "-1.25", "0.19", "12.00"
std::string format_hundredths(std::int64_t value);

// Parses a decimal with at most two fractional digits ("0.19", "1", "1.0",
// "-3.5") into hundredths. Returns nullopt on anything else.
std::optional<std::int64_t> parse_hundredths(std::string_view text);

// Shortest round-trip text for a double (used for score summaries).
std::string format_double(double value);

}  // namespace tdop
