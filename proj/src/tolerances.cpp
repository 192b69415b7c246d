#include "vvcm/tolerances.hpp"

#include <charconv>
#include <cmath>
#include <stdexcept>

namespace vvcm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

double parse_positive(std::string_view key, std::string_view text) {
  // std::from_chars for double is available in libstdc++ 11.
  double value = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value) || value < 0.0) {
    throw std::invalid_argument("tolerance '" + std::string(key) +
                                "' needs a non-negative number, got '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

void Tolerances::apply_overrides(std::string_view overrides) {
  while (!overrides.empty()) {
    const auto comma = overrides.find(',');
    const auto item = trim(overrides.substr(0, comma));
    overrides = comma == std::string_view::npos ? std::string_view{} : overrides.substr(comma + 1);
    if (item.empty()) continue;

    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("tolerance override '" + std::string(item) + "' is not key=value");
    }
    const auto key = trim(item.substr(0, eq));
    const double value = parse_positive(key, trim(item.substr(eq + 1)));
    if (key == "rank") rank = value;
    else if (key == "f") f = value;
    else if (key == "z") z = value;
    else if (key == "slack") slack = value;
    else if (key == "hull") hull = value;
    else if (key == "pair") pair = value;
    else throw std::invalid_argument("unknown tolerance key '" + std::string(key) + "'");
  }
}

}  // namespace vvcm
