#include <chaos/money.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace chaos {

double round_half_away(double value, int digits) {
  const double scale = std::pow(10.0, digits);
  const double scaled = value * scale;
  // Nudge by a relative epsilon so decimal halves stored slightly low still round away.
  const double nudged = scaled + std::copysign(std::abs(scaled) * 1e-12 + 1e-9, scaled);
  return std::trunc(nudged + std::copysign(0.5, scaled)) / scale;
}

Money Money::from_double(double amount) {
  const double cents = round_half_away(amount, 2) * 100.0;
  return Money(static_cast<std::int64_t>(std::llround(cents)));
}

Money Money::parse(std::string_view text) {
  std::string digits;
  digits.reserve(text.size());
  for (char c : text) {
    if (c == ' ' || c == '\t') continue;
    digits.push_back(c);
  }
  if (digits.empty()) throw std::invalid_argument("empty money field");
  bool negative = false;
  std::size_t i = 0;
  if (digits[0] == '-' || digits[0] == '+') {
    negative = digits[0] == '-';
    i = 1;
  }
  std::int64_t whole = 0;
  std::int64_t frac = 0;
  int frac_digits = 0;
  bool seen_digit = false;
  bool seen_point = false;
  for (; i < digits.size(); ++i) {
    const char c = digits[i];
    if (c == '.') {
      if (seen_point) throw std::invalid_argument("bad money field: " + std::string(text));
      seen_point = true;
    } else if (c >= '0' && c <= '9') {
      seen_digit = true;
      if (!seen_point) {
        whole = whole * 10 + (c - '0');
      } else if (frac_digits < 2) {
        frac = frac * 10 + (c - '0');
        ++frac_digits;
      } else if (c != '0') {
        throw std::invalid_argument("money has more than two decimals: " + std::string(text));
      }
    } else {
      throw std::invalid_argument("bad money field: " + std::string(text));
    }
  }
  if (!seen_digit) throw std::invalid_argument("bad money field: " + std::string(text));
  if (frac_digits == 1) frac *= 10;
  const std::int64_t cents = whole * 100 + frac;
  return Money(negative ? -cents : cents);
}

std::string Money::str(bool thousands_space) const {
  const bool negative = cents_ < 0;
  const std::uint64_t magnitude = negative ? static_cast<std::uint64_t>(-cents_) : static_cast<std::uint64_t>(cents_);
  std::string whole = std::to_string(magnitude / 100);
  if (thousands_space) {
    for (int pos = static_cast<int>(whole.size()) - 3; pos > 0; pos -= 3) whole.insert(static_cast<std::size_t>(pos), " ");
  }
  const auto frac = magnitude % 100;
  std::string out = negative ? "-" : "";
  out += whole;
  out += '.';
  out += static_cast<char>('0' + frac / 10);
  out += static_cast<char>('0' + frac % 10);
  return out;
}

}  // namespace chaos
