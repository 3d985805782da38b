#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace chaos {

/// Account-currency amount held as an exact number of cents.
class Money {
 public:
  constexpr Money() = default;

  static constexpr Money from_cents(std::int64_t cents) { return Money(cents); }

  /// Rounds half away from zero to the nearest cent.
  static Money from_double(double amount);

  /// Accepts "5000.00", "-1 161.37", "0.5", "-3". Throws std::invalid_argument.
  static Money parse(std::string_view text);

  constexpr std::int64_t cents() const noexcept { return cents_; }
  constexpr double value() const noexcept { return static_cast<double>(cents_) / 100.0; }

  /// Two decimals; `thousands_space` groups the integer part as in "5 683.62".
  std::string str(bool thousands_space = false) const;

  constexpr Money operator-() const { return Money(-cents_); }
  constexpr Money& operator+=(Money o) {
    cents_ += o.cents_;
    return *this;
  }
  constexpr Money& operator-=(Money o) {
    cents_ -= o.cents_;
    return *this;
  }
  friend constexpr Money operator+(Money a, Money b) { return a += b; }
  friend constexpr Money operator-(Money a, Money b) { return a -= b; }
  friend constexpr auto operator<=>(Money, Money) = default;

 private:
  constexpr explicit Money(std::int64_t cents) : cents_(cents) {}
  std::int64_t cents_ = 0;
};

/// Half-away-from-zero rounding to `digits` decimals, tolerant of binary
/// representation error on decimal halves (2.675 -> 2.68).
double round_half_away(double value, int digits);

}  // namespace chaos
