#pragma once

#include <chaos/market_data.hpp>
#include <chaos/sde.hpp>

#include <map>
#include <string>

namespace chaos::decision {

struct RiskConfig {
  double alpha1 = 0.05;
  double ks_alpha = 0.05;
  int shift_T = 16;

  /// Throws InvalidParameter.
  void validate() const;
};

enum class Action { enter_long, enter_short, exit_long, exit_short, hold };
enum class Source { dynamic, statistical, convolution, macd, bollinger, rsi };

std::string to_string(Action action);
std::string to_string(Source source);
Action parse_action(const std::string& name);
Source parse_source(const std::string& name);

/// +1 for long pressure (enter_long, exit_short), -1 for short pressure, 0 for hold.
int direction(Action action) noexcept;

struct Signal {
  Action action = Action::hold;
  Source source = Source::dynamic;
  double strength = 0.0;  // 0 for hold

  static Signal hold(Source source) { return {Action::hold, source, 0.0}; }
  friend bool operator==(const Signal&, const Signal&) = default;
};

/// Long entry when -dy > 0 and P_s > 1 - alpha1; short entry when -dy < 0
/// and P_s < alpha1. Strength |2 P_s - 1|.
Signal dynamic_signal(double y, double dy, double p_s, const RiskConfig& cfg);

/// Resale (exit_long) when P > 1 - alpha1, repurchase (exit_short) when P < alpha1.
Signal statistical_signal(double p_s, const RiskConfig& cfg, Source source = Source::statistical);

enum class Criterion { dynamic, convolution };

/// Density criteria need a stable distribution under the shift (no KS
/// rejection); the convolution criterion needs a detected shift.
bool stationarity_gate(const sde::KSResult& ks, Criterion criterion) noexcept;

enum class IndicatorKind { macd, bollinger, rsi };

using IndicatorParams = std::map<std::string, double>;

/// MACD(fast 12, slow 26, signal 9): signal-line cross on the final bar.
/// Bollinger(period 20, k 2): close at/below the lower band -> long, at/above the upper -> short.
/// RSI(period 14, Wilder): below `lower` (30) -> long, above `upper` (70) -> short.
Signal indicator_signal(std::span<const market::Bar> bars, IndicatorKind kind, const IndicatorParams& params = {});
Signal indicator_signal(const market::QuoteSeries& series, IndicatorKind kind, const IndicatorParams& params = {});

/// Exponential moving average seeded with the first value.
std::vector<double> ema(std::span<const double> values, int period);
/// Wilder RSI of the final bar.
double rsi(std::span<const double> closes, int period);

}  // namespace chaos::decision
