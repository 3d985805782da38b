#include <chaos/decision.hpp>
#include <chaos/errors.hpp>

#include <algorithm>
#include <cmath>

namespace chaos::decision {

namespace {

double param(const IndicatorParams& params, const std::string& name, double fallback) {
  const auto it = params.find(name);
  return it == params.end() ? fallback : it->second;
}

int period_param(const IndicatorParams& params, const std::string& name, int fallback) {
  const double v = param(params, name, fallback);
  if (!(v >= 1.0) || v != std::floor(v)) throw InvalidParameter(name, "must be a positive integer");
  return static_cast<int>(v);
}

Signal macd_signal(std::span<const double> closes, const IndicatorParams& params) {
  const int fast = period_param(params, "macd_fast", 12);
  const int slow = period_param(params, "macd_slow", 26);
  const int sig = period_param(params, "macd_signal", 9);
  const auto needed = static_cast<std::size_t>(slow + sig);
  if (closes.size() < needed) throw SeriesTooShort(needed, closes.size());

  const auto ema_fast = ema(closes, fast);
  const auto ema_slow = ema(closes, slow);
  std::vector<double> line(closes.size());
  for (std::size_t i = 0; i < closes.size(); ++i) line[i] = ema_fast[i] - ema_slow[i];
  const auto signal_line = ema(line, sig);
  const auto n = closes.size();
  const double prev = line[n - 2] - signal_line[n - 2];
  const double curr = line[n - 1] - signal_line[n - 1];
  if (prev <= 0.0 && curr > 0.0) return {Action::enter_long, Source::macd, 1.0};
  if (prev >= 0.0 && curr < 0.0) return {Action::enter_short, Source::macd, 1.0};
  return Signal::hold(Source::macd);
}

Signal bollinger_signal(std::span<const double> closes, const IndicatorParams& params) {
  const int period = period_param(params, "bb_period", 20);
  const double k = param(params, "bb_k", 2.0);
  const auto p = static_cast<std::size_t>(period);
  if (closes.size() < p) throw SeriesTooShort(p, closes.size());
  const auto window = closes.last(p);
  double mean = 0.0;
  for (double c : window) mean += c;
  mean /= static_cast<double>(p);
  double var = 0.0;
  for (double c : window) var += (c - mean) * (c - mean);
  const double sd = std::sqrt(var / static_cast<double>(p));
  if (!(sd > 0.0)) return Signal::hold(Source::bollinger);
  const double close = closes.back();
  const double upper = mean + k * sd;
  const double lower = mean - k * sd;
  const double strength = std::min(1.0, std::abs(close - mean) / (k * sd));
  if (close >= upper) return {Action::enter_short, Source::bollinger, strength};
  if (close <= lower) return {Action::enter_long, Source::bollinger, strength};
  return Signal::hold(Source::bollinger);
}

Signal rsi_signal(std::span<const double> closes, const IndicatorParams& params) {
  const int period = period_param(params, "rsi_period", 14);
  const double lower = param(params, "rsi_lower", 30.0);
  const double upper = param(params, "rsi_upper", 70.0);
  const double value = rsi(closes, period);
  if (value < lower) return {Action::enter_long, Source::rsi, (50.0 - value) / 50.0};
  if (value > upper) return {Action::enter_short, Source::rsi, (value - 50.0) / 50.0};
  return Signal::hold(Source::rsi);
}

}  // namespace

std::vector<double> ema(std::span<const double> values, int period) {
  if (period < 1) throw InvalidParameter("period", "must be >= 1");
  std::vector<double> out(values.size());
  if (values.empty()) return out;
  const double alpha = 2.0 / (period + 1.0);
  out[0] = values[0];
  for (std::size_t i = 1; i < values.size(); ++i) out[i] = alpha * values[i] + (1.0 - alpha) * out[i - 1];
  return out;
}

double rsi(std::span<const double> closes, int period) {
  if (period < 1) throw InvalidParameter("rsi_period", "must be >= 1");
  const auto needed = static_cast<std::size_t>(period) + 1;
  if (closes.size() < needed) throw SeriesTooShort(needed, closes.size());
  double gain = 0.0, loss = 0.0;
  for (std::size_t i = 1; i <= static_cast<std::size_t>(period); ++i) {
    const double change = closes[i] - closes[i - 1];
    gain += std::max(change, 0.0);
    loss += std::max(-change, 0.0);
  }
  gain /= period;
  loss /= period;
  for (std::size_t i = needed; i < closes.size(); ++i) {
    const double change = closes[i] - closes[i - 1];
    gain = (gain * (period - 1) + std::max(change, 0.0)) / period;
    loss = (loss * (period - 1) + std::max(-change, 0.0)) / period;
  }
  if (loss == 0.0) return gain == 0.0 ? 50.0 : 100.0;
  return 100.0 - 100.0 / (1.0 + gain / loss);
}

Signal indicator_signal(std::span<const market::Bar> bars, IndicatorKind kind, const IndicatorParams& params) {
  const auto c = market::closes(bars);
  switch (kind) {
    case IndicatorKind::macd: return macd_signal(c, params);
    case IndicatorKind::bollinger: return bollinger_signal(c, params);
    case IndicatorKind::rsi: return rsi_signal(c, params);
  }
  return Signal::hold(Source::macd);
}

Signal indicator_signal(const market::QuoteSeries& series, IndicatorKind kind, const IndicatorParams& params) {
  return indicator_signal(std::span<const market::Bar>(series.bars), kind, params);
}

}  // namespace chaos::decision
