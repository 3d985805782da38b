#pragma once

#include <chaos/timeutil.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace chaos::market {

struct Bar {
  Timestamp timestamp = 0;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  double spread = 0.0;

  bool valid() const noexcept;
  friend bool operator==(const Bar&, const Bar&) = default;
};

/// Time-ascending bars of one symbol at one timeframe.
struct QuoteSeries {
  std::string symbol;
  int timeframe = 0;  // minutes
  std::vector<Bar> bars;

  std::size_t size() const noexcept { return bars.size(); }
  bool empty() const noexcept { return bars.empty(); }
  std::vector<double> closes() const;

  friend bool operator==(const QuoteSeries&, const QuoteSeries&) = default;
};

std::vector<double> closes(std::span<const Bar> bars);

/// Reads the `timestamp,open,high,low,close,spread` CSV layout. Every
/// malformed row is an error; nothing is skipped.
QuoteSeries load_history(const std::filesystem::path& path, const std::string& symbol, int timeframe);
QuoteSeries read_history(std::istream& in, const std::string& symbol, int timeframe);

void write_history(std::ostream& out, const QuoteSeries& series);
void save_history(const std::filesystem::path& path, const QuoteSeries& series);

/// Aggregates `factor` consecutive bars; a trailing incomplete group is dropped.
QuoteSeries resample(const QuoteSeries& series, int factor);

enum class SyntheticKind { wiener, ornstein_uhlenbeck, gbm, logistic_map, lorenz_x };

SyntheticKind parse_synthetic_kind(const std::string& name);
std::string to_string(SyntheticKind kind);

/// Recognised parameter names: theta, sigma, mu, r, dt, y0, spread.
/// Missing names take kind-specific defaults (see generate()).
struct SyntheticSpec {
  SyntheticKind kind = SyntheticKind::wiener;
  std::map<std::string, double> parameters;
  std::size_t length = 0;
  std::uint64_t seed = 0;
  std::string symbol = "synthetic";
  int timeframe = 5;
  Timestamp start = 1303948800;  // 2011-04-28 00:00 UTC

  double param(const std::string& name, double fallback) const;
};

/// Deterministic for a fixed seed. SDE kinds use Euler-Maruyama:
///   wiener:             dY = mu dt + sigma dW
///   ornstein_uhlenbeck: dY = theta (mu - Y) dt + sigma dW   (mu defaults to 0)
///   gbm:                dS = mu S dt + sigma S dW
///   logistic_map:       x <- r x (1 - x)
///   lorenz_x:           x of the classical Lorenz system (10, 28, 8/3), RK4 with step dt
/// The path becomes bar closes; open is the previous close and high/low
/// bracket the pair.
QuoteSeries generate(const SyntheticSpec& spec);

}  // namespace chaos::market
