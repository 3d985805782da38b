#include <chaos/errors.hpp>
#include <chaos/market_data.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace chaos::market {

bool Bar::valid() const noexcept {
  return std::isfinite(open) && std::isfinite(high) && std::isfinite(low) && std::isfinite(close) &&
         std::isfinite(spread) && low <= std::min(open, close) && high >= std::max(open, close) && spread >= 0.0;
}

std::vector<double> closes(std::span<const Bar> bars) {
  std::vector<double> out;
  out.reserve(bars.size());
  for (const auto& b : bars) out.push_back(b.close);
  return out;
}

std::vector<double> QuoteSeries::closes() const { return market::closes(bars); }

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

template <typename T>
T parse_field(std::string_view field, std::size_t row, const char* name) {
  field = trim(field);
  T value{};
  const auto* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, value);
  if (ec != std::errc{} || ptr != end || field.empty()) {
    throw ParseError(row, fmt::format("column '{}' is not a number: '{}'", name, field));
  }
  return value;
}

}  // namespace

QuoteSeries read_history(std::istream& in, const std::string& symbol, int timeframe) {
  if (timeframe <= 0) throw InvalidParameter("timeframe", "must be positive");
  std::string line;
  if (!std::getline(in, line)) throw ParseError(0, "missing header");
  static constexpr std::string_view kHeader = "timestamp,open,high,low,close,spread";
  if (trim(line) != kHeader) throw ParseError(0, fmt::format("expected header '{}'", kHeader));

  QuoteSeries series{symbol, timeframe, {}};
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    const auto text = trim(line);
    if (text.empty()) throw ParseError(row, "empty row");
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
      const auto comma = text.find(',', start);
      fields.push_back(text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (fields.size() != 6) throw ParseError(row, fmt::format("expected 6 columns, got {}", fields.size()));
    Bar bar;
    bar.timestamp = parse_field<std::int64_t>(fields[0], row, "timestamp");
    bar.open = parse_field<double>(fields[1], row, "open");
    bar.high = parse_field<double>(fields[2], row, "high");
    bar.low = parse_field<double>(fields[3], row, "low");
    bar.close = parse_field<double>(fields[4], row, "close");
    bar.spread = parse_field<double>(fields[5], row, "spread");
    if (!bar.valid()) throw ParseError(row, "bar violates low <= open,close <= high or spread >= 0");
    if (!series.bars.empty() && bar.timestamp <= series.bars.back().timestamp) throw NonMonotonicTimestamps(row);
    series.bars.push_back(bar);
  }
  return series;
}

QuoteSeries load_history(const std::filesystem::path& path, const std::string& symbol, int timeframe) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return read_history(in, symbol, timeframe);
}

void write_history(std::ostream& out, const QuoteSeries& series) {
  out << "timestamp,open,high,low,close,spread\n";
  for (const auto& b : series.bars) {
    out << fmt::format("{},{:.5f},{:.5f},{:.5f},{:.5f},{:.5f}\n", b.timestamp, b.open, b.high, b.low, b.close, b.spread);
  }
}

void save_history(const std::filesystem::path& path, const QuoteSeries& series) {
  std::ofstream out(path);
  if (!out) throw FileNotFound(path.string());
  write_history(out, series);
}

QuoteSeries resample(const QuoteSeries& series, int factor) {
  if (factor < 2) throw InvalidParameter("factor", "must be >= 2");
  if (series.empty()) throw EmptySeries();
  QuoteSeries out{series.symbol, series.timeframe * factor, {}};
  const auto groups = series.size() / static_cast<std::size_t>(factor);
  out.bars.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const auto first = series.bars.begin() + static_cast<std::ptrdiff_t>(g * static_cast<std::size_t>(factor));
    const auto last = first + factor;
    Bar bar = *first;
    bar.close = (last - 1)->close;
    bar.spread = (last - 1)->spread;
    for (auto it = first; it != last; ++it) {
      bar.high = std::max(bar.high, it->high);
      bar.low = std::min(bar.low, it->low);
    }
    out.bars.push_back(bar);
  }
  return out;
}

SyntheticKind parse_synthetic_kind(const std::string& name) {
  if (name == "wiener") return SyntheticKind::wiener;
  if (name == "ornstein_uhlenbeck" || name == "ou") return SyntheticKind::ornstein_uhlenbeck;
  if (name == "gbm") return SyntheticKind::gbm;
  if (name == "logistic_map" || name == "logistic") return SyntheticKind::logistic_map;
  if (name == "lorenz_x" || name == "lorenz") return SyntheticKind::lorenz_x;
  throw InvalidParameter("kind", "unknown synthetic kind '" + name + "'");
}

std::string to_string(SyntheticKind kind) {
  switch (kind) {
    case SyntheticKind::wiener: return "wiener";
    case SyntheticKind::ornstein_uhlenbeck: return "ornstein_uhlenbeck";
    case SyntheticKind::gbm: return "gbm";
    case SyntheticKind::logistic_map: return "logistic_map";
    case SyntheticKind::lorenz_x: return "lorenz_x";
  }
  return "?";
}

double SyntheticSpec::param(const std::string& name, double fallback) const {
  const auto it = parameters.find(name);
  return it == parameters.end() ? fallback : it->second;
}

namespace {

struct LorenzState {
  double x, y, z;
};

LorenzState lorenz_rhs(const LorenzState& s) {
  constexpr double sigma = 10.0, rho = 28.0, beta = 8.0 / 3.0;
  return {sigma * (s.y - s.x), s.x * (rho - s.z) - s.y, s.x * s.y - beta * s.z};
}

LorenzState rk4_step(const LorenzState& s, double h) {
  auto axpy = [](const LorenzState& a, const LorenzState& k, double c) {
    return LorenzState{a.x + c * k.x, a.y + c * k.y, a.z + c * k.z};
  };
  const auto k1 = lorenz_rhs(s);
  const auto k2 = lorenz_rhs(axpy(s, k1, h / 2));
  const auto k3 = lorenz_rhs(axpy(s, k2, h / 2));
  const auto k4 = lorenz_rhs(axpy(s, k3, h));
  return {s.x + h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x), s.y + h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y),
          s.z + h / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z)};
}

}  // namespace

QuoteSeries generate(const SyntheticSpec& spec) {
  static const char* const kKnown[] = {"theta", "sigma", "mu", "r", "dt", "y0", "spread"};
  for (const auto& [name, value] : spec.parameters) {
    if (std::find(std::begin(kKnown), std::end(kKnown), name) == std::end(kKnown)) {
      throw InvalidParameter(name, "unrecognised synthetic parameter");
    }
    if (!std::isfinite(value)) throw InvalidParameter(name, "must be finite");
  }
  if (spec.length < 2) throw InvalidParameter("length", "must be >= 2");
  if (spec.timeframe <= 0) throw InvalidParameter("timeframe", "must be positive");

  const double dt = spec.param("dt", spec.kind == SyntheticKind::lorenz_x ? 0.01 : 1.0);
  const double sigma = spec.param("sigma", 0.0);
  const double mu = spec.param("mu", 0.0);
  const double spread = spec.param("spread", 0.0);
  if (!(dt > 0.0)) throw InvalidParameter("dt", "must be > 0");
  if (sigma < 0.0) throw InvalidParameter("sigma", "must be >= 0");
  if (spread < 0.0) throw InvalidParameter("spread", "must be >= 0");

  std::vector<double> path(spec.length);
  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sqdt = std::sqrt(dt);

  switch (spec.kind) {
    case SyntheticKind::wiener: {
      path[0] = spec.param("y0", 0.0);
      for (std::size_t i = 1; i < path.size(); ++i) path[i] = path[i - 1] + mu * dt + sigma * sqdt * normal(rng);
      break;
    }
    case SyntheticKind::ornstein_uhlenbeck: {
      const double theta = spec.param("theta", 1.0);
      if (theta < 0.0) throw InvalidParameter("theta", "must be >= 0");
      path[0] = spec.param("y0", mu);
      for (std::size_t i = 1; i < path.size(); ++i) {
        path[i] = path[i - 1] + theta * (mu - path[i - 1]) * dt + sigma * sqdt * normal(rng);
      }
      break;
    }
    case SyntheticKind::gbm: {
      path[0] = spec.param("y0", 1.0);
      if (!(path[0] > 0.0)) throw InvalidParameter("y0", "gbm needs a positive start");
      for (std::size_t i = 1; i < path.size(); ++i) {
        path[i] = path[i - 1] + mu * path[i - 1] * dt + sigma * path[i - 1] * sqdt * normal(rng);
      }
      break;
    }
    case SyntheticKind::logistic_map: {
      const double r = spec.param("r", 4.0);
      if (!(r > 0.0 && r <= 4.0)) throw InvalidParameter("r", "must lie in (0, 4]");
      path[0] = spec.param("y0", 0.3);
      if (path[0] < 0.0 || path[0] > 1.0) throw InvalidParameter("y0", "logistic start must lie in [0, 1]");
      for (std::size_t i = 1; i < path.size(); ++i) path[i] = r * path[i - 1] * (1.0 - path[i - 1]);
      break;
    }
    case SyntheticKind::lorenz_x: {
      LorenzState s{spec.param("y0", 1.0), 1.0, 1.0};
      path[0] = s.x;
      for (std::size_t i = 1; i < path.size(); ++i) {
        s = rk4_step(s, dt);
        path[i] = s.x;
      }
      break;
    }
  }

  QuoteSeries out{spec.symbol, spec.timeframe, {}};
  out.bars.reserve(path.size());
  const Timestamp step = static_cast<Timestamp>(spec.timeframe) * 60;
  for (std::size_t i = 0; i < path.size(); ++i) {
    const double prev = i == 0 ? path[0] : path[i - 1];
    out.bars.push_back(Bar{spec.start + static_cast<Timestamp>(i) * step, prev, std::max(prev, path[i]),
                           std::min(prev, path[i]), path[i], spread});
  }
  return out;
}

}  // namespace chaos::market
