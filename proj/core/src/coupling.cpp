#include <chaos/assembly.hpp>
#include <chaos/errors.hpp>

#include <algorithm>
#include <cmath>

namespace chaos::assembly {

CouplingMatrix CouplingMatrix::identity(std::vector<std::string> symbols) {
  CouplingMatrix m;
  const auto n = symbols.size();
  m.symbols = std::move(symbols);
  m.rho.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1.0;
  return m;
}

std::size_t CouplingMatrix::index_of(const std::string& symbol) const {
  const auto it = std::find(symbols.begin(), symbols.end(), symbol);
  if (it == symbols.end()) throw UnknownSymbol(symbol);
  return static_cast<std::size_t>(it - symbols.begin());
}

CouplingMatrix estimate_coupling(const std::vector<std::string>& symbols,
                                 const std::vector<std::vector<double>>& returns, std::size_t window) {
  if (symbols.size() != returns.size()) throw LengthMismatch(symbols.size(), returns.size());
  if (window < 2) throw InvalidParameter("window", "needs at least 2 returns");
  auto m = CouplingMatrix::identity(symbols);
  m.window = window;
  const auto n = symbols.size();

  std::vector<std::span<const double>> tails(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (returns[i].size() < window) throw SeriesTooShort(window, returns[i].size());
    tails[i] = std::span<const double>(returns[i]).last(window);
  }
  std::vector<double> mean(n, 0.0), sd(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (double r : tails[i]) mean[i] += r;
    mean[i] /= static_cast<double>(window);
    for (double r : tails[i]) sd[i] += (r - mean[i]) * (r - mean[i]);
    sd[i] = std::sqrt(sd[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double c = 0.0;
      if (sd[i] > 0.0 && sd[j] > 0.0) {
        for (std::size_t t = 0; t < window; ++t) c += (tails[i][t] - mean[i]) * (tails[j][t] - mean[j]);
        c = std::clamp(c / (sd[i] * sd[j]), -1.0, 1.0);
      }
      m.at(i, j) = c;
      m.at(j, i) = c;
    }
  }
  return m;
}

ScoreMap couple(const ScoreMap& raw_scores, const CouplingMatrix& rho, double kappa) {
  std::vector<std::size_t> idx;
  idx.reserve(raw_scores.size());
  for (const auto& [symbol, score] : raw_scores) idx.push_back(rho.index_of(symbol));
  const auto n = raw_scores.size();
  if (n <= 1) return raw_scores;

  ScoreMap out;
  std::size_t a = 0;
  for (const auto& [symbol, raw] : raw_scores) {
    double pull = 0.0;
    std::size_t b = 0;
    for (const auto& [other, raw_b] : raw_scores) {
      if (b != a) pull += rho.at(idx[a], idx[b]) * raw_b;
      ++b;
    }
    out[symbol] = std::clamp(raw + kappa * pull / static_cast<double>(n - 1), -1.0, 1.0);
    ++a;
  }
  return out;
}

std::string to_string(UnitStateKind state) {
  switch (state) {
    case UnitStateKind::active: return "active";
    case UnitStateKind::semi_active: return "semi_active";
    case UnitStateKind::passive: return "passive";
  }
  return "unknown";
}

UnitState update_state(const UnitState& current, std::span<const int> predicted, std::span<const int> realized,
                       const StateThresholds& thresholds) {
  if (predicted.size() != realized.size()) throw LengthMismatch(predicted.size(), realized.size());
  std::size_t calls = 0, hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    if (predicted[i] == 0) continue;
    ++calls;
    hits += (predicted[i] > 0) == (realized[i] > 0) && realized[i] != 0;
  }
  UnitState next = current;
  next.window = predicted.size();
  if (calls == 0) return next;
  next.hit_rate = static_cast<double>(hits) / static_cast<double>(calls);
  if (next.hit_rate >= thresholds.q_hi) next.state = UnitStateKind::active;
  else if (next.hit_rate <= thresholds.q_lo) next.state = UnitStateKind::passive;
  else next.state = UnitStateKind::semi_active;
  return next;
}

std::vector<int> vertical_feedback(std::span<const decision::Signal> decision_history, int depth) {
  if (depth <= 0) return {};
  std::vector<int> out;
  out.reserve(decision_history.size());
  for (const auto& s : decision_history) out.push_back(decision::direction(s.action));
  return out;
}

namespace {

uint128 checked_mul(uint128 a, uint128 b) {
  uint128 r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw Overflow("capacity exceeds 128 bits");
  return r;
}

uint128 factorial(int n) {
  uint128 r = 1;
  for (int i = 2; i <= n; ++i) r = checked_mul(r, static_cast<uint128>(i));
  return r;
}

}  // namespace

uint128 capacity(int units, int pairs, int nesting) {
  if (units < 1) throw InvalidParameter("M", "must be >= 1");
  if (pairs < 1) throw InvalidParameter("N", "must be >= 1");
  if (nesting < 0) throw InvalidParameter("K", "must be >= 0");
  const auto base = checked_mul(factorial(units), factorial(pairs));
  uint128 r = 1;
  for (int k = 0; k <= nesting; ++k) r = checked_mul(r, base);
  return r;
}

std::string to_string(uint128 value) {
  if (value == 0) return "0";
  std::string digits;
  while (value > 0) {
    digits.push_back(static_cast<char>('0' + static_cast<int>(value % 10)));
    value /= 10;
  }
  return {digits.rbegin(), digits.rend()};
}

}  // namespace chaos::assembly
