#include <chaos/errors.hpp>
#include <chaos/portfolio.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace chaos::portfolio {

double Allocation::total() const {
  double t = reserve;
  for (const auto& [s, f] : fractions) t += f;
  return t;
}

double Allocation::fraction(const std::string& symbol) const {
  const auto it = fractions.find(symbol);
  return it == fractions.end() ? 0.0 : it->second;
}

namespace {

// Proportional weights lifted to `floor`: pinned entries sit at the floor,
// the free ones share the remaining mass in proportion to their scores.
std::vector<double> lift_to_floor(const std::vector<double>& scores, double floor) {
  const auto n = scores.size();
  std::vector<bool> pinned(n, false);
  std::vector<double> f(n, 0.0);
  for (;;) {
    double free_score = 0.0;
    std::size_t n_pinned = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) ++n_pinned;
      else free_score += scores[i];
    }
    const double mass = 1.0 - floor * static_cast<double>(n_pinned);
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (pinned[i]) {
        f[i] = floor;
        continue;
      }
      f[i] = free_score > 0.0 ? mass * scores[i] / free_score : 0.0;
      if (f[i] < floor) {
        pinned[i] = true;
        changed = true;
      }
    }
    if (!changed) break;
  }
  return f;
}

}  // namespace

Allocation reallocate(std::span<const EffectivenessRecord> records, double lambda_risk, double floor) {
  if (records.empty()) throw EmptyRecords();
  if (!(lambda_risk >= 0.0)) throw InvalidParameter("lambda_risk", "must be >= 0");
  if (!(floor >= 0.0)) throw InvalidParameter("floor", "must be >= 0");
  if (floor * static_cast<double>(records.size()) > 1.0 + 1e-12) throw InfeasibleFloor(floor, records.size());
  for (const auto& r : records)
    if (!(r.pl_std >= 0.0)) throw InvalidParameter("pl_std", "must be >= 0");

  std::vector<double> scores;
  scores.reserve(records.size());
  for (const auto& r : records) scores.push_back(std::max(0.0, r.window_pl - lambda_risk * r.pl_std));

  Allocation out;
  for (const auto& r : records) out.fractions[r.symbol] = 0.0;
  if (std::all_of(scores.begin(), scores.end(), [](double s) { return s <= 0.0; })) {
    out.reserve = 1.0;
    return out;
  }

  const auto f = lift_to_floor(scores, floor);
  for (std::size_t i = 0; i < records.size(); ++i) out.fractions[records[i].symbol] += f[i];
  double sum = 0.0;
  for (const auto& [s, v] : out.fractions) sum += v;
  out.reserve = std::max(0.0, 1.0 - sum);
  return out;
}

Allocation equal_allocation(std::span<const std::string> symbols) {
  Allocation out;
  if (symbols.empty()) return out;
  for (const auto& s : symbols) out.fractions[s] = 1.0 / static_cast<double>(symbols.size());
  out.reserve = 0.0;
  return out;
}

std::map<std::string, double> enforce_margin(const Allocation& allocation, double equity, int leverage,
                                             const std::map<std::string, double>& prices, int lot_size) {
  if (!(equity > 0.0)) throw InvalidParameter("equity", "must be > 0");
  if (leverage < 1) throw InvalidParameter("leverage", "must be >= 1");
  if (lot_size < 1) throw InvalidParameter("lot_size", "must be >= 1");
  std::map<std::string, double> lots;
  for (const auto& [symbol, n] : allocation.fractions) {
    if (n <= 0.0) {
      lots[symbol] = 0.0;
      continue;
    }
    const auto it = prices.find(symbol);
    if (it == prices.end()) throw UnknownSymbol(symbol);
    if (!(it->second > 0.0)) throw InvalidParameter("price", "must be > 0");
    const double raw = n * equity * leverage / (static_cast<double>(lot_size) * it->second);
    // The epsilon keeps exact hundredths like 0.29 from flooring to 0.28.
    lots[symbol] = std::floor(raw * 100.0 + 1e-9) / 100.0;
  }
  return lots;
}

}  // namespace chaos::portfolio
