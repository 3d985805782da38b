#pragma once

#include <map>
#include <span>
#include <string>

namespace chaos::portfolio {

/// Capital fractions n_i per symbol plus an uninvested reserve; sums to 1.
struct Allocation {
  std::map<std::string, double> fractions;
  double reserve = 1.0;

  double total() const;
  double fraction(const std::string& symbol) const;
};

struct EffectivenessRecord {
  std::string symbol;
  int timeframe = 0;
  double window_pl = 0.0;
  double pl_std = 0.0;
  std::size_t trade_count = 0;
};

/// score = window_pl - lambda_risk * pl_std, clipped at 0; fractions are
/// proportional to scores and then lifted to `floor` (mass taken
/// proportionally from the rest). All scores <= 0 puts everything in reserve.
/// Records sharing a symbol (several timeframes) add their fractions.
Allocation reallocate(std::span<const EffectivenessRecord> records, double lambda_risk = 1.0, double floor = 0.0);

/// Equal split over `symbols`, no reserve.
Allocation equal_allocation(std::span<const std::string> symbols);

/// lots_i = floor_0.01(n_i * equity * leverage / (lot_size * price_i)).
/// `prices` are the account-currency value of one base unit.
std::map<std::string, double> enforce_margin(const Allocation& allocation, double equity, int leverage,
                                             const std::map<std::string, double>& prices, int lot_size = 100000);

}  // namespace chaos::portfolio
