#pragma once

#include <chaos/config.hpp>
#include <chaos/ledger.hpp>
#include <chaos/market_data.hpp>
#include <chaos/report.hpp>

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaos {

using MarketData = std::map<std::string, market::QuoteSeries>;

/// Base-timeframe series per symbol, loaded from the configured files or
/// generated from per-symbol seeds derived from the run seed.
MarketData load_market(const RunConfig& config, const std::filesystem::path& config_dir = {});

struct BacktestResult {
  std::string statement;
  std::string report;
  std::string summary_json;
  std::string journal;      // bar_time,symbol,source,action,strength,state
  std::string allocations;  // bar_time,symbol,fraction,lots
  std::optional<report::SummaryStats> stats;
  ledger::Account account;
  std::vector<double> equity_curve;
  std::size_t bars = 0;
};

/// Bar-by-bar replay: assembly evaluation, coupling, reallocation, orders
/// through the simulated ledger. Deterministic for a fixed config and seed
/// regardless of `config.threads`.
BacktestResult run_backtest(const RunConfig& config, const MarketData& data);

/// statement.txt, report.txt, summary.json, journal.csv, allocations.csv
void write_outputs(const BacktestResult& result, const std::filesystem::path& out_dir);

}  // namespace chaos
