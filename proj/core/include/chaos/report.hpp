#pragma once

#include <chaos/ledger.hpp>
#include <chaos/money.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace chaos::report {

/// Contents of a statement file in the closed/open-trades layout.
struct Statement {
  std::vector<ledger::TradeRecord> balance_rows;
  std::vector<ledger::TradeRecord> closed;  // file order
  std::vector<ledger::TradeRecord> open;    // file order
  Money deposit;                            // sum of balance rows
  std::optional<Money> margin;              // "Margin:" from the Summary block, when present
};

Statement parse_statement(const std::filesystem::path& path);
Statement parse_statement(std::istream& in);

struct SummaryStats {
  ledger::PlConvention convention = ledger::PlConvention::profit_plus_swap;
  Money deposit;
  Money closed_pl;
  Money floating_pl;
  Money balance;
  Money equity;
  Money margin;
  Money free_margin;
  Money gross_profit;
  Money gross_loss;  // positive magnitude
  Money net_profit;
  std::optional<double> profit_factor;  // empty when gross_loss == 0
  double expected_payoff = 0.0;
  Money absolute_drawdown;
  Money maximal_drawdown;
  double maximal_drawdown_percent = 0.0;
  double relative_drawdown_percent = 0.0;
  Money relative_drawdown;
  std::size_t total_trades = 0;
  std::size_t short_count = 0;
  double short_won_percent = 0.0;
  std::size_t long_count = 0;
  double long_won_percent = 0.0;
  std::size_t profit_trades = 0;
  double profit_trades_percent = 0.0;
  std::size_t loss_trades = 0;
  double loss_trades_percent = 0.0;
  Money largest_profit;
  Money largest_loss;  // signed, <= 0
  Money average_profit;
  Money average_loss;  // signed, <= 0
  std::size_t max_consecutive_wins = 0;
  Money max_consecutive_wins_amount;
  std::size_t max_consecutive_losses = 0;
  Money max_consecutive_losses_amount;
  Money max_consecutive_profit;
  std::size_t max_consecutive_profit_count = 0;
  Money max_consecutive_loss;
  std::size_t max_consecutive_loss_count = 0;
  std::size_t average_consecutive_wins = 0;
  std::size_t average_consecutive_losses = 0;
};

/// Statement statistics. Trades are ordered by (close_time, ticket); a
/// trade whose net amount is >= 0 counts as a profit trade. Balance rows
/// never count as trades. `margin` defaults to 0 when unknown.
SummaryStats summarize(const std::vector<ledger::TradeRecord>& closed, const std::vector<ledger::TradeRecord>& open,
                       Money deposit, ledger::PlConvention convention, Money margin = {});

SummaryStats summarize(const Statement& statement, ledger::PlConvention convention);

/// The convention whose closed P/L matches the statement's "Closed P/L"
/// line, or profit_plus_swap when the line is absent or neither matches.
ledger::PlConvention detect_convention(const std::filesystem::path& path);

/// Summary and Details blocks in statement layout.
std::string render_summary(const SummaryStats& stats);

/// Text report: one header line naming the P/L convention, then the
/// Summary and Details blocks. Throws NoTrades for an empty statement.
std::string render_report(const SummaryStats& stats);

/// Full statement: closed trades, open trades, working orders, summary.
std::string render_statement(const Statement& statement, const SummaryStats& stats);

/// Flat JSON object, decimal values as strings.
std::string to_json(const SummaryStats& stats);

/// Collapses whitespace runs and drops blank lines; used for roundtrip checks.
std::string normalize_whitespace(const std::string& text);

}  // namespace chaos::report
