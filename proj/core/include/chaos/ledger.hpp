#pragma once

#include <chaos/market_data.hpp>
#include <chaos/money.hpp>
#include <chaos/timeutil.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaos::ledger {

inline constexpr double kContractSize = 100000.0;

enum class Side { buy, sell, balance };
std::string to_string(Side side);
Side parse_side(const std::string& text);

enum class PlConvention { profit_only, profit_plus_swap };
std::string to_string(PlConvention convention);
PlConvention parse_pl_convention(const std::string& text);

/// One statement row. Open trades leave close_time empty and carry the
/// current market price in close_price.
struct TradeRecord {
  std::int64_t ticket = 0;
  Timestamp open_time = 0;
  std::optional<Timestamp> close_time;
  Side side = Side::buy;
  double lots = 0.0;
  std::string symbol;  // "Deposit" style comment for balance rows
  double open_price = 0.0;
  double close_price = 0.0;
  double sl = 0.0;
  double tp = 0.0;
  Money commission;
  Money taxes;
  Money swap;
  Money profit;

  /// Realized amount under the convention; commission and taxes ride with swap.
  Money net(PlConvention convention) const;
  friend bool operator==(const TradeRecord&, const TradeRecord&) = default;
};

enum class PairKind { usd_quoted, usd_base, cross };
/// Six-letter pair code, base then quote ("gbpusd").
PairKind classify(const std::string& symbol);
std::string base_currency(const std::string& symbol);
std::string quote_currency(const std::string& symbol);
/// Price decimals used in statements: 3 for JPY-quoted pairs, else 5.
int price_digits(const std::string& symbol);

/// Closed profit in USD. USD-quoted: raw; USD-base: raw / close; cross:
/// raw * conversion_rate (quote -> USD). Rounded half away from zero.
Money fill_profit(Side side, double lots, const std::string& symbol, double open_price, double close_price,
                  std::optional<double> conversion_rate = std::nullopt);

struct SymbolTerms {
  double swap_long = 0.0;   // USD per lot per calendar day
  double swap_short = 0.0;
  std::optional<double> conversion_rate;  // quote -> USD fallback for crosses
};

struct LedgerConfig {
  int leverage = 100;
  PlConvention convention = PlConvention::profit_plus_swap;
  Money deposit = Money::from_cents(500000);
  Timestamp deposit_time = 0;
  std::int64_t first_ticket = 100000001;
  std::map<std::string, SymbolTerms> symbols;
};

struct Account {
  Money deposit;
  Money balance;
  Money equity;
  Money margin;
  Money free_margin;
};

struct OrderIntent {
  std::string symbol;
  Side side = Side::buy;
  double lots = 0.0;
  double sl = 0.0;
  double tp = 0.0;
};

enum class CloseReason { signal, stop_loss, take_profit };

/// Simulated broker. Fills at close +/- half spread; S/L is checked before
/// T/P inside a bar; swap accrues per calendar day crossed.
class Ledger {
 public:
  explicit Ledger(LedgerConfig config);

  /// Throws UnknownSymbol, InsufficientMargin, MissingConversionRate.
  std::int64_t open_position(const OrderIntent& intent, const market::Bar& bar, Timestamp now);
  TradeRecord close_position(std::int64_t ticket, const market::Bar& bar, Timestamp now,
                             CloseReason reason = CloseReason::signal);

  /// Records the latest bar of a symbol, fires S/L or T/P for positions
  /// opened before `now`, accrues swap. Returns the positions closed.
  std::vector<TradeRecord> mark_to_market(const std::string& symbol, const market::Bar& bar, Timestamp now);

  /// Swap accrual for all positions up to `now` without price changes.
  void accrue_swap(Timestamp now);

  Account account() const;
  Money floating_pl() const;
  Money margin() const;

  const std::vector<TradeRecord>& closed_trades() const noexcept { return closed_; }
  /// Open positions as statement rows priced at the last known bar.
  std::vector<TradeRecord> open_trades() const;
  std::vector<std::int64_t> open_tickets(const std::string& symbol, std::optional<Side> side = std::nullopt) const;
  TradeRecord deposit_row() const;
  const LedgerConfig& config() const noexcept { return config_; }

  /// USD per unit of quote currency at the last known prices.
  double quote_to_usd(const std::string& symbol) const;
  /// USD per unit of base currency at the last known prices.
  double base_to_usd(const std::string& symbol) const;
  bool has_price(const std::string& symbol) const;

 private:
  struct Position {
    TradeRecord record;
    std::int64_t swap_day = 0;
  };

  const SymbolTerms& terms(const std::string& symbol) const;
  double exit_price(const Position& p, const market::Bar& bar) const;
  Money floating_profit(const Position& p) const;
  Money position_margin(const TradeRecord& r) const;
  std::optional<double> try_quote_to_usd(const std::string& symbol) const;

  LedgerConfig config_;
  std::int64_t next_ticket_;
  Money closed_total_;
  std::vector<Position> open_;
  std::vector<TradeRecord> closed_;
  std::map<std::string, market::Bar> last_bar_;
};

}  // namespace chaos::ledger
