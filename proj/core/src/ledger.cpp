#include <chaos/errors.hpp>
#include <chaos/ledger.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>

namespace chaos::ledger {

std::string to_string(Side side) {
  switch (side) {
    case Side::buy: return "buy";
    case Side::sell: return "sell";
    case Side::balance: return "balance";
  }
  return "unknown";
}

Side parse_side(const std::string& text) {
  if (text == "buy") return Side::buy;
  if (text == "sell") return Side::sell;
  if (text == "balance") return Side::balance;
  throw std::invalid_argument("unknown trade type: " + text);
}

std::string to_string(PlConvention convention) {
  return convention == PlConvention::profit_only ? "profit_only" : "profit_plus_swap";
}

PlConvention parse_pl_convention(const std::string& text) {
  if (text == "profit_only") return PlConvention::profit_only;
  if (text == "profit_plus_swap") return PlConvention::profit_plus_swap;
  throw InvalidParameter("pl_convention", "expected profit_only or profit_plus_swap, got '" + text + "'");
}

Money TradeRecord::net(PlConvention convention) const {
  if (convention == PlConvention::profit_only) return profit;
  return profit + swap + commission + taxes;
}

namespace {

std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

void require_pair(const std::string& symbol) {
  if (symbol.size() != 6) throw UnknownSymbol(symbol);
}

}  // namespace

std::string base_currency(const std::string& symbol) {
  require_pair(symbol);
  return lower(symbol.substr(0, 3));
}

std::string quote_currency(const std::string& symbol) {
  require_pair(symbol);
  return lower(symbol.substr(3, 3));
}

PairKind classify(const std::string& symbol) {
  if (quote_currency(symbol) == "usd") return PairKind::usd_quoted;
  if (base_currency(symbol) == "usd") return PairKind::usd_base;
  return PairKind::cross;
}

int price_digits(const std::string& symbol) { return quote_currency(symbol) == "jpy" ? 3 : 5; }

Money fill_profit(Side side, double lots, const std::string& symbol, double open_price, double close_price,
                  std::optional<double> conversion_rate) {
  if (side == Side::balance) throw InvalidParameter("side", "balance rows carry no fill profit");
  if (!(open_price > 0.0) || !(close_price > 0.0)) throw InvalidParameter("price", "must be > 0");
  // Quote-currency cents are exactly points(1e-5) times lots in hundredths.
  const auto points = std::llround((close_price - open_price) * 1e5);
  const auto hundredths = std::llround(lots * 100.0);
  const std::int64_t raw_cents = (side == Side::buy ? points : -points) * hundredths;
  switch (classify(symbol)) {
    case PairKind::usd_quoted: return Money::from_cents(raw_cents);
    case PairKind::usd_base:
      return Money::from_cents(static_cast<std::int64_t>(round_half_away(static_cast<double>(raw_cents) / close_price, 0)));
    case PairKind::cross:
      if (!conversion_rate || !(*conversion_rate > 0.0)) throw MissingConversionRate(symbol);
      return Money::from_cents(static_cast<std::int64_t>(round_half_away(static_cast<double>(raw_cents) * *conversion_rate, 0)));
  }
  return {};
}

Ledger::Ledger(LedgerConfig config) : config_(std::move(config)), next_ticket_(config_.first_ticket + 1) {
  if (config_.leverage < 1) throw InvalidParameter("leverage", "must be >= 1");
}

const SymbolTerms& Ledger::terms(const std::string& symbol) const {
  const auto it = config_.symbols.find(symbol);
  if (it == config_.symbols.end()) throw UnknownSymbol(symbol);
  return it->second;
}

bool Ledger::has_price(const std::string& symbol) const { return last_bar_.count(symbol) != 0; }

std::optional<double> Ledger::try_quote_to_usd(const std::string& symbol) const {
  const auto quote = quote_currency(symbol);
  if (quote == "usd") return 1.0;
  if (base_currency(symbol) == "usd") {
    const auto it = last_bar_.find(symbol);
    if (it == last_bar_.end()) return std::nullopt;
    return 1.0 / it->second.close;
  }
  if (const auto it = last_bar_.find(quote + "usd"); it != last_bar_.end()) return it->second.close;
  if (const auto it = last_bar_.find("usd" + quote); it != last_bar_.end()) return 1.0 / it->second.close;
  if (const auto it = config_.symbols.find(symbol); it != config_.symbols.end()) return it->second.conversion_rate;
  return std::nullopt;
}

double Ledger::quote_to_usd(const std::string& symbol) const {
  const auto r = try_quote_to_usd(symbol);
  if (!r) throw MissingConversionRate(symbol);
  return *r;
}

double Ledger::base_to_usd(const std::string& symbol) const {
  if (base_currency(symbol) == "usd") return 1.0;
  const auto it = last_bar_.find(symbol);
  if (it == last_bar_.end()) throw MissingConversionRate(symbol);
  return it->second.close * quote_to_usd(symbol);
}

namespace {

double bid(const market::Bar& bar, double price) { return price - bar.spread / 2.0; }
double ask(const market::Bar& bar, double price) { return price + bar.spread / 2.0; }

}  // namespace

double Ledger::exit_price(const Position& p, const market::Bar& bar) const {
  const auto digits = price_digits(p.record.symbol);
  const double px = p.record.side == Side::buy ? bid(bar, bar.close) : ask(bar, bar.close);
  return round_half_away(px, digits);
}

Money Ledger::position_margin(const TradeRecord& r) const {
  return Money::from_double(r.lots * kContractSize * base_to_usd(r.symbol) / config_.leverage);
}

Money Ledger::floating_profit(const Position& p) const {
  const auto it = last_bar_.find(p.record.symbol);
  if (it == last_bar_.end()) return p.record.swap;
  const double px = exit_price(p, it->second);
  std::optional<double> rate;
  if (classify(p.record.symbol) == PairKind::cross) rate = quote_to_usd(p.record.symbol);
  return fill_profit(p.record.side, p.record.lots, p.record.symbol, p.record.open_price, px, rate) + p.record.swap +
         p.record.commission + p.record.taxes;
}

std::int64_t Ledger::open_position(const OrderIntent& intent, const market::Bar& bar, Timestamp now) {
  terms(intent.symbol);
  if (intent.side == Side::balance) throw InvalidParameter("side", "orders are buy or sell");
  const double lots = std::round(intent.lots * 100.0) / 100.0;
  if (!(lots > 0.0)) throw InvalidParameter("lots", "must be >= 0.01");
  last_bar_[intent.symbol] = bar;

  TradeRecord r;
  r.ticket = next_ticket_;
  r.open_time = now;
  r.side = intent.side;
  r.lots = lots;
  r.symbol = intent.symbol;
  const auto digits = price_digits(intent.symbol);
  r.open_price = round_half_away(intent.side == Side::buy ? ask(bar, bar.close) : bid(bar, bar.close), digits);
  r.sl = intent.sl > 0.0 ? round_half_away(intent.sl, digits) : 0.0;
  r.tp = intent.tp > 0.0 ? round_half_away(intent.tp, digits) : 0.0;

  const auto acct = account();
  const auto required = acct.margin + position_margin(r);
  if (required > acct.equity) throw InsufficientMargin(required.value(), acct.equity.value());

  ++next_ticket_;
  open_.push_back({r, day_index(now)});
  return r.ticket;
}

TradeRecord Ledger::close_position(std::int64_t ticket, const market::Bar& bar, Timestamp now, CloseReason reason) {
  const auto it = std::find_if(open_.begin(), open_.end(), [&](const Position& p) { return p.record.ticket == ticket; });
  if (it == open_.end()) throw InvalidParameter("ticket", "no open position " + std::to_string(ticket));
  last_bar_[it->record.symbol] = bar;

  Position p = *it;
  const auto& t = terms(p.record.symbol);
  const auto day = day_index(now);
  if (day > p.swap_day) {
    const double rate = p.record.side == Side::buy ? t.swap_long : t.swap_short;
    p.record.swap += Money::from_double(static_cast<double>(day - p.swap_day) * rate * p.record.lots);
    p.swap_day = day;
  }

  double px = exit_price(p, bar);
  if (reason == CloseReason::stop_loss) px = p.record.sl;
  if (reason == CloseReason::take_profit) px = p.record.tp;
  std::optional<double> rate;
  if (classify(p.record.symbol) == PairKind::cross) rate = quote_to_usd(p.record.symbol);

  TradeRecord r = p.record;
  r.close_time = std::max(now, r.open_time);
  r.close_price = px;
  r.profit = fill_profit(r.side, r.lots, r.symbol, r.open_price, px, rate);
  closed_total_ += r.net(config_.convention);
  closed_.push_back(r);
  open_.erase(it);
  return r;
}

void Ledger::accrue_swap(Timestamp now) {
  const auto day = day_index(now);
  for (auto& p : open_) {
    if (day <= p.swap_day) continue;
    const auto& t = terms(p.record.symbol);
    const double rate = p.record.side == Side::buy ? t.swap_long : t.swap_short;
    p.record.swap += Money::from_double(static_cast<double>(day - p.swap_day) * rate * p.record.lots);
    p.swap_day = day;
  }
}

std::vector<TradeRecord> Ledger::mark_to_market(const std::string& symbol, const market::Bar& bar, Timestamp now) {
  terms(symbol);
  last_bar_[symbol] = bar;
  std::vector<std::pair<std::int64_t, CloseReason>> hits;
  for (const auto& p : open_) {
    const auto& r = p.record;
    if (r.symbol != symbol || r.open_time >= now) continue;
    // Pessimistic: the stop is tested first.
    if (r.side == Side::buy) {
      if (r.sl > 0.0 && bid(bar, bar.low) <= r.sl) hits.emplace_back(r.ticket, CloseReason::stop_loss);
      else if (r.tp > 0.0 && bid(bar, bar.high) >= r.tp) hits.emplace_back(r.ticket, CloseReason::take_profit);
    } else {
      if (r.sl > 0.0 && ask(bar, bar.high) >= r.sl) hits.emplace_back(r.ticket, CloseReason::stop_loss);
      else if (r.tp > 0.0 && ask(bar, bar.low) <= r.tp) hits.emplace_back(r.ticket, CloseReason::take_profit);
    }
  }
  std::vector<TradeRecord> closed;
  for (const auto& [ticket, reason] : hits) closed.push_back(close_position(ticket, bar, now, reason));
  accrue_swap(now);
  return closed;
}

Money Ledger::floating_pl() const {
  Money total;
  for (const auto& p : open_) total += floating_profit(p);
  return total;
}

Money Ledger::margin() const {
  Money total;
  for (const auto& p : open_) total += position_margin(p.record);
  return total;
}

Account Ledger::account() const {
  Account a;
  a.deposit = config_.deposit;
  a.balance = config_.deposit + closed_total_;
  a.equity = a.balance + floating_pl();
  a.margin = margin();
  a.free_margin = a.equity - a.margin;
  return a;
}

std::vector<TradeRecord> Ledger::open_trades() const {
  std::vector<TradeRecord> out;
  for (const auto& p : open_) {
    TradeRecord r = p.record;
    const auto it = last_bar_.find(r.symbol);
    if (it != last_bar_.end()) {
      r.close_price = exit_price(p, it->second);
      std::optional<double> rate;
      if (classify(r.symbol) == PairKind::cross) rate = quote_to_usd(r.symbol);
      r.profit = fill_profit(r.side, r.lots, r.symbol, r.open_price, r.close_price, rate);
    }
    out.push_back(r);
  }
  return out;
}

std::vector<std::int64_t> Ledger::open_tickets(const std::string& symbol, std::optional<Side> side) const {
  std::vector<std::int64_t> out;
  for (const auto& p : open_)
    if (p.record.symbol == symbol && (!side || p.record.side == *side)) out.push_back(p.record.ticket);
  return out;
}

TradeRecord Ledger::deposit_row() const {
  TradeRecord r;
  r.ticket = config_.first_ticket;
  r.open_time = config_.deposit_time;
  r.side = Side::balance;
  r.symbol = "Deposit";
  r.profit = config_.deposit;
  return r;
}

}  // namespace chaos::ledger
