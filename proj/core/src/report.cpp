#include <chaos/errors.hpp>
#include <chaos/report.hpp>

#include <fmt/format.h>
#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <regex>

namespace chaos::report {

using ledger::PlConvention;
using ledger::Side;
using ledger::TradeRecord;

namespace {

double pct(std::size_t part, std::size_t whole) {
  return whole == 0 ? 0.0 : round_half_away(100.0 * static_cast<double>(part) / static_cast<double>(whole), 2);
}

Money ratio(Money amount, std::size_t count) {
  return count == 0 ? Money{} : Money::from_double(amount.value() / static_cast<double>(count));
}

struct Streak {
  bool win = true;
  std::size_t count = 0;
  Money amount;
};

}  // namespace

SummaryStats summarize(const std::vector<TradeRecord>& closed_in, const std::vector<TradeRecord>& open, Money deposit,
                       PlConvention convention, Money margin) {
  std::vector<TradeRecord> closed;
  for (const auto& r : closed_in)
    if (r.side != Side::balance) closed.push_back(r);
  if (closed.empty()) throw NoTrades();
  std::stable_sort(closed.begin(), closed.end(), [](const TradeRecord& a, const TradeRecord& b) {
    const auto ta = a.close_time.value_or(a.open_time), tb = b.close_time.value_or(b.open_time);
    return ta != tb ? ta < tb : a.ticket < b.ticket;
  });

  SummaryStats s;
  s.convention = convention;
  s.deposit = deposit;
  s.margin = margin;
  s.total_trades = closed.size();

  std::size_t short_won = 0, long_won = 0;
  std::vector<Streak> streaks;
  Money balance = deposit, peak = deposit, low = deposit;
  for (const auto& r : closed) {
    const Money net = r.net(convention);
    const bool win = net >= Money{};
    s.closed_pl += net;
    if (win) {
      s.gross_profit += net;
      ++s.profit_trades;
      s.largest_profit = std::max(s.largest_profit, net);
    } else {
      s.gross_loss -= net;
      ++s.loss_trades;
      s.largest_loss = std::min(s.largest_loss, net);
    }
    if (r.side == Side::sell) {
      ++s.short_count;
      short_won += win;
    } else {
      ++s.long_count;
      long_won += win;
    }
    if (streaks.empty() || streaks.back().win != win) streaks.push_back({win, 0, {}});
    ++streaks.back().count;
    streaks.back().amount += net;

    balance += net;
    low = std::min(low, balance);
    if (balance > peak) peak = balance;
    const Money dd = peak - balance;
    if (dd > s.maximal_drawdown) {
      s.maximal_drawdown = dd;
      s.maximal_drawdown_percent = peak.cents() > 0 ? round_half_away(100.0 * dd.value() / peak.value(), 2) : 0.0;
    }
    const double rel = peak.cents() > 0 ? 100.0 * dd.value() / peak.value() : 0.0;
    if (dd.cents() > 0 && round_half_away(rel, 2) > s.relative_drawdown_percent) {
      s.relative_drawdown_percent = round_half_away(rel, 2);
      s.relative_drawdown = dd;
    }
  }
  s.absolute_drawdown = std::max(Money{}, deposit - low);

  s.net_profit = s.gross_profit - s.gross_loss;
  if (s.gross_loss.cents() > 0) s.profit_factor = round_half_away(s.gross_profit.value() / s.gross_loss.value(), 2);
  s.expected_payoff = round_half_away(s.net_profit.value() / static_cast<double>(s.total_trades), 2);
  s.short_won_percent = pct(short_won, s.short_count);
  s.long_won_percent = pct(long_won, s.long_count);
  s.profit_trades_percent = pct(s.profit_trades, s.total_trades);
  s.loss_trades_percent = pct(s.loss_trades, s.total_trades);
  s.average_profit = ratio(s.gross_profit, s.profit_trades);
  s.average_loss = -ratio(s.gross_loss, s.loss_trades);

  std::size_t win_streaks = 0, win_total = 0, loss_streaks = 0, loss_total = 0;
  for (const auto& k : streaks) {
    if (k.win) {
      ++win_streaks;
      win_total += k.count;
      if (k.count > s.max_consecutive_wins) {
        s.max_consecutive_wins = k.count;
        s.max_consecutive_wins_amount = k.amount;
      }
      if (k.amount > s.max_consecutive_profit || s.max_consecutive_profit_count == 0) {
        s.max_consecutive_profit = k.amount;
        s.max_consecutive_profit_count = k.count;
      }
    } else {
      ++loss_streaks;
      loss_total += k.count;
      if (k.count > s.max_consecutive_losses) {
        s.max_consecutive_losses = k.count;
        s.max_consecutive_losses_amount = k.amount;
      }
      if (k.amount < s.max_consecutive_loss || s.max_consecutive_loss_count == 0) {
        s.max_consecutive_loss = k.amount;
        s.max_consecutive_loss_count = k.count;
      }
    }
  }
  const auto avg = [](std::size_t total, std::size_t n) {
    return n == 0 ? std::size_t{0} : static_cast<std::size_t>(std::llround(static_cast<double>(total) / static_cast<double>(n)));
  };
  s.average_consecutive_wins = avg(win_total, win_streaks);
  s.average_consecutive_losses = avg(loss_total, loss_streaks);

  for (const auto& r : open) s.floating_pl += r.profit + r.swap + r.commission + r.taxes;
  s.balance = deposit + s.closed_pl;
  s.equity = s.balance + s.floating_pl;
  s.free_margin = s.equity - s.margin;
  return s;
}

SummaryStats summarize(const Statement& statement, PlConvention convention) {
  return summarize(statement.closed, statement.open, statement.deposit, convention, statement.margin.value_or(Money{}));
}

PlConvention detect_convention(const std::filesystem::path& path) {
  const auto st = parse_statement(path);
  std::ifstream in(path);
  static const std::regex closed_line(R"(^Closed (?:Trade )?P/L:\s*(-?[\d ]*\d\.\d{2}))");
  std::string line;
  std::optional<Money> reported;
  while (std::getline(in, line)) {
    std::smatch m;
    if (std::regex_search(line, m, closed_line)) {
      reported = Money::parse(m[1].str());
      break;
    }
  }
  if (!reported) return PlConvention::profit_plus_swap;
  Money only, plus;
  for (const auto& r : st.closed) {
    only += r.net(PlConvention::profit_only);
    plus += r.net(PlConvention::profit_plus_swap);
  }
  if (plus == *reported) return PlConvention::profit_plus_swap;
  if (only == *reported) return PlConvention::profit_only;
  return PlConvention::profit_plus_swap;
}

std::string render_report(const SummaryStats& stats) {
  if (stats.total_trades == 0) throw NoTrades();
  return fmt::format("P/L convention: {}\n\n", ledger::to_string(stats.convention)) + render_summary(stats);
}

std::string to_json(const SummaryStats& s) {
  const auto m = [](Money v) { return v.str(); };
  const auto d = [](double v) { return fmt::format("{:.2f}", v); };
  nlohmann::ordered_json j;
  j["pl_convention"] = ledger::to_string(s.convention);
  j["deposit"] = m(s.deposit);
  j["closed_pl"] = m(s.closed_pl);
  j["floating_pl"] = m(s.floating_pl);
  j["balance"] = m(s.balance);
  j["equity"] = m(s.equity);
  j["margin"] = m(s.margin);
  j["free_margin"] = m(s.free_margin);
  j["gross_profit"] = m(s.gross_profit);
  j["gross_loss"] = m(s.gross_loss);
  j["net_profit"] = m(s.net_profit);
  j["profit_factor"] = s.profit_factor ? d(*s.profit_factor) : "-";
  j["expected_payoff"] = d(s.expected_payoff);
  j["absolute_drawdown"] = m(s.absolute_drawdown);
  j["maximal_drawdown"] = m(s.maximal_drawdown);
  j["maximal_drawdown_percent"] = d(s.maximal_drawdown_percent);
  j["relative_drawdown_percent"] = d(s.relative_drawdown_percent);
  j["relative_drawdown"] = m(s.relative_drawdown);
  j["total_trades"] = std::to_string(s.total_trades);
  j["short_count"] = std::to_string(s.short_count);
  j["short_won_percent"] = d(s.short_won_percent);
  j["long_count"] = std::to_string(s.long_count);
  j["long_won_percent"] = d(s.long_won_percent);
  j["profit_trades"] = std::to_string(s.profit_trades);
  j["profit_trades_percent"] = d(s.profit_trades_percent);
  j["loss_trades"] = std::to_string(s.loss_trades);
  j["loss_trades_percent"] = d(s.loss_trades_percent);
  j["largest_profit"] = m(s.largest_profit);
  j["largest_loss"] = m(s.largest_loss);
  j["average_profit"] = m(s.average_profit);
  j["average_loss"] = m(s.average_loss);
  j["max_consecutive_wins"] = std::to_string(s.max_consecutive_wins);
  j["max_consecutive_wins_amount"] = m(s.max_consecutive_wins_amount);
  j["max_consecutive_losses"] = std::to_string(s.max_consecutive_losses);
  j["max_consecutive_losses_amount"] = m(s.max_consecutive_losses_amount);
  j["max_consecutive_profit"] = m(s.max_consecutive_profit);
  j["max_consecutive_profit_count"] = std::to_string(s.max_consecutive_profit_count);
  j["max_consecutive_loss"] = m(s.max_consecutive_loss);
  j["max_consecutive_loss_count"] = std::to_string(s.max_consecutive_loss_count);
  j["average_consecutive_wins"] = std::to_string(s.average_consecutive_wins);
  j["average_consecutive_losses"] = std::to_string(s.average_consecutive_losses);
  return j.dump(2) + "\n";
}

}  // namespace chaos::report
