#include <chaos/errors.hpp>
#include <chaos/report.hpp>

#include <fmt/format.h>

#include <cctype>
#include <fstream>
#include <iterator>
#include <regex>
#include <sstream>

namespace chaos::report {

using ledger::Side;
using ledger::TradeRecord;

namespace {

enum class Section { none, closed, open, working, summary, details };

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) out.push_back(field);
  if (!line.empty() && line.back() == '\t') out.emplace_back();
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \r");
  return s.substr(b, e - b + 1);
}

// Whitespace layout: date and time tokens are re-joined, and a short
// integer followed by a three-digit group is one thousands-spaced amount.
std::vector<std::string> split_whitespace(const std::string& line) {
  static const std::regex date(R"(\d{4}\.\d{2}\.\d{2})");
  static const std::regex clock(R"(\d{2}:\d{2})");
  static const std::regex head(R"(-?\d{1,3})");
  static const std::regex group(R"(\d{3}(\.\d+)?)");
  std::istringstream in(line);
  std::vector<std::string> raw{std::istream_iterator<std::string>(in), {}};
  std::vector<std::string> out;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i + 1 < raw.size() && std::regex_match(raw[i], date) && std::regex_match(raw[i + 1], clock)) {
      out.push_back(raw[i] + " " + raw[i + 1]);
      ++i;
      continue;
    }
    if (std::regex_match(raw[i], head)) {
      std::string merged = raw[i];
      while (i + 1 < raw.size() && std::regex_match(raw[i + 1], group)) {
        merged += raw[++i];
        if (merged.find('.') != std::string::npos) break;
      }
      out.push_back(merged);
      continue;
    }
    out.push_back(raw[i]);
  }
  return out;
}

std::vector<std::string> fields_of(const std::string& line) {
  if (line.find('\t') != std::string::npos) {
    auto f = split_tabs(line);
    for (auto& x : f) x = trim(x);
    return f;
  }
  return split_whitespace(line);
}

double to_double(const std::string& s, std::size_t line, const char* what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw FormatError(line, fmt::format("bad {} '{}'", what, s));
  }
}

Money to_money(const std::string& s, std::size_t line, const char* what) {
  try {
    return Money::parse(s);
  } catch (const std::exception&) {
    throw FormatError(line, fmt::format("bad {} '{}'", what, s));
  }
}

Timestamp to_time(const std::string& s, std::size_t line) {
  try {
    return parse_statement_time(s);
  } catch (const std::exception&) {
    throw FormatError(line, fmt::format("bad time '{}'", s));
  }
}

TradeRecord parse_trade(const std::vector<std::string>& f, bool closed, std::size_t line) {
  const std::size_t want = closed ? 14 : 13;
  if (f.size() < want) throw FormatError(line, fmt::format("expected {} columns, got {}", want, f.size()));
  TradeRecord r;
  try {
    r.ticket = std::stoll(f[0]);
  } catch (const std::exception&) {
    throw FormatError(line, "bad ticket '" + f[0] + "'");
  }
  r.open_time = to_time(f[1], line);
  try {
    r.side = ledger::parse_side(f[2]);
  } catch (const std::exception&) {
    throw FormatError(line, "bad type '" + f[2] + "'");
  }
  if (r.side == Side::balance) throw FormatError(line, "balance row in trade position");
  r.lots = to_double(f[3], line, "size");
  r.symbol = f[4];
  r.open_price = to_double(f[5], line, "price");
  r.sl = to_double(f[6], line, "S/L");
  r.tp = to_double(f[7], line, "T/P");
  std::size_t k = 8;
  if (closed) r.close_time = to_time(f[k++], line);
  r.close_price = to_double(f[k++], line, "price");
  r.commission = to_money(f[k++], line, "commission");
  r.taxes = to_money(f[k++], line, "taxes");
  r.swap = to_money(f[k++], line, "swap");
  r.profit = to_money(f[k++], line, "profit");
  return r;
}

TradeRecord parse_balance(const std::vector<std::string>& f, std::size_t line) {
  TradeRecord r;
  r.side = Side::balance;
  try {
    r.ticket = std::stoll(f.at(0));
  } catch (const std::exception&) {
    throw FormatError(line, "bad ticket");
  }
  r.open_time = to_time(f.at(1), line);
  r.symbol = f.size() > 3 ? f[3] : "";
  std::string amount;
  for (auto it = f.rbegin(); it != f.rend() && amount.empty(); ++it) amount = *it;
  r.profit = to_money(amount, line, "amount");
  return r;
}

std::optional<Money> summary_margin(const std::string& line) {
  static const std::regex amount(R"(^[ \t]*(-?\d{1,3}(?: \d{3})*\.\d{2}|-?\d+\.\d{2}))");
  for (auto pos = line.find("Margin:"); pos != std::string::npos; pos = line.find("Margin:", pos + 1)) {
    if (pos >= 5 && line.compare(pos - 5, 5, "Free ") == 0) continue;
    std::smatch m;
    const std::string rest = line.substr(pos + 7);
    if (std::regex_search(rest, m, amount)) return Money::parse(m[1].str());
  }
  return std::nullopt;
}

bool starts_with_digit(const std::string& s) { return !s.empty() && std::isdigit(static_cast<unsigned char>(s[0])); }

}  // namespace

Statement parse_statement(std::istream& in) {
  Statement st;
  Section section = Section::none;
  std::string line;
  std::size_t n = 0;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("Closed Transactions:", 0) == 0) { section = Section::closed; seen_header = true; continue; }
    if (t.rfind("Open Trades:", 0) == 0) { section = Section::open; continue; }
    if (t.rfind("Working Orders:", 0) == 0) { section = Section::working; continue; }
    if (t.rfind("Summary:", 0) == 0) { section = Section::summary; continue; }
    if (t.rfind("Details:", 0) == 0) { section = Section::details; continue; }
    if (!seen_header) throw FormatError(n, "expected 'Closed Transactions:' header");

    if (section == Section::summary) {
      if (auto m = summary_margin(line)) st.margin = m;
      continue;
    }
    if (section != Section::closed && section != Section::open) continue;
    if (!starts_with_digit(line)) continue;  // column headers, totals, P/L lines

    const auto f = fields_of(line);
    if (f.size() > 2 && f[2] == "balance") {
      st.balance_rows.push_back(parse_balance(f, n));
      st.deposit += st.balance_rows.back().profit;
      continue;
    }
    if (section == Section::closed) st.closed.push_back(parse_trade(f, true, n));
    else st.open.push_back(parse_trade(f, false, n));
  }
  if (!seen_header) throw FormatError(n == 0 ? 1 : n, "empty statement");
  return st;
}

Statement parse_statement(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return parse_statement(in);
}

namespace {

std::string price(double v, const std::string& symbol) {
  const int digits = symbol.size() == 6 ? ledger::price_digits(symbol) : 5;
  return fmt::format("{:.{}f}", v, digits);
}

std::string percent(double v) { return fmt::format("{:.2f}%", v); }

}  // namespace

std::string render_statement(const Statement& statement, const SummaryStats& stats) {
  std::string out;
  auto line = [&out](const std::string& s) {
    out += s;
    out += '\n';
  };
  line("Closed Transactions:");
  line("");
  line("Ticket\tOpen Time\tType\tSize\tItem\tPrice\tS / L\tT / P\tClose Time\tPrice\tCommission\tTaxes\tSwap\tProfit");
  for (const auto& b : statement.balance_rows)
    line(fmt::format("{}\t{}\tbalance\t{}\t\t\t\t\t\t\t\t\t\t{}", b.ticket, format_statement_time(b.open_time), b.symbol,
                     b.profit.str()));
  for (const auto& r : statement.closed)
    line(fmt::format("{}\t{}\t{}\t{:.2f}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", r.ticket,
                     format_statement_time(r.open_time), ledger::to_string(r.side), r.lots, r.symbol,
                     price(r.open_price, r.symbol), price(r.sl, r.symbol), price(r.tp, r.symbol),
                     format_statement_time(r.close_time.value_or(r.open_time)), price(r.close_price, r.symbol),
                     r.commission.str(), r.taxes.str(), r.swap.str(), r.profit.str()));
  line("");
  line("Closed P/L: " + stats.closed_pl.str(true));
  line("");
  line("Open Trades:");
  line("");
  line("Ticket\tOpen Time\tType\tSize\tItem\tPrice\tS / L\tT / P\tPrice\tCommission\tTaxes\tSwap\tProfit");
  Money commission, taxes, swap, profit;
  for (const auto& r : statement.open) {
    line(fmt::format("{}\t{}\t{}\t{:.2f}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", r.ticket, format_statement_time(r.open_time),
                     ledger::to_string(r.side), r.lots, r.symbol, price(r.open_price, r.symbol), price(r.sl, r.symbol),
                     price(r.tp, r.symbol), price(r.close_price, r.symbol), r.commission.str(), r.taxes.str(),
                     r.swap.str(), r.profit.str()));
    commission += r.commission;
    taxes += r.taxes;
    swap += r.swap;
    profit += r.profit;
  }
  line("");
  line(fmt::format("\t\t\t\t\t\t\t\t\t{}\t{}\t{}\t{}", commission.str(true), taxes.str(true), swap.str(true),
                   profit.str(true)));
  line("");
  line("Floating P/L: " + stats.floating_pl.str(true));
  line("");
  line("Working Orders:");
  line("");
  line("Ticket\tOpen Time\tType\tSize\tItem\tPrice\tS / L\tT / P\tMarket Price");
  line("--------\t-----------\t------\t------\t------\t-------\t-------\t-------\t--------------");
  line("");
  line("No transactions");
  line("");
  out += render_summary(stats);
  return out;
}

std::string render_summary(const SummaryStats& s) {
  const auto m = [](Money v) { return v.str(true); };
  std::string out;
  auto line = [&out](const std::string& x) {
    out += x;
    out += '\n';
  };
  line("Summary:");
  line("");
  line(fmt::format("Deposit/Withdrawal:\t{}\tCredit Facility:\t0.00\t\t", m(s.deposit)));
  line(fmt::format("Closed Trade P/L:\t{}\tFloating P/L:\t{}\tMargin:\t{}", m(s.closed_pl), m(s.floating_pl), m(s.margin)));
  line(fmt::format("Balance:\t{}\tEquity:\t{}\tFree Margin:\t{}", m(s.balance), m(s.equity), m(s.free_margin)));
  line("");
  line("Details:");
  line("");
  line(fmt::format("Gross Profit:\t{}\tGross Loss:\t{}\tTotal Net Profit:\t{}", m(s.gross_profit), m(s.gross_loss),
                   m(s.net_profit)));
  line(fmt::format("Profit Factor:\t{}\tExpected Payoff:\t{:.2f}\t\t",
                   s.profit_factor ? fmt::format("{:.2f}", *s.profit_factor) : std::string("-"), s.expected_payoff));
  line(fmt::format("Absolute Drawdown:\t{}\tMaximal Drawdown:\t{} ({})\tRelative Drawdown:\t{} ({})",
                   m(s.absolute_drawdown), m(s.maximal_drawdown), percent(s.maximal_drawdown_percent),
                   percent(s.relative_drawdown_percent), m(s.relative_drawdown)));
  line(fmt::format("Total Trades:\t{}\tShort Positions (won %):\t{} ({})\tLong Positions (won %):\t{} ({})",
                   s.total_trades, s.short_count, percent(s.short_won_percent), s.long_count,
                   percent(s.long_won_percent)));
  line(fmt::format("\t\tProfit Trades (% of total):\t{} ({})\tLoss trades (% of total):\t{} ({})", s.profit_trades,
                   percent(s.profit_trades_percent), s.loss_trades, percent(s.loss_trades_percent)));
  line(fmt::format("Largest\t\tprofit trade:\t{}\tloss trade:\t{}", m(s.largest_profit), m(s.largest_loss)));
  line(fmt::format("Average\tprofit trade:\t{}\tloss trade:\t{}", m(s.average_profit), m(s.average_loss)));
  line(fmt::format("Maximum\tconsecutive wins ($):\t{} ({})\tconsecutive losses ($):\t{} ({})", s.max_consecutive_wins,
                   m(s.max_consecutive_wins_amount), s.max_consecutive_losses, m(s.max_consecutive_losses_amount)));
  line(fmt::format("Maximal\tconsecutive profit (count):\t{} ({})\tconsecutive loss (count):\t{} ({})",
                   m(s.max_consecutive_profit), s.max_consecutive_profit_count, m(s.max_consecutive_loss),
                   s.max_consecutive_loss_count));
  line(fmt::format("Average\tconsecutive wins:\t{}\tconsecutive losses:\t{}", s.average_consecutive_wins,
                   s.average_consecutive_losses));
  return out;
}

std::string normalize_whitespace(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    std::istringstream words(line);
    std::string w, joined;
    while (words >> w) {
      if (!joined.empty()) joined += ' ';
      joined += w;
    }
    if (joined.empty()) continue;
    out += joined;
    out += '\n';
  }
  return out;
}

}  // namespace chaos::report
