#include <chaos/backtest.hpp>
#include <chaos/errors.hpp>
#include <chaos/portfolio.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <fstream>

namespace chaos {

using assembly::NodeOutput;
using assembly::UnitStateKind;
using decision::Action;
using ledger::Side;

namespace {

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t symbol_seed(std::uint64_t seed, const std::string& symbol) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : symbol) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return mix(seed ^ mix(h));
}

market::QuoteSeries synthesize(const RunConfig& config, const std::string& symbol) {
  const auto& sc = config.settings(symbol);
  market::SyntheticSpec spec;
  spec.kind = market::parse_synthetic_kind(sc.synthetic);
  spec.length = config.bars;
  spec.seed = symbol_seed(config.seed, symbol);
  spec.symbol = symbol;
  spec.timeframe = config.base_timeframe;
  const double sigma = sc.sigma > 0.0 ? sc.sigma : 2e-4 * sc.start_price;
  switch (spec.kind) {
    case market::SyntheticKind::ornstein_uhlenbeck:
      spec.parameters = {{"theta", sc.theta}, {"sigma", sigma}, {"mu", sc.start_price}, {"y0", sc.start_price}};
      break;
    case market::SyntheticKind::wiener:
      spec.parameters = {{"sigma", sigma}, {"y0", sc.start_price}};
      break;
    case market::SyntheticKind::gbm:
      spec.parameters = {{"sigma", sigma / sc.start_price}, {"y0", sc.start_price}};
      break;
    default:
      throw ConfigError(symbol + ".synthetic: backtests need a positive price path (ornstein_uhlenbeck, wiener, gbm)");
  }
  spec.parameters["spread"] = sc.spread;
  auto series = market::generate(spec);
  for (const auto& b : series.bars)
    if (!(b.low > 0.0)) throw DataError(symbol + ": synthetic path reached a non-positive price");
  return series;
}

std::string journal_time(Timestamp t) { return format_statement_time(t); }

void flatten(const NodeOutput& out, std::vector<const NodeOutput*>& layers) {
  layers.push_back(&out);
  for (const auto& c : out.children) flatten(c, layers);
}

struct LayerTrack {
  bool primed = false;
  int last_sign = 0;
  double last_close = 0.0;
  std::vector<std::pair<std::size_t, double>> contributions;  // (bar, return of following the sign)
};

Action fused_action(double score, double threshold) {
  if (score >= threshold && score > 0.0) return Action::enter_long;
  if (score <= -threshold && score < 0.0) return Action::enter_short;
  return Action::hold;
}

}  // namespace

MarketData load_market(const RunConfig& config, const std::filesystem::path& config_dir) {
  config.validate();
  MarketData data;
  for (const auto& symbol : config.symbols) {
    const auto& sc = config.settings(symbol);
    if (sc.data.empty()) {
      data[symbol] = synthesize(config, symbol);
      continue;
    }
    std::filesystem::path p = sc.data;
    if (p.is_relative()) p = config_dir / config.data_dir / p;
    data[symbol] = market::load_history(p, symbol, config.base_timeframe);
  }
  return data;
}

BacktestResult run_backtest(const RunConfig& config, const MarketData& data) {
  config.validate();
  const auto root = config.assembly();
  root.validate(config.k_max);
  const auto pipeline = config.pipeline();
  const auto& symbols = config.symbols;

  // Aligned base series.
  std::size_t n = std::numeric_limits<std::size_t>::max();
  for (const auto& s : symbols) {
    const auto it = data.find(s);
    if (it == data.end() || it->second.empty()) throw MissingTimeframeData("no base series for " + s);
    n = std::min(n, it->second.size());
  }
  const auto& lead = data.at(symbols.front()).bars;
  for (const auto& s : symbols) {
    const auto& bars = data.at(s).bars;
    for (std::size_t i = 0; i < n; ++i)
      if (bars[i].timestamp != lead[i].timestamp)
        throw DataError(fmt::format("{}: timestamp at row {} is not aligned with {}", s, i + 1, symbols.front()));
  }

  // Coarser series per node timeframe.
  std::vector<int> timeframes{config.base_timeframe};
  for (int f : config.homothetic_factors) timeframes.push_back(timeframes.back() * f);
  std::map<int, std::map<std::string, market::QuoteSeries>> series;
  for (const auto& s : symbols) {
    market::QuoteSeries base = data.at(s);
    base.bars.resize(n);
    for (int tf : timeframes) {
      const int factor = tf / config.base_timeframe;
      series[tf][s] = factor == 1 ? base : market::resample(base, factor);
    }
  }

  ledger::LedgerConfig lc;
  lc.leverage = config.leverage;
  lc.convention = config.pl_convention;
  lc.deposit = Money::from_double(config.deposit);
  lc.deposit_time = lead.front().timestamp - 3600;
  for (const auto& s : symbols) {
    const auto& sc = config.settings(s);
    lc.symbols[s] = {sc.swap_long, sc.swap_short, sc.conversion_rate};
  }
  ledger::Ledger book(lc);

  BacktestResult result;
  std::string journal = "bar_time,symbol,source,action,strength,state\n";
  std::string allocations = "bar_time,symbol,fraction,lots\n";

  auto alloc = portfolio::equal_allocation(symbols);
  assembly::NodeState state;
  std::vector<std::map<std::string, LayerTrack>> tracks;
  std::vector<int> layer_tf;

  auto log_allocation = [&](Timestamp t, const ledger::Account& acct) {
    for (const auto& s : symbols) {
      double lots = 0.0;
      if (book.has_price(s) && acct.equity.cents() > 0) {
        portfolio::Allocation one;
        one.fractions[s] = alloc.fraction(s) * config.risk_fraction;
        one.reserve = 1.0 - one.fractions[s];
        lots = portfolio::enforce_margin(one, acct.equity.value(), config.leverage, {{s, book.base_to_usd(s)}}).at(s);
      }
      allocations += fmt::format("{},{},{:.6f},{:.2f}\n", journal_time(t), s, alloc.fraction(s), lots);
    }
  };

  log_allocation(lead.front().timestamp, book.account());
  for (std::size_t i = 0; i < n; ++i) {
    const Timestamp now = lead[i].timestamp;
    for (const auto& s : symbols) book.mark_to_market(s, data.at(s).bars[i], now);

    assembly::MarketSnapshot snap;
    snap.time = now;
    snap.symbols = symbols;
    for (int tf : timeframes) {
      const auto factor = static_cast<std::size_t>(tf / config.base_timeframe);
      for (const auto& s : symbols) {
        const auto& bars = series[tf][s].bars;
        snap.series[tf][s] = std::span<const market::Bar>(bars.data(), std::min(bars.size(), (i + 1) / factor));
      }
    }
    auto evaluated = assembly::evaluate_node(root, snap, state, pipeline);
    state = std::move(evaluated.state);
    const auto& out = evaluated.output;

    std::vector<const NodeOutput*> layers;
    flatten(out, layers);
    if (tracks.empty()) {
      tracks.resize(layers.size());
      for (const auto* l : layers) layer_tf.push_back(l->timeframe);
    }

    for (const auto& s : symbols) {
      const auto& bar = data.at(s).bars[i];
      const auto unit = out.states.at(s);
      const auto unit_name = assembly::to_string(unit);

      // Journal and layer effectiveness on fresh node bars.
      bool exit_long = false, exit_short = false;
      for (std::size_t k = 0; k < layers.size(); ++k) {
        const auto* layer = layers[k];
        if (!layer->fresh.at(s)) continue;
        const auto& lbars = snap.series.at(layer->timeframe).at(s);
        const double close = lbars.back().close;
        auto& tr = tracks[k][s];
        if (tr.primed && tr.last_close > 0.0)
          tr.contributions.emplace_back(i, tr.last_sign * (close - tr.last_close) / tr.last_close);
        const double score = layer->scores.at(s);
        tr.primed = true;
        tr.last_sign = (score > 0.0) - (score < 0.0);
        tr.last_close = close;
        for (const auto& sig : layer->signals.at(s)) {
          if (sig.action == Action::hold) continue;
          journal += fmt::format("{},{},{},{},{:.6f},{}\n", journal_time(now), s, decision::to_string(sig.source),
                                 decision::to_string(sig.action), sig.strength, unit_name);
          exit_long |= sig.action == Action::exit_long;
          exit_short |= sig.action == Action::exit_short;
        }
      }
      const double score = out.scores.at(s);
      const auto action = fused_action(score, config.entry_threshold);
      if (out.fresh.at(s) || action != Action::hold)
        journal += fmt::format("{},{},fused,{},{:.6f},{}\n", journal_time(now), s, decision::to_string(action),
                               action == Action::hold ? 0.0 : std::abs(score), unit_name);

      // Exits are authoritative for positions of the matching direction.
      if (exit_long || action == Action::enter_short)
        for (auto t : book.open_tickets(s, Side::buy)) book.close_position(t, bar, now);
      if (exit_short || action == Action::enter_long)
        for (auto t : book.open_tickets(s, Side::sell)) book.close_position(t, bar, now);

      if (unit != UnitStateKind::active || action == Action::hold) continue;
      const Side side = action == Action::enter_long ? Side::buy : Side::sell;
      if (!book.open_tickets(s, side).empty()) continue;
      if ((side == Side::buy && exit_long) || (side == Side::sell && exit_short)) continue;

      const auto acct = book.account();
      if (acct.free_margin.cents() <= 0) continue;
      portfolio::Allocation one;
      one.fractions[s] = alloc.fraction(s) * config.risk_fraction;
      one.reserve = 1.0 - one.fractions[s];
      const double lots =
          portfolio::enforce_margin(one, acct.free_margin.value(), config.leverage, {{s, book.base_to_usd(s)}}).at(s);
      if (lots < 0.01) continue;
      const double px = bar.close;
      ledger::OrderIntent intent{s, side, lots, 0.0, 0.0};
      if (config.sl_fraction > 0.0) intent.sl = side == Side::buy ? px * (1 - config.sl_fraction) : px * (1 + config.sl_fraction);
      if (config.tp_fraction > 0.0) intent.tp = side == Side::buy ? px * (1 + config.tp_fraction) : px * (1 - config.tp_fraction);
      try {
        book.open_position(intent, bar, now);
      } catch (const InsufficientMargin&) {
      }
    }

    // Loose coupling: capital follows realized effectiveness per symbol and timeframe.
    if ((i + 1) % config.realloc_every == 0) {
      const std::size_t from = i + 1 - config.realloc_every;
      std::vector<portfolio::EffectivenessRecord> records;
      for (const auto& s : symbols) {
        std::size_t trades = 0;
        for (const auto& r : book.closed_trades())
          if (r.symbol == s && r.close_time && *r.close_time >= lead[from].timestamp) ++trades;
        for (std::size_t k = 0; k < layer_tf.size(); ++k) {
          auto& tr = tracks[k][s];
          std::erase_if(tr.contributions, [from](const auto& c) { return c.first < from; });
          double sum = 0.0, sq = 0.0;
          for (const auto& [bar, r] : tr.contributions) {
            sum += r;
            sq += r * r;
          }
          const auto m = static_cast<double>(tr.contributions.size());
          const double var = m > 1 ? std::max(0.0, (sq - sum * sum / m) / (m - 1)) : 0.0;
          records.push_back({s, layer_tf[k], sum, std::sqrt(var * m), trades});
        }
      }
      alloc = portfolio::reallocate(records, config.lambda_risk, config.alloc_floor);
      log_allocation(now, book.account());
    }

    result.equity_curve.push_back(book.account().equity.value());
  }

  // Statement in the fixture layout.
  report::Statement st;
  st.balance_rows.push_back(book.deposit_row());
  st.deposit = lc.deposit;
  st.closed = book.closed_trades();
  std::stable_sort(st.closed.begin(), st.closed.end(), [](const auto& a, const auto& b) {
    return a.close_time != b.close_time ? a.close_time < b.close_time : a.ticket < b.ticket;
  });
  st.open = book.open_trades();
  st.margin = book.margin();
  result.account = book.account();
  if (!st.closed.empty()) {
    result.stats = report::summarize(st, config.pl_convention);
    result.report = report::render_report(*result.stats);
    result.summary_json = report::to_json(*result.stats);
  } else {
    result.report = "No trades\n";
    result.summary_json = "{}\n";
  }
  report::SummaryStats shell;
  if (result.stats) shell = *result.stats;
  else {
    shell.deposit = lc.deposit;
    shell.balance = result.account.balance;
    shell.floating_pl = book.floating_pl();
    shell.equity = result.account.equity;
    shell.margin = result.account.margin;
    shell.free_margin = result.account.free_margin;
  }
  result.statement = report::render_statement(st, shell);
  result.journal = std::move(journal);
  result.allocations = std::move(allocations);
  result.bars = n;
  return result;
}


void write_outputs(const BacktestResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  const std::pair<const char*, const std::string*> files[] = {
      {"statement.txt", &result.statement}, {"report.txt", &result.report},         {"summary.json", &result.summary_json},
      {"journal.csv", &result.journal},     {"allocations.csv", &result.allocations},
  };
  for (const auto& [name, text] : files) {
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw DataError("cannot write " + (out_dir / name).string());
    out << *text;
  }
}

}  // namespace chaos
