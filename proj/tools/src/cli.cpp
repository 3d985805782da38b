#include <chaos/backtest.hpp>
#include <chaos/cli.hpp>
#include <chaos/errors.hpp>
#include <chaos/sde.hpp>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/ostream_sink.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <optional>

namespace chaos::cli {

namespace {

namespace fs = std::filesystem;

std::shared_ptr<spdlog::logger> make_logger(std::ostream& err) {
  auto sink = std::make_shared<spdlog::sinks::ostream_sink_mt>(err);
  auto log = std::make_shared<spdlog::logger>("chaos", sink);
  log->set_pattern("[%l] %v");
  log->set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CS_LOG")) log->set_level(spdlog::level::from_str(env));
  return log;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
}

struct SynthArgs {
  std::string kind = "wiener";
  std::size_t length = 1000;
  std::vector<std::string> params;
  std::string symbol = "synthetic";
  int timeframe = 5;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string out_dir;
  std::string config;
};

int cmd_synth(const SynthArgs& a, std::ostream& out, spdlog::logger& log) {
  if (!a.config.empty()) {
    auto cfg = load_config(a.config);
    if (a.seed) cfg.seed = *a.seed;
    const fs::path dir = a.out_dir.empty() ? fs::path(".") : fs::path(a.out_dir);
    for (const auto& [symbol, series] : load_market(cfg, fs::path(a.config).parent_path())) {
      market::save_history(dir / (symbol + ".csv"), series);
      log.info("wrote {} bars for {}", series.size(), symbol);
    }
    return 0;
  }
  market::SyntheticSpec spec;
  spec.kind = market::parse_synthetic_kind(a.kind);
  spec.length = a.length;
  spec.seed = a.seed.value_or(0);
  spec.symbol = a.symbol;
  spec.timeframe = a.timeframe;
  for (const auto& p : a.params) {
    const auto eq = p.find('=');
    if (eq == std::string::npos) throw InvalidParameter(p, "expected name=value");
    try {
      std::size_t used = 0;
      const auto value = p.substr(eq + 1);
      spec.parameters[p.substr(0, eq)] = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
    } catch (const std::logic_error&) {
      throw InvalidParameter(p.substr(0, eq), "not a number");
    }
  }
  const auto series = market::generate(spec);
  if (!a.out.empty()) market::save_history(a.out, series);
  else if (!a.out_dir.empty()) market::save_history(fs::path(a.out_dir) / (a.symbol + ".csv"), series);
  else market::write_history(out, series);
  log.info("generated {} bars", series.size());
  return 0;
}

struct DensityArgs {
  std::string input;
  int scale = 0;
  int timeframe = 5;
  std::string wavelet = "haar";
  int bins = 32;
  int order_f = 3;
  int order_g2 = 2;
  int grid = 512;
  double dtau = 0.0;
  std::string out_dir = ".";
};

int cmd_density(const DensityArgs& a, std::ostream& out, spdlog::logger& log) {
  if (a.scale < 0) throw InvalidParameter("scale", "must be >= 0");
  const auto series = market::load_history(a.input, "input", a.timeframe);
  if (series.empty()) throw EmptySeries();
  const auto closes = series.closes();
  const fs::path dir = a.out_dir;

  // Scale 0 fits the close path itself; scale >= 1 fits that level's detail coefficients.
  std::vector<double> values = closes;
  if (a.scale > 0) {
    const auto dec = wavelet::decompose(closes, a.scale, wavelet::WaveletFamily::from_name(a.wavelet));
    std::string csv = "scale,tau,value\n";
    for (const auto& d : dec.details)
      for (std::size_t i = 0; i < d.size(); ++i) csv += fmt::format("{},{},{:.17g}\n", d.scale, d.shifts[i], d.values[i]);
    write_file(dir / "coefficients.csv", csv);
    values = dec.details.back().values;
  }
  const double dtau = a.dtau > 0.0 ? a.dtau : std::ldexp(1.0, a.scale);
  const auto pairs = wavelet::increments(values);
  const auto fit = sde::estimate_fg(pairs, dtau, sde::FitOptions{a.bins, a.order_f, a.order_g2, 5, 1e-8});
  const auto density = sde::stationary_density(fit, a.grid);

  std::string fit_csv = "bin_center,count,F_hat,G2_hat\n";
  for (const auto& b : fit.bin_stats)
    fit_csv += fmt::format("{:.17g},{},{:.17g},{:.17g}\n", b.center, b.count, b.f_hat, b.g2_hat);
  write_file(dir / "fit.csv", fit_csv);
  std::string dens_csv = "y,pdf,W\n";
  for (std::size_t i = 0; i < density.grid.size(); ++i)
    dens_csv += fmt::format("{:.17g},{:.17g},{:.17g}\n", density.grid[i], density.pdf[i], density.log_weight[i]);
  write_file(dir / "density.csv", dens_csv);

  out << fmt::format("pairs: {}\nP_s: {:.6f}\nmean: {:.6g}\nvariance: {:.6g}\n", pairs.size(),
                     sde::prob_nonpositive(density), density.mean(), density.variance());
  log.info("density written to {}", dir.string());
  return 0;
}

struct BacktestArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> threads;
  std::string out_dir = "backtest_out";
};

int cmd_backtest(const BacktestArgs& a, std::ostream& out, spdlog::logger& log) {
  auto cfg = a.config.empty() ? reference_config() : load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  if (a.threads) cfg.threads = *a.threads;
  cfg.validate();
  const auto dir = a.config.empty() ? fs::path{} : fs::path(a.config).parent_path();
  const auto data = load_market(cfg, dir);
  log.info("replaying {} symbols", data.size());
  const auto result = run_backtest(cfg, data);
  write_outputs(result, a.out_dir);
  out << result.report;
  out << fmt::format("bars: {}\nequity: {}\n", result.bars, result.account.equity.str(true));
  return 0;
}

struct ReportArgs {
  std::string statement;
  std::string convention = "auto";
  bool json = false;
  std::string out_dir;
};

int cmd_report(const ReportArgs& a, std::ostream& out, spdlog::logger& log) {
  const auto st = report::parse_statement(fs::path(a.statement));
  const auto conv = a.convention == "auto" ? report::detect_convention(a.statement)
                                           : ledger::parse_pl_convention(a.convention);
  log.info("{} closed, {} open trades", st.closed.size(), st.open.size());
  const auto stats = report::summarize(st, conv);
  const auto text = a.json ? report::to_json(stats) : report::render_report(stats);
  if (!a.out_dir.empty()) {
    write_file(fs::path(a.out_dir) / "report.txt", report::render_report(stats));
    write_file(fs::path(a.out_dir) / "summary.json", report::to_json(stats));
  }
  out << text;
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  auto log = make_logger(err);
  CLI::App app{"Chaos Structures: wavelet SDE signals, self-assembly and statement tooling", "chaos"};
  app.require_subcommand(1);

  SynthArgs synth;
  auto* s = app.add_subcommand("synth", "Generate a synthetic quote CSV");
  s->add_option("--kind", synth.kind, "wiener|ornstein_uhlenbeck|gbm|logistic_map|lorenz_x");
  s->add_option("--length", synth.length, "Number of bars");
  s->add_option("--param", synth.params, "name=value (theta, sigma, mu, r, dt, y0, spread)");
  s->add_option("--symbol", synth.symbol);
  s->add_option("--timeframe", synth.timeframe, "Minutes per bar");
  s->add_option("--seed", synth.seed);
  s->add_option("--out", synth.out, "Output file (stdout when omitted)");
  s->add_option("--out-dir", synth.out_dir);
  s->add_option("--config", synth.config, "Generate every synthetic symbol of a backtest config");

  DensityArgs density;
  auto* d = app.add_subcommand("density", "Fit drift/diffusion and the stationary density");
  d->add_option("input", density.input, "Quote CSV")->required();
  d->add_option("--scale", density.scale, "0 = raw closes, >= 1 = wavelet detail level");
  d->add_option("--timeframe", density.timeframe, "Minutes per bar of the input");
  d->add_option("--wavelet", density.wavelet, "haar|db4");
  d->add_option("--bins", density.bins);
  d->add_option("--order-f", density.order_f);
  d->add_option("--order-g2", density.order_g2);
  d->add_option("--grid", density.grid);
  d->add_option("--dtau", density.dtau, "Step between samples (default 2^scale)");
  d->add_option("--out-dir", density.out_dir);

  BacktestArgs backtest;
  auto* b = app.add_subcommand("backtest", "Replay the assembly against a configured market");
  b->add_option("--config", backtest.config, "Config file (reference configuration when omitted)");
  b->add_option("--seed", backtest.seed);
  b->add_option("--threads", backtest.threads);
  b->add_option("--out-dir", backtest.out_dir);

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Summarize a statement file");
  r->add_option("statement", rep.statement, "Statement file")->required();
  r->add_option("--convention", rep.convention, "auto|profit_only|profit_plus_swap");
  r->add_flag("--json", rep.json);
  r->add_option("--out-dir", rep.out_dir);

  // CLI11 consumes a vector in reverse order.
  std::vector<std::string> rest(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (*s) return cmd_synth(synth, out, *log);
    if (*d) return cmd_density(density, out, *log);
    if (*b) return cmd_backtest(backtest, out, *log);
    if (*r) return cmd_report(rep, out, *log);
  } catch (const DataError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace chaos::cli
