// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 on any FAIL.
#include <chaos/assembly.hpp>
#include <chaos/backtest.hpp>
#include <chaos/report.hpp>
#include <chaos/sde.hpp>
#include <chaos/wavelet.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <string>

using namespace chaos;

namespace {

// Tolerances and budgets.
constexpr double kCent = 0.005;             // "exact to 0.01"
constexpr double kCriterion1Seconds = 1.0;
constexpr double kSlopeTolerance = 0.10;
constexpr double kDiffusionTolerance = 0.10;
constexpr double kVarianceTolerance = 0.05;
constexpr double kCriterion2Seconds = 60.0;
constexpr double kWaveletTolerance = 1e-9;
constexpr double kKsRateTolerance = 0.02;
constexpr double kCriterion4Seconds = 30.0;
constexpr double kCriterion7Seconds = 120.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& check) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("%s %d %s (%.2f s): %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
  std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point since) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - since).count();
}

bool near(double got, double want, double tol) { return std::abs(got - want) <= tol; }

Outcome statement_reproduction() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto st = report::parse_statement(std::filesystem::path(CHAOS_FIXTURE_DIR) / "statement_2011.txt");
  const auto s = report::summarize(st, ledger::PlConvention::profit_plus_swap);
  const double secs = elapsed(t0);
  if (st.closed.size() != 205) return {false, fmt::format("fixture has {} closed rows, expected 205", st.closed.size())};

  struct Check {
    const char* name;
    double got;
    double want;
  };
  const Check checks[] = {
      {"closed_pl", s.closed_pl.value(), 5683.62},
      {"balance", s.balance.value(), 10683.62},
      {"floating_pl", s.floating_pl.value(), -1161.37},
      {"equity", s.equity.value(), 9522.25},
      {"expected_payoff", s.expected_payoff, 27.72},
      {"average_profit", s.average_profit.value(), 27.87},
      {"profit_factor", s.profit_factor.value_or(-1.0), 4476.29},
      {"largest_profit", s.largest_profit.value(), 206.01},
  };
  for (const auto& c : checks)
    if (!near(c.got, c.want, kCent)) return {false, fmt::format("{} = {:.2f}, expected {:.2f}", c.name, c.got, c.want)};
  if (s.total_trades != 205 || s.long_count != 83 || s.short_count != 122)
    return {false, fmt::format("trades {} ({} long / {} short)", s.total_trades, s.long_count, s.short_count)};
  if (secs >= kCriterion1Seconds) return {false, fmt::format("took {:.3f} s", secs)};
  return {true, fmt::format("Closed P/L {}, Equity {}, PF {:.2f}, 205 trades (83 long / 122 short)",
                            s.closed_pl.str(true), s.equity.str(true), *s.profit_factor)};
}

Outcome sde_recovery() {
  const auto t0 = std::chrono::steady_clock::now();
  const double theta = 1.0, sigma = 0.5, dt = 0.01;
  market::SyntheticSpec spec{market::SyntheticKind::ornstein_uhlenbeck,
                             {{"theta", theta}, {"sigma", sigma}, {"dt", dt}, {"y0", 0.0}}, 1'000'000, 2011};
  const auto pairs = wavelet::increments(market::generate(spec).closes());
  const auto fit = sde::estimate_fg(pairs, dt, 32, 1);
  const auto density = sde::stationary_density(fit);
  const double secs = elapsed(t0);

  // Closed forms: F(y) = -theta y, G^2 = sigma^2, Var = sigma^2 / (2 theta).
  const double slope = fit.hermite_f[1] / fit.y_std;
  const double g2 = fit.diffusion2(0.0);
  const double variance = density.variance();
  const double want_var = sigma * sigma / (2.0 * theta);
  const bool ok = near(slope, -theta, kSlopeTolerance * theta) &&
                  near(g2, sigma * sigma, kDiffusionTolerance * sigma * sigma) &&
                  near(variance, want_var, kVarianceTolerance * want_var) && secs < kCriterion2Seconds;
  return {ok, fmt::format("slope {:.4f} (want -1), G2 {:.4f} (want 0.25), variance {:.5f} (want 0.125)", slope, g2,
                          variance)};
}

Outcome wavelet_correctness() {
  std::mt19937_64 rng(4096);
  std::normal_distribution<double> nd(0.0, 1.0);
  double worst_parseval = 0.0, worst_recon = 0.0;
  for (const auto name : {wavelet::FamilyName::haar, wavelet::FamilyName::db4}) {
    const auto family = wavelet::WaveletFamily::from_name(wavelet::to_string(name));
    for (int trial = 0; trial < 100; ++trial) {
      std::vector<double> x(4096);
      for (auto& v : x) v = nd(rng);
      const auto d = wavelet::decompose(x, 8, family);
      double ex = 0.0, ec = 0.0;
      for (double v : x) ex += v * v;
      for (const auto& level : d.details)
        for (double v : level.values) ec += v * v;
      for (double v : d.approximation.values) ec += v * v;
      worst_parseval = std::max(worst_parseval, std::abs(ec - ex) / ex);
      const auto y = wavelet::reconstruct(d, family);
      if (y.size() != x.size()) return {false, "reconstruction changed the length"};
      for (std::size_t i = 0; i < x.size(); ++i) worst_recon = std::max(worst_recon, std::abs(y[i] - x[i]));
    }
  }
  return {worst_parseval <= kWaveletTolerance && worst_recon <= kWaveletTolerance,
          fmt::format("max Parseval rel. error {:.2e}, max reconstruction error {:.2e}", worst_parseval, worst_recon)};
}

Outcome ks_calibration() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(500);
  std::normal_distribution<double> nd(0.0, 1.0);
  const int trials = 1000;
  int rejections = 0;
  std::vector<double> a(500), b(500);
  for (int t = 0; t < trials; ++t) {
    for (auto& v : a) v = nd(rng);
    for (auto& v : b) v = nd(rng);
    rejections += sde::ks_two_sample(a, b, 0.05).reject_equality ? 1 : 0;
  }
  const double rate = static_cast<double>(rejections) / trials;
  const double secs = elapsed(t0);
  return {near(rate, 0.05, kKsRateTolerance) && secs < kCriterion4Seconds,
          fmt::format("false-rejection rate {:.3f} over {} trials", rate, trials)};
}

// Independent objective and lexicographic brute force for criterion 5.
std::size_t oracle_norm(const std::vector<std::uint8_t>& w, const assembly::SignalHistory& h,
                        const std::vector<int>& realized) {
  std::size_t norm = 0;
  for (std::size_t t = 0; t < h.bars(); ++t) {
    if (realized[t] == 0) continue;
    int sum = 0;
    for (std::size_t g = 0; g < h.generators(); ++g) {
      const int a = h.at(t, g);
      if (a != 0 && w[2 * g + (a > 0 ? 0 : 1)]) sum += a;
    }
    norm += ((sum > 0) - (sum < 0)) != realized[t];
  }
  return norm;
}

assembly::GeneratorWeights brute_force(const assembly::SignalHistory& h, const std::vector<int>& realized) {
  const auto slots = 2 * h.generators();
  assembly::GeneratorWeights best{{}, SIZE_MAX};
  std::size_t best_active = SIZE_MAX;
  std::vector<std::uint8_t> w(slots);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << slots); ++code) {
    for (std::size_t k = 0; k < slots; ++k) w[k] = (code >> (slots - 1 - k)) & 1U;
    const auto norm = oracle_norm(w, h, realized);
    const auto active = static_cast<std::size_t>(std::count(w.begin(), w.end(), 1));
    if (norm < best.mismatch_norm || (norm == best.mismatch_norm && active < best_active)) {
      best = {w, norm};
      best_active = active;
    }
  }
  return best;
}

Outcome optimizer_optimality() {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> action(-1, 1);
  std::uniform_int_distribution<std::size_t> gens(1, 6), bars(30, 120);
  std::uniform_real_distribution<double> temp(0.0, 1.0);
  int mismatches = 0, worsened = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto m = gens(rng);
    const auto n = bars(rng);
    assembly::SignalHistory h(m);
    std::vector<int> realized, row(m);
    for (std::size_t t = 0; t < n; ++t) {
      for (auto& a : row) a = action(rng);
      h.push(row);
      realized.push_back(action(rng));
    }
    const auto got = assembly::optimize_weights(h, realized);
    if (!(got == brute_force(h, realized))) ++mismatches;
    auto current = assembly::GeneratorWeights::all_on(m);
    current.mismatch_norm = assembly::mismatch(current.weights, h, realized);
    for (int round = 0; round < 10; ++round) {
      const auto next = assembly::perturb(current, h, realized, temp(rng), rng());
      if (next.mismatch_norm > current.mismatch_norm) ++worsened;
      current = next;
    }
  }
  return {mismatches == 0 && worsened == 0,
          fmt::format("{} of 500 instances differ from brute force, {} perturbation steps worsened", mismatches,
                      worsened)};
}

Outcome capacity_formula() {
  const auto c = assembly::capacity(2, 8, 1);
  const auto text = assembly::to_string(c);
  return {text == "6502809600", "capacity(2, 8, 1) = " + text};
}

Outcome determinism() {
  const auto t0 = std::chrono::steady_clock::now();
  auto cfg = reference_config();
  cfg.seed = 20110411;
  const auto data = load_market(cfg);
  cfg.threads = 1;
  const auto a = run_backtest(cfg, data);
  const auto b = run_backtest(cfg, data);
  cfg.threads = 4;
  const auto c = run_backtest(cfg, data);
  const double secs = elapsed(t0);
  const bool same = a.statement == b.statement && a.statement == c.statement && a.journal == c.journal;
  const std::size_t trades = a.stats ? a.stats->total_trades : 0;
  return {same && secs < kCriterion7Seconds,
          fmt::format("3 runs (threads 1, 1, 4), {} closed trades, statements {}", trades,
                      same ? "byte-identical" : "differ")};
}

}  // namespace

int main() {
  bool statement_ok = false;
  criterion(1, "statement reproduction", [&] {
    auto o = statement_reproduction();
    statement_ok = o.pass;
    return o;
  });
  criterion(2, "SDE recovery", sde_recovery);
  criterion(3, "wavelet correctness", wavelet_correctness);
  criterion(4, "KS calibration", ks_calibration);
  criterion(5, "optimizer optimality", optimizer_optimality);
  criterion(6, "capacity formula", capacity_formula);
  criterion(7, "determinism", determinism);
  // The live 2011 trading profit depends on market data, a broker feed and
  // spreads that no longer exist. Nothing here claims to reproduce it; the
  // only coverage is the accounting check in criterion 1.
  criterion(8, "explicit non-reproducibility", [&] {
    return Outcome{statement_ok,
                   "live April-May 2011 profit NOT reproduced (market data, broker feed and spreads unrecoverable); "
                   "covered only by the statement accounting of criterion 1"};
  });
  return failures == 0 ? 0 : 1;
}
