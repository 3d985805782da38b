#include <chaos/assembly.hpp>
#include <chaos/errors.hpp>

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace chaos;
using namespace chaos::assembly;
using decision::Action;
using decision::Signal;
using decision::Source;

namespace {

struct Instance {
  SignalHistory history;
  std::vector<int> realized;
};

Instance random_instance(std::size_t m, std::size_t bars, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> action(-1, 1);
  Instance in{SignalHistory(m), {}};
  std::vector<int> row(m);
  for (std::size_t t = 0; t < bars; ++t) {
    for (auto& a : row) a = action(rng);
    in.history.push(row);
    in.realized.push_back(action(rng));
  }
  return in;
}

// Independent objective: weighted action sum per bar, sign compared with the realized sign.
std::size_t oracle_norm(const std::vector<std::uint8_t>& w, const Instance& in) {
  std::size_t norm = 0;
  for (std::size_t t = 0; t < in.history.bars(); ++t) {
    if (in.realized[t] == 0) continue;
    int sum = 0;
    for (std::size_t g = 0; g < in.history.generators(); ++g) {
      const int a = in.history.at(t, g);
      const std::size_t slot = 2 * g + (a > 0 ? 0 : 1);
      if (a != 0 && w[slot]) sum += a;
    }
    const int fused = (sum > 0) - (sum < 0);
    norm += fused != in.realized[t];
  }
  return norm;
}

// Enumerates slot vectors in increasing lexicographic order, so the first
// vector reaching the best (norm, active count) is also the lexicographic minimum.
GeneratorWeights brute_force(const Instance& in) {
  const auto slots = 2 * in.history.generators();
  GeneratorWeights best{{}, SIZE_MAX};
  std::size_t best_active = SIZE_MAX;
  std::vector<std::uint8_t> w(slots, 0);
  for (std::uint64_t code = 0; code < (std::uint64_t{1} << slots); ++code) {
    for (std::size_t k = 0; k < slots; ++k) w[k] = (code >> (slots - 1 - k)) & 1U;
    const auto norm = oracle_norm(w, in);
    const auto active = static_cast<std::size_t>(std::count(w.begin(), w.end(), 1));
    if (norm < best.mismatch_norm || (norm == best.mismatch_norm && active < best_active)) {
      best = {w, norm};
      best_active = active;
    }
  }
  return best;
}

int rank(UnitStateKind s) {
  return s == UnitStateKind::passive ? 0 : (s == UnitStateKind::semi_active ? 1 : 2);
}

// A synthetic market at 5 minutes plus resampled layers.
struct Market {
  std::vector<std::string> symbols;
  std::map<int, std::map<std::string, market::QuoteSeries>> series;

  MarketSnapshot at(std::size_t bar) const {
    MarketSnapshot snap;
    snap.symbols = symbols;
    snap.time = series.at(5).at(symbols.front()).bars[bar].timestamp;
    for (const auto& [tf, per_symbol] : series) {
      const auto count = (bar + 1) / static_cast<std::size_t>(tf / 5);
      for (const auto& [sym, s] : per_symbol) snap.series[tf][sym] = std::span<const market::Bar>(s.bars).first(count);
    }
    return snap;
  }
};

Market make_market(const std::vector<std::string>& symbols, std::size_t bars, std::vector<int> timeframes,
                   std::uint64_t seed) {
  Market m{symbols, {}};
  std::uint64_t k = seed;
  for (const auto& sym : symbols) {
    market::SyntheticSpec spec{market::SyntheticKind::ornstein_uhlenbeck,
                               {{"theta", 0.05}, {"sigma", 0.002}, {"mu", 1.3}, {"y0", 1.3}, {"dt", 1.0}},
                               bars, k++, sym, 5};
    const auto base = market::generate(spec);
    m.series[5][sym] = base;
    for (int tf : timeframes) m.series[tf][sym] = market::resample(base, tf / 5);
  }
  return m;
}

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.window = 128;
  cfg.reopt_every = 6;
  cfg.optimize_window = 60;
  cfg.state_window = 24;
  cfg.corr_window = 48;
  cfg.seed = 42;
  return cfg;
}

double expected_score(const std::vector<Signal>& signals, const GeneratorWeights& w) {
  double sum = 0.0;
  int n = 0;
  for (std::size_t g = 0; g < signals.size(); ++g) {
    const int a = decision::direction(signals[g].action);
    if (a == 0 || !w.slot(g, a)) continue;
    sum += a * signals[g].strength;
    ++n;
  }
  return n ? std::clamp(sum / n, -1.0, 1.0) : 0.0;
}

}  // namespace

TEST(OptimizeWeights, PerfectGenerator) {
  SignalHistory h(1);
  std::vector<int> realized;
  for (int t = 0; t < 40; ++t) {
    const int s = t % 3 == 0 ? -1 : 1;
    h.push(std::vector<int>{s});
    realized.push_back(s);
  }
  const auto w = optimize_weights(h, realized);
  EXPECT_EQ(w.weights, (std::vector<std::uint8_t>{1, 1}));
  EXPECT_EQ(w.mismatch_norm, 0u);
}

TEST(OptimizeWeights, DominantGeneratorWins) {
  SignalHistory h(2);
  std::vector<int> realized;
  for (int t = 0; t < 40; ++t) {
    const int s = t % 2 ? -1 : 1;
    h.push(std::vector<int>{s, -s});
    realized.push_back(s);
  }
  const auto w = optimize_weights(h, realized);
  EXPECT_EQ(w.weights, (std::vector<std::uint8_t>{1, 1, 0, 0}));
  EXPECT_EQ(w.mismatch_norm, 0u);
}

TEST(OptimizeWeights, MatchesBruteForceOracle) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> gens(1, 6), bars(30, 80);
  for (int trial = 0; trial < 500; ++trial) {
    const auto in = random_instance(gens(rng), bars(rng), rng);
    const auto got = optimize_weights(in.history, in.realized);
    const auto want = brute_force(in);
    ASSERT_EQ(got.mismatch_norm, want.mismatch_norm) << "trial " << trial;
    ASSERT_EQ(got.weights, want.weights) << "trial " << trial;
    ASSERT_EQ(got.mismatch_norm, mismatch(got.weights, in.history, in.realized));
  }
}

TEST(OptimizeWeights, FourGeneratorsOverTwoHundredBars) {
  std::mt19937_64 rng(4);
  const auto in = random_instance(4, 200, rng);
  EXPECT_EQ(optimize_weights(in.history, in.realized).mismatch_norm, brute_force(in).mismatch_norm);
}

TEST(OptimizeWeights, HeuristicPathIsCertifiedAndSeeded) {
  std::mt19937_64 rng(6);
  const auto in = random_instance(12, 120, rng);
  OptimizerOptions opt;
  opt.seed = 99;
  const auto a = optimize_weights(in.history, in.realized, opt);
  const auto b = optimize_weights(in.history, in.realized, opt);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.mismatch_norm, mismatch(a.weights, in.history, in.realized));
  const std::vector<std::uint8_t> zero(24, 0);
  EXPECT_LE(a.mismatch_norm, mismatch(zero, in.history, in.realized));

  const auto small = random_instance(4, 100, rng);
  opt.exhaustive_limit = 2;
  EXPECT_GE(optimize_weights(small.history, small.realized, opt).mismatch_norm, brute_force(small).mismatch_norm);
}

TEST(OptimizeWeights, ZeroRealizedBarsExcluded) {
  std::mt19937_64 rng(8);
  auto in = random_instance(3, 50, rng);
  for (auto& r : in.realized) r = 0;
  const auto w = optimize_weights(in.history, in.realized);
  EXPECT_EQ(w.mismatch_norm, 0u);
  EXPECT_EQ(w.active(), 0u);
}

TEST(OptimizeWeights, Errors) {
  SignalHistory empty(2);
  EXPECT_THROW(optimize_weights(empty, {}), EmptyHistory);
  std::mt19937_64 rng(1);
  const auto in = random_instance(2, 40, rng);
  const std::vector<int> short_signs(39, 1);
  EXPECT_THROW(optimize_weights(in.history, short_signs), LengthMismatch);
  const auto few = random_instance(2, 29, rng);
  EXPECT_THROW(optimize_weights(few.history, few.realized), InsufficientData);
  SignalHistory two(2);
  EXPECT_THROW(two.push(std::vector<int>{1}), LengthMismatch);
}

TEST(Perturb, TemperatureZeroKeepsIncumbent) {
  std::mt19937_64 rng(3);
  const auto in = random_instance(4, 60, rng);
  GeneratorWeights w{{1, 0, 1, 1, 0, 0, 1, 0}, 0};
  const auto out = perturb(w, in.history, in.realized, 0.0, 7);
  EXPECT_EQ(out.weights, w.weights);
  EXPECT_EQ(out.mismatch_norm, mismatch(w.weights, in.history, in.realized));
}

TEST(Perturb, WorseCandidateDoesNotSurvive) {
  SignalHistory h(1);
  std::vector<int> realized;
  for (int t = 0; t < 40; ++t) {
    h.push(std::vector<int>{t % 2 ? 1 : -1});
    realized.push_back(t % 2 ? 1 : -1);
  }
  // Temperature 1 flips every bit, turning the perfect vector into the empty one.
  const auto incumbent = optimize_weights(h, realized);
  const auto out = perturb(incumbent, h, realized, 1.0, 5);
  EXPECT_EQ(out, incumbent);
  EXPECT_THROW(perturb(incumbent, h, realized, 1.5, 5), InvalidParameter);
}

TEST(Perturb, RoundsNeverWorsen) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    const auto in = random_instance(4, 200, rng);
    GeneratorWeights w{std::vector<std::uint8_t>(8, 1), 0};
    w.mismatch_norm = mismatch(w.weights, in.history, in.realized);
    const auto initial = w.mismatch_norm;
    for (int round = 0; round < 100; ++round) {
      const auto next = perturb(w, in.history, in.realized, 0.3, rng());
      ASSERT_LE(next.mismatch_norm, w.mismatch_norm);
      w = next;
    }
    EXPECT_LE(w.mismatch_norm, initial);
    EXPECT_GE(w.mismatch_norm, brute_force(in).mismatch_norm);
  }
}

TEST(Perturb, DeterministicUnderSeed) {
  std::mt19937_64 rng(13);
  const auto in = random_instance(5, 80, rng);
  GeneratorWeights w{std::vector<std::uint8_t>(10, 1), 0};
  EXPECT_EQ(perturb(w, in.history, in.realized, 0.5, 77), perturb(w, in.history, in.realized, 0.5, 77));
}

TEST(VerticalFeedback, Encoding) {
  EXPECT_TRUE(vertical_feedback(std::vector<Signal>{{Action::enter_long, Source::dynamic, 1.0}}, 0).empty());
  const std::vector<Signal> h{{Action::enter_long, Source::dynamic, 0.5}, Signal::hold(Source::dynamic),
                              {Action::enter_short, Source::dynamic, 0.5}};
  EXPECT_EQ(vertical_feedback(h, 3), (std::vector<int>{1, 0, -1}));
}

TEST(VerticalFeedback, ExtraInputNeverIncreasesNorm) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> action(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto in = random_instance(3, 60, rng);
    SignalHistory with(4);
    int previous = 0;
    for (std::size_t t = 0; t < in.history.bars(); ++t) {
      std::vector<int> row(in.history.row(t).begin(), in.history.row(t).end());
      row.push_back(previous);
      with.push(row);
      previous = action(rng);
    }
    const auto base = optimize_weights(in.history, in.realized);
    const auto fed = optimize_weights(with, in.realized);
    EXPECT_LE(fed.mismatch_norm, base.mismatch_norm);
  }
}

TEST(Capacity, Examples) {
  EXPECT_EQ(to_string(capacity(2, 8, 1)), "6502809600");
  EXPECT_EQ(to_string(capacity(1, 1, 0)), "1");
  EXPECT_EQ(to_string(capacity(3, 2, 0)), "12");
  EXPECT_EQ(to_string(capacity(34, 1, 0)), "295232799039604140847618609643520000000");
  EXPECT_THROW(capacity(35, 1, 0), Overflow);
  EXPECT_THROW(capacity(30, 30, 1), Overflow);
  EXPECT_THROW(capacity(0, 1, 0), InvalidParameter);
  EXPECT_THROW(capacity(1, 1, -1), InvalidParameter);
}

TEST(Coupling, SignPropagation) {
  auto pos = CouplingMatrix::identity({"eurusd", "gbpusd"});
  pos.at(0, 1) = pos.at(1, 0) = 1.0;
  const auto a = couple({{"eurusd", -0.8}, {"gbpusd", 0.0}}, pos);
  EXPECT_LT(a.at("gbpusd"), 0.0);
  EXPECT_NEAR(a.at("gbpusd"), -0.4, 1e-12);

  auto neg = pos;
  neg.at(0, 1) = neg.at(1, 0) = -1.0;
  EXPECT_GT(couple({{"eurusd", -0.8}, {"gbpusd", 0.0}}, neg).at("gbpusd"), 0.0);

  const auto id = CouplingMatrix::identity({"eurusd", "gbpusd", "usdjpy"});
  const ScoreMap raw{{"eurusd", 0.3}, {"gbpusd", -0.7}, {"usdjpy", 0.1}};
  EXPECT_EQ(couple(raw, id), raw);
}

TEST(Coupling, SingleSymbolAndUnknown) {
  const auto id = CouplingMatrix::identity({"eurusd"});
  const ScoreMap one{{"eurusd", 0.9}};
  EXPECT_EQ(couple(one, id, 5.0), one);
  EXPECT_THROW(couple({{"audusd", 0.1}}, id), UnknownSymbol);
}

TEST(Coupling, KappaZeroIdentityAndStrongConvictionsKeepSign) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0), k(0.0, 1.0);
  const std::vector<std::string> syms{"a", "b", "c", "d", "e"};
  for (int trial = 0; trial < 500; ++trial) {
    auto rho = CouplingMatrix::identity(syms);
    for (std::size_t i = 0; i < syms.size(); ++i)
      for (std::size_t j = i + 1; j < syms.size(); ++j) rho.at(i, j) = rho.at(j, i) = u(rng);
    ScoreMap raw;
    for (const auto& s : syms) raw[s] = u(rng);
    EXPECT_EQ(couple(raw, rho, 0.0), raw);
    const double kappa = k(rng);
    const auto adj = couple(raw, rho, kappa);
    for (const auto& [s, v] : raw) {
      EXPECT_LE(std::abs(adj.at(s)), 1.0);
      if (std::abs(v) > kappa) EXPECT_EQ(v > 0, adj.at(s) > 0) << s;
    }
  }
}

TEST(Coupling, EstimateMatchesPearson) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> nd;
  std::vector<double> a(200), b(200), c(200);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = nd(rng);
    b[i] = 0.6 * a[i] + 0.8 * nd(rng);
    c[i] = -2.0 * a[i] + 1.0;
  }
  const auto m = estimate_coupling({"a", "b", "c"}, {a, b, c}, 100);
  auto pearson = [](std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      sx += x[i];
      sy += y[i];
      sxx += x[i] * x[i];
      syy += y[i] * y[i];
      sxy += x[i] * y[i];
    }
    return (sxy - sx * sy / n) / std::sqrt((sxx - sx * sx / n) * (syy - sy * sy / n));
  };
  EXPECT_NEAR(m.at(0, 1), pearson(std::span(a).last(100), std::span(b).last(100)), 1e-12);
  EXPECT_NEAR(m.at(0, 2), -1.0, 1e-12);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(m.at(i, i), 1.0);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(m.at(i, j), m.at(j, i));
  }
  EXPECT_THROW(estimate_coupling({"a"}, {std::vector<double>(10)}, 20), SeriesTooShort);
  EXPECT_THROW(estimate_coupling({"a", "b"}, {a}, 20), LengthMismatch);
}

TEST(UnitStates, Examples) {
  const std::vector<int> realized{1, -1, 1, 1, -1, -1};
  const std::vector<int> wrong{-1, 1, -1, -1, 1, 1};
  EXPECT_EQ(update_state({}, realized, realized).state, UnitStateKind::active);
  EXPECT_EQ(update_state({}, wrong, realized).state, UnitStateKind::passive);
  const std::vector<int> half{1, 1, 1, -1, -1, 1};
  const auto s = update_state({}, half, realized);
  EXPECT_DOUBLE_EQ(s.hit_rate, 0.5);
  EXPECT_EQ(s.state, UnitStateKind::semi_active);
  EXPECT_THROW(update_state({}, half, std::vector<int>{1}), LengthMismatch);
}

TEST(UnitStates, NoCallsKeepPreviousState) {
  UnitState passive{UnitStateKind::passive, 0.2, 6};
  const std::vector<int> none(6, 0), realized{1, -1, 1, 1, -1, -1};
  const auto s = update_state(passive, none, realized);
  EXPECT_EQ(s.state, UnitStateKind::passive);
  EXPECT_EQ(s.hit_rate, 0.2);
}

TEST(UnitStates, MonotoneInHitRate) {
  std::mt19937_64 rng(51);
  std::uniform_int_distribution<int> sign(0, 1), len(1, 40);
  for (int trial = 0; trial < 2000; ++trial) {
    const auto n = static_cast<std::size_t>(len(rng));
    std::vector<int> realized(n), predicted(n);
    for (std::size_t i = 0; i < n; ++i) {
      realized[i] = sign(rng) ? 1 : -1;
      predicted[i] = sign(rng) ? 1 : -1;
    }
    const auto before = update_state({}, predicted, realized);
    std::size_t k = 0;
    while (k < n && predicted[k] == realized[k]) ++k;
    if (k == n) continue;
    predicted[k] = -predicted[k];
    const auto after = update_state({}, predicted, realized);
    EXPECT_GT(after.hit_rate, before.hit_rate);
    EXPECT_GE(rank(after.state), rank(before.state));
  }
}

TEST(AssemblyNode, Validation) {
  const auto leaf = AssemblyNode::elementary(5, nsw_generators());
  EXPECT_NO_THROW(AssemblyNode::homothetic(15, {leaf}).validate(1));
  EXPECT_THROW(AssemblyNode::homothetic(5, {leaf}).validate(1), InvalidParameter);
  EXPECT_THROW(AssemblyNode::homothetic(12, {leaf}).validate(1), InvalidParameter);
  const auto nested = AssemblyNode::homothetic(60, {AssemblyNode::homothetic(15, {leaf})});
  EXPECT_EQ(nested.depth(), 2);
  EXPECT_THROW(nested.validate(1), InvalidParameter);
  EXPECT_NO_THROW(nested.validate(2));
  EXPECT_THROW(AssemblyNode::elementary(5, {}).validate(1), InvalidParameter);
  auto bad = leaf;
  bad.children.push_back(leaf);
  EXPECT_THROW(bad.validate(1), InvalidParameter);
  auto fb = AssemblyNode::homothetic(15, {leaf});
  fb.feedback_depth = 2;
  EXPECT_EQ(fb.input_count(), 2u);
}

TEST(EvaluateNode, ElementaryMatchesUnitPipeline) {
  const auto mkt = make_market({"eurusd"}, 400, {}, 1);
  const auto cfg = small_config();
  const auto node = AssemblyNode::elementary(5, all_generators());
  NodeState state;
  int entries = 0;
  for (std::size_t i = 0; i < 400; ++i) {
    const auto snap = mkt.at(i);
    auto r = evaluate_node(node, snap, state, cfg);
    const auto& sig = r.output.signals.at("eurusd");
    const auto bars = snap.bars(5, "eurusd");
    const auto nsw = nsw_signals(market::closes(bars.last(std::min(bars.size(), cfg.window))), cfg);
    ASSERT_EQ(sig.size(), 6u);
    EXPECT_EQ(sig[0], nsw.dynamic);
    EXPECT_EQ(sig[1], nsw.statistical);
    EXPECT_EQ(sig[2], nsw.convolution);
    const auto& st = r.state.symbols.at("eurusd");
    const double want = st.unit.state == UnitStateKind::passive ? 0.0 : expected_score(sig, st.weights);
    EXPECT_DOUBLE_EQ(r.output.scores.at("eurusd"), want) << "bar " << i;
    EXPECT_TRUE(r.output.fresh.at("eurusd"));
    entries += want != 0.0;
    state = std::move(r.state);
  }
  EXPECT_GT(entries, 0);
}

TEST(EvaluateNode, SingleChildPassesThroughParentSlot) {
  const auto mkt = make_market({"eurusd"}, 450, {15}, 2);
  const auto cfg = small_config();
  const auto node = AssemblyNode::homothetic(15, {AssemblyNode::elementary(5, all_generators())});
  NodeState state;
  int fresh = 0, nonzero = 0;
  for (std::size_t i = 0; i < 450; ++i) {
    auto r = evaluate_node(node, mkt.at(i), state, cfg);
    const double child = r.output.children.at(0).scores.at("eurusd");
    const double parent = r.output.scores.at("eurusd");
    const auto& st = r.state.symbols.at("eurusd");
    if (r.output.fresh.at("eurusd")) {
      ++fresh;
      const int a = (child > 0) - (child < 0);
      const bool on = a != 0 && st.weights.slot(0, a);
      const double want = st.unit.state == UnitStateKind::passive || !on ? 0.0 : child;
      EXPECT_DOUBLE_EQ(parent, want) << "bar " << i;
      nonzero += parent != 0.0;
    } else {
      EXPECT_DOUBLE_EQ(parent, st.unit.state == UnitStateKind::passive ? 0.0 : st.raw_score);
    }
    state = std::move(r.state);
  }
  EXPECT_EQ(fresh, 150);
  EXPECT_GT(nonzero, 0);
}

TEST(EvaluateNode, DuplicatedChildEqualsSingleChild) {
  const auto mkt = make_market({"eurusd", "gbpusd"}, 360, {15}, 3);
  const auto cfg = small_config();
  const auto leaf = AssemblyNode::elementary(5, all_generators());
  const auto one = AssemblyNode::homothetic(15, {leaf});
  const auto two = AssemblyNode::homothetic(15, {leaf, leaf});
  NodeState s1, s2;
  for (std::size_t i = 0; i < 360; ++i) {
    const auto snap = mkt.at(i);
    auto r1 = evaluate_node(one, snap, s1, cfg);
    auto r2 = evaluate_node(two, snap, s2, cfg);
    ASSERT_EQ(r2.output.children.size(), 2u);
    EXPECT_EQ(r2.output.children[0].scores, r2.output.children[1].scores);
    for (const auto& sym : snap.symbols) EXPECT_DOUBLE_EQ(r1.output.scores.at(sym), r2.output.scores.at(sym)) << sym << " " << i;
    s1 = std::move(r1.state);
    s2 = std::move(r2.state);
  }
}

TEST(EvaluateNode, DeterministicAcrossRunsAndThreads) {
  const std::vector<std::string> syms{"eurusd", "gbpusd", "usdjpy", "audusd"};
  const auto mkt = make_market(syms, 300, {15}, 4);
  auto node = AssemblyNode::homothetic(15, {AssemblyNode::elementary(5, all_generators())}, nsw_generators());
  node.feedback_depth = 1;
  auto run = [&](unsigned threads) {
    auto cfg = small_config();
    cfg.threads = threads;
    cfg.perturb_rounds = 8;
    std::vector<ScoreMap> trace;
    NodeState state;
    for (std::size_t i = 0; i < 300; ++i) {
      auto r = evaluate_node(node, mkt.at(i), state, cfg);
      trace.push_back(r.output.scores);
      trace.push_back(r.output.children[0].scores);
      state = std::move(r.state);
    }
    return trace;
  };
  const auto a = run(1);
  EXPECT_EQ(a, run(1));
  EXPECT_EQ(a, run(3));
}

TEST(EvaluateNode, PureInItsState) {
  const auto mkt = make_market({"eurusd"}, 200, {}, 5);
  const auto cfg = small_config();
  const auto node = AssemblyNode::elementary(5, nsw_generators());
  NodeState state;
  for (std::size_t i = 0; i < 199; ++i) state = evaluate_node(node, mkt.at(i), state, cfg).state;
  const auto copy_bars = state.symbols.at("eurusd").bars_seen;
  const auto a = evaluate_node(node, mkt.at(199), state, cfg);
  const auto b = evaluate_node(node, mkt.at(199), state, cfg);
  EXPECT_EQ(state.symbols.at("eurusd").bars_seen, copy_bars);
  EXPECT_EQ(a.output.scores, b.output.scores);
}

TEST(EvaluateNode, MissingTimeframe) {
  const auto mkt = make_market({"eurusd"}, 60, {}, 6);
  const auto node = AssemblyNode::homothetic(15, {AssemblyNode::elementary(5, nsw_generators())});
  EXPECT_THROW(evaluate_node(node, mkt.at(59), {}, small_config()), MissingTimeframeData);
  MarketSnapshot snap = mkt.at(59);
  snap.symbols.push_back("gbpusd");
  EXPECT_THROW(evaluate_node(AssemblyNode::elementary(5, nsw_generators()), snap, {}, small_config()), MissingTimeframeData);
}
