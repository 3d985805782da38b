#include <chaos/assembly.hpp>
#include <chaos/errors.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <thread>

namespace chaos::assembly {

using decision::Signal;
using decision::Source;

AssemblyNode AssemblyNode::elementary(int timeframe, std::vector<Source> generators) {
  AssemblyNode n;
  n.kind = NodeKind::elementary;
  n.timeframe = timeframe;
  n.generators = std::move(generators);
  return n;
}

AssemblyNode AssemblyNode::homothetic(int timeframe, std::vector<AssemblyNode> children, std::vector<Source> generators) {
  AssemblyNode n;
  n.kind = NodeKind::homothetic;
  n.timeframe = timeframe;
  n.children = std::move(children);
  n.generators = std::move(generators);
  return n;
}

int AssemblyNode::depth() const {
  int d = 0;
  for (const auto& c : children) d = std::max(d, c.depth() + 1);
  return d;
}

void AssemblyNode::validate(int k_max) const {
  if (timeframe <= 0) throw InvalidParameter("timeframe", "must be > 0");
  if (feedback_depth < 0) throw InvalidParameter("feedback_depth", "must be >= 0");
  if (kind == NodeKind::elementary && !children.empty())
    throw InvalidParameter("children", "an elementary node has no children");
  if (kind == NodeKind::homothetic && children.empty())
    throw InvalidParameter("children", "a homothetic node needs at least one child");
  if (input_count() == 0) throw InvalidParameter("generators", "node has no inputs");
  if (depth() > k_max) throw InvalidParameter("k_max", "nesting depth " + std::to_string(depth()) + " exceeds limit");
  for (const auto& c : children) {
    if (timeframe % c.timeframe != 0 || timeframe / c.timeframe < 2)
      throw InvalidParameter("timeframe", "parent timeframe must be a multiple >= 2 of each child's");
    c.validate(k_max);
  }
}

std::size_t AssemblyNode::input_count() const {
  return generators.size() + children.size() + (feedback_depth > 0 ? 1 : 0);
}

std::vector<Source> nsw_generators() { return {Source::dynamic, Source::statistical, Source::convolution}; }

std::vector<Source> all_generators() {
  return {Source::dynamic, Source::statistical, Source::convolution, Source::macd, Source::bollinger, Source::rsi};
}

std::span<const market::Bar> MarketSnapshot::bars(int timeframe, const std::string& symbol) const {
  const auto tf = series.find(timeframe);
  if (tf == series.end()) throw MissingTimeframeData("no series at timeframe " + std::to_string(timeframe));
  const auto it = tf->second.find(symbol);
  if (it == tf->second.end())
    throw MissingTimeframeData("no " + std::to_string(timeframe) + "-minute series for " + symbol);
  return it->second;
}

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t node_id, const std::string& symbol, std::uint64_t bar) {
  return splitmix(splitmix(splitmix(seed ^ splitmix(node_id)) ^ fnv1a(symbol)) ^ bar);
}

wavelet::WaveletFamily family_of(wavelet::FamilyName name) {
  return name == wavelet::FamilyName::haar ? wavelet::WaveletFamily::haar() : wavelet::WaveletFamily::db4();
}

// Fit and density on a coefficient stretch. Sparse stretches get fewer bins.
std::optional<sde::StationaryDensity> density_of(std::span<const double> coeffs, double dtau, const PipelineConfig& cfg) {
  const auto pairs = wavelet::increments(coeffs);
  auto opts = cfg.fit;
  opts.bins = std::clamp(static_cast<int>(pairs.size() / 10), 5, cfg.fit.bins);
  try {
    return sde::stationary_density(sde::estimate_fg(pairs, dtau, opts), cfg.grid_points);
  } catch (const ValidationError&) {
    return std::nullopt;
  }
}

decision::IndicatorKind indicator_kind(Source s) {
  switch (s) {
    case Source::macd: return decision::IndicatorKind::macd;
    case Source::bollinger: return decision::IndicatorKind::bollinger;
    default: return decision::IndicatorKind::rsi;
  }
}

struct Contribution {
  int action = 0;
  double strength = 0.0;
};

struct SymbolStep {
  SymbolState state;
  std::vector<Signal> signals;
  bool fresh = false;
};

SymbolStep step_symbol(const AssemblyNode& node, std::span<const market::Bar> bars, const std::vector<double>& child_scores,
                       SymbolState st, const PipelineConfig& cfg, std::uint64_t node_id, const std::string& symbol) {
  ++st.node_evaluations;
  if (bars.size() <= st.bars_seen || bars.empty()) {
    auto previous = st.own_signals;
    return {std::move(st), std::move(previous), false};
  }

  const double close = bars.back().close;
  const std::size_t inputs = node.input_count();
  if (st.history.generators() != inputs) st.history = SignalHistory(inputs);

  // Settle the row recorded on the previous bar against the realized move.
  if (!st.pending_row.empty()) {
    const int realized = sign_of(close - st.last_close);
    st.history.push(st.pending_row);
    st.realized.push_back(realized);
    st.predictions.push_back(st.pending_prediction);
    st.outcomes.push_back(realized);
    if (st.history.bars() > cfg.optimize_window) {
      st.history.trim_front(cfg.optimize_window);
      st.realized.erase(st.realized.begin(), st.realized.end() - static_cast<std::ptrdiff_t>(cfg.optimize_window));
    }
    if (st.predictions.size() > cfg.state_window) {
      const auto drop = static_cast<std::ptrdiff_t>(st.predictions.size() - cfg.state_window);
      st.predictions.erase(st.predictions.begin(), st.predictions.begin() + drop);
      st.outcomes.erase(st.outcomes.begin(), st.outcomes.begin() + drop);
    }
    if (st.predictions.size() == cfg.state_window)
      st.unit = update_state(st.unit, st.predictions, st.outcomes, cfg.thresholds);
  }
  st.bars_seen = bars.size();
  st.last_close = close;

  // Generator signals on the newest completed bar.
  std::vector<Signal> signals;
  std::vector<Contribution> inputs_now;
  bool need_nsw = false;
  for (auto g : node.generators) need_nsw |= g == Source::dynamic || g == Source::statistical || g == Source::convolution;
  NswSignals nsw;
  if (need_nsw) {
    const auto c = market::closes(bars.last(std::min(bars.size(), cfg.window)));
    nsw = nsw_signals(c, cfg);
  }
  for (auto g : node.generators) {
    Signal s = Signal::hold(g);
    switch (g) {
      case Source::dynamic: s = nsw.dynamic; break;
      case Source::statistical: s = nsw.statistical; break;
      case Source::convolution: s = nsw.convolution; break;
      default:
        try {
          s = decision::indicator_signal(bars, indicator_kind(g), cfg.indicator_params);
        } catch (const ValidationError&) {
          s = Signal::hold(g);
        }
    }
    signals.push_back(s);
    inputs_now.push_back({decision::direction(s.action), s.strength});
  }
  for (double cs : child_scores) inputs_now.push_back({sign_of(cs), std::abs(cs)});
  if (node.feedback_depth > 0) {
    const int fb = st.decisions.empty() ? 0 : st.decisions.back();
    inputs_now.push_back({fb, fb == 0 ? 0.0 : 1.0});
  }

  // Re-optimize on schedule once enough settled rows exist.
  if (st.weights.weights.size() != 2 * inputs) st.weights = GeneratorWeights::all_on(inputs);
  if (st.history.bars() >= 30 && cfg.reopt_every > 0 && st.bars_seen % cfg.reopt_every == 0) {
    OptimizerOptions opt;
    opt.seed = derive_seed(cfg.seed, node_id, symbol, st.bars_seen);
    opt.rounds = cfg.perturb_rounds;
    opt.temperature = cfg.temperature;
    st.weights = optimize_weights(st.history, st.realized, opt);
  }

  // Average of the weighted contributing generators.
  double sum = 0.0;
  int count = 0;
  for (std::size_t g = 0; g < inputs_now.size(); ++g) {
    const auto& in = inputs_now[g];
    if (in.action == 0 || !st.weights.slot(g, in.action)) continue;
    sum += in.action * in.strength;
    ++count;
  }
  st.raw_score = count == 0 ? 0.0 : std::clamp(sum / count, -1.0, 1.0);

  st.pending_row.clear();
  for (const auto& in : inputs_now) st.pending_row.push_back(in.action);
  st.pending_prediction = sign_of(st.raw_score);
  st.decisions.push_back(st.pending_prediction);
  const auto keep = static_cast<std::size_t>(std::max(node.feedback_depth, 1));
  if (st.decisions.size() > keep) st.decisions.erase(st.decisions.begin(), st.decisions.end() - static_cast<std::ptrdiff_t>(keep));
  st.own_signals = signals;
  return {std::move(st), std::move(signals), true};
}

CouplingMatrix coupling_for(const AssemblyNode& node, const MarketSnapshot& snapshot, const PipelineConfig& cfg) {
  std::vector<std::vector<double>> returns;
  for (const auto& s : snapshot.symbols) {
    const auto bars = snapshot.bars(node.timeframe, s);
    if (bars.size() < cfg.corr_window + 1) return CouplingMatrix::identity(snapshot.symbols);
    std::vector<double> r;
    r.reserve(cfg.corr_window);
    for (std::size_t i = bars.size() - cfg.corr_window; i < bars.size(); ++i) r.push_back(bars[i].close - bars[i - 1].close);
    returns.push_back(std::move(r));
  }
  return estimate_coupling(snapshot.symbols, returns, cfg.corr_window);
}

}  // namespace

NswSignals nsw_signals(std::span<const double> closes, const PipelineConfig& cfg) {
  NswSignals out;
  if (cfg.scale < 1) throw InvalidParameter("scale", "must be >= 1");
  if (closes.size() < cfg.window) return out;
  const auto tail = closes.last(cfg.window);
  const auto dec = wavelet::decompose(tail, cfg.scale, family_of(cfg.family));
  const auto& c = dec.details[static_cast<std::size_t>(cfg.scale - 1)].values;
  if (c.size() < 3) return out;
  const double dtau = std::ldexp(1.0, cfg.scale);

  const auto whole = density_of(c, dtau, cfg);
  if (!whole) return out;
  out.p_s = std::clamp(sde::prob_nonpositive(*whole), 0.0, 1.0);
  out.valid = true;

  // KS between the window and its T-shifted copy, in coefficient steps.
  const auto shift = static_cast<std::size_t>(std::max(1, cfg.risk.shift_T >> cfg.scale));
  const std::span<const double> cs(c);
  bool ks_ok = c.size() > shift + 20;
  if (ks_ok) {
    const auto ks = sde::ks_two_sample(cs.first(c.size() - shift), cs.subspan(shift), cfg.risk.ks_alpha);
    out.ks_reject = ks.reject_equality;
  }

  const double y = c[c.size() - 2];
  const double dy = c.back() - y;
  sde::KSResult gate;
  gate.reject_equality = out.ks_reject;
  if (decision::stationarity_gate(gate, decision::Criterion::dynamic)) {
    out.dynamic = decision::dynamic_signal(y, dy, out.p_s, cfg.risk);
    out.statistical = decision::statistical_signal(out.p_s, cfg.risk, Source::statistical);
  }
  if (ks_ok && decision::stationarity_gate(gate, decision::Criterion::convolution)) {
    const auto now = density_of(cs.first(c.size() - shift), dtau, cfg);
    const auto later = density_of(cs.subspan(shift), dtau, cfg);
    if (now && later) {
      try {
        out.p_s_conv = std::clamp(sde::prob_nonpositive(sde::convolve_shifted(*now, *later)), 0.0, 1.0);
        out.convolution = decision::statistical_signal(out.p_s_conv, cfg.risk, Source::convolution);
      } catch (const ValidationError&) {
      }
    }
  }
  return out;
}

NodeResult evaluate_node(const AssemblyNode& node, const MarketSnapshot& snapshot, const NodeState& state,
                         const PipelineConfig& cfg, std::uint64_t node_id) {
  NodeResult result;
  result.output.timeframe = node.timeframe;
  result.state = state;
  result.state.children.resize(node.children.size());

  // Children first; each child's coupled score is one more generator here.
  std::vector<NodeOutput> child_out;
  for (std::size_t i = 0; i < node.children.size(); ++i) {
    auto r = evaluate_node(node.children[i], snapshot, result.state.children[i], cfg, node_id * 8 + 1 + i);
    child_out.push_back(std::move(r.output));
    result.state.children[i] = std::move(r.state);
  }
  result.output.children = child_out;

  const auto& symbols = snapshot.symbols;
  std::vector<std::span<const market::Bar>> bars;
  for (const auto& s : symbols) bars.push_back(snapshot.bars(node.timeframe, s));

  std::vector<SymbolStep> steps(symbols.size());
  auto run = [&](std::size_t i) {
    std::vector<double> child_scores;
    for (const auto& co : child_out) {
      const auto it = co.scores.find(symbols[i]);
      child_scores.push_back(it == co.scores.end() ? 0.0 : it->second);
    }
    const auto found = state.symbols.find(symbols[i]);
    SymbolState st = found == state.symbols.end() ? SymbolState{} : found->second;
    steps[i] = step_symbol(node, bars[i], child_scores, std::move(st), cfg, node_id, symbols[i]);
  };
  const auto workers = std::min<std::size_t>(std::max(1U, cfg.threads), symbols.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < symbols.size(); ++i) run(i);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < symbols.size(); i += workers) run(i);
      });
  }

  // Synchronization point: coupling over contributing (non-passive) units.
  ScoreMap raw;
  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const auto& st = steps[i].state;
    if (st.unit.state != UnitStateKind::passive) raw[symbols[i]] = st.raw_score;
  }
  const auto rho = raw.size() > 1 ? coupling_for(node, snapshot, cfg) : CouplingMatrix::identity(symbols);
  const auto adjusted = couple(raw, rho, cfg.kappa);

  for (std::size_t i = 0; i < symbols.size(); ++i) {
    const auto& sym = symbols[i];
    const auto it = adjusted.find(sym);
    result.output.scores[sym] = it == adjusted.end() ? 0.0 : it->second;
    result.output.signals[sym] = std::move(steps[i].signals);
    result.output.states[sym] = steps[i].state.unit.state;
    result.output.fresh[sym] = steps[i].fresh;
    result.state.symbols[sym] = std::move(steps[i].state);
  }
  return result;
}

}  // namespace chaos::assembly
