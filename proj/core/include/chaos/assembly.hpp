#pragma once

#include <chaos/decision.hpp>
#include <chaos/market_data.hpp>
#include <chaos/sde.hpp>
#include <chaos/wavelet.hpp>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace chaos::assembly {

// ---------------------------------------------------------------------------
// Boolean weight optimization (unit 4)
// ---------------------------------------------------------------------------

/// Generator actions per bar in {-1, 0, +1}, row-major.
class SignalHistory {
 public:
  SignalHistory() = default;
  explicit SignalHistory(std::size_t generators) : generators_(generators) {}

  void push(std::span<const int> row);
  /// Keeps only the newest `bars` rows.
  void trim_front(std::size_t bars);

  std::size_t bars() const noexcept { return generators_ == 0 ? 0 : actions_.size() / generators_; }
  std::size_t generators() const noexcept { return generators_; }
  int at(std::size_t bar, std::size_t generator) const { return actions_[bar * generators_ + generator]; }
  std::span<const int> row(std::size_t bar) const {
    return {actions_.data() + bar * generators_, generators_};
  }

 private:
  std::size_t generators_ = 0;
  std::vector<int> actions_;
};

/// One Boolean weight per (generator, action class) slot: slot 2g weights
/// generator g's long-pressure actions, slot 2g+1 its short-pressure actions.
struct GeneratorWeights {
  std::vector<std::uint8_t> weights;
  std::size_t mismatch_norm = 0;

  static GeneratorWeights all_on(std::size_t generators);
  std::size_t active() const noexcept;
  bool slot(std::size_t generator, int action) const;
  friend bool operator==(const GeneratorWeights&, const GeneratorWeights&) = default;
};

/// sign(sum of weighted actions) for one bar.
int fused_sign(std::span<const std::uint8_t> weights, std::span<const int> actions);

/// Bars where the fused sign differs from the realized sign. Bars with a
/// zero realized sign (no quote change) are excluded.
std::size_t mismatch(std::span<const std::uint8_t> weights, const SignalHistory& history,
                     std::span<const int> realized_signs);

struct OptimizerOptions {
  std::size_t exhaustive_limit = 10;  // generators
  std::uint64_t seed = 0;
  int rounds = 200;                   // perturbation rounds for the heuristic path
  double temperature = 0.1;
};

/// Exhaustive (globally optimal) for up to `exhaustive_limit` generators,
/// greedy bit flips plus seeded perturbation above that. Ties go to fewest
/// active weights, then lexicographically smallest vector.
GeneratorWeights optimize_weights(const SignalHistory& history, std::span<const int> realized_signs,
                                  const OptimizerOptions& options = {});

/// One random-survival step: flip each bit with probability `temperature`;
/// the candidate survives iff its norm is not worse than the incumbent's.
GeneratorWeights perturb(const GeneratorWeights& incumbent, const SignalHistory& history,
                         std::span<const int> realized_signs, double temperature, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Correlation coupling (unit 6)
// ---------------------------------------------------------------------------

struct CouplingMatrix {
  std::vector<std::string> symbols;
  std::vector<double> rho;  // row-major n x n
  std::size_t window = 0;

  static CouplingMatrix identity(std::vector<std::string> symbols);
  std::size_t size() const noexcept { return symbols.size(); }
  std::size_t index_of(const std::string& symbol) const;  // throws UnknownSymbol
  double at(std::size_t i, std::size_t j) const { return rho[i * symbols.size() + j]; }
  double& at(std::size_t i, std::size_t j) { return rho[i * symbols.size() + j]; }
};

/// Pearson correlation of the last `window` returns per symbol.
CouplingMatrix estimate_coupling(const std::vector<std::string>& symbols,
                                 const std::vector<std::vector<double>>& returns, std::size_t window);

using ScoreMap = std::map<std::string, double>;

/// adjusted_a = clamp(raw_a + kappa * sum_{b != a} rho_ab raw_b / (n - 1), -1, 1)
ScoreMap couple(const ScoreMap& raw_scores, const CouplingMatrix& rho, double kappa = 0.5);

// ---------------------------------------------------------------------------
// Unit states (unit 7)
// ---------------------------------------------------------------------------

enum class UnitStateKind { active, semi_active, passive };
std::string to_string(UnitStateKind state);

struct StateThresholds {
  double q_hi = 0.55;
  double q_lo = 0.45;
};

struct UnitState {
  UnitStateKind state = UnitStateKind::active;
  double hit_rate = 0.5;
  std::size_t window = 0;
};

/// hit_rate is the fraction of nonzero predictions whose sign matched. With
/// no nonzero prediction the previous state is kept.
UnitState update_state(const UnitState& current, std::span<const int> predicted_signs,
                       std::span<const int> realized_signs, const StateThresholds& thresholds = {});

// ---------------------------------------------------------------------------
// Vertical feedback (unit N) and capacity estimate
// ---------------------------------------------------------------------------

/// Past decisions as a {-1, 0, +1} stream; empty when depth == 0.
std::vector<int> vertical_feedback(std::span<const decision::Signal> decision_history, int depth);

__extension__ typedef unsigned __int128 uint128;

/// (M! N!)^(K+1), exact. Throws Overflow past 128 bits.
uint128 capacity(int units, int pairs, int nesting);
std::string to_string(uint128 value);

// ---------------------------------------------------------------------------
// Assembly graph (units 3, 8)
// ---------------------------------------------------------------------------

enum class NodeKind { elementary, homothetic };

struct AssemblyNode {
  NodeKind kind = NodeKind::elementary;
  int timeframe = 5;
  std::vector<AssemblyNode> children;
  int feedback_depth = 0;
  std::vector<decision::Source> generators;

  static AssemblyNode elementary(int timeframe, std::vector<decision::Source> generators);
  static AssemblyNode homothetic(int timeframe, std::vector<AssemblyNode> children,
                                 std::vector<decision::Source> generators = {});

  /// Nesting depth: 0 for an elementary node.
  int depth() const;
  /// Throws InvalidParameter when a homothetic timeframe is not a multiple
  /// >= 2 of a child's, or when depth exceeds k_max.
  void validate(int k_max) const;
  /// Generator inputs: own generators, one per child, one for feedback if enabled.
  std::size_t input_count() const;
};

std::vector<decision::Source> nsw_generators();
std::vector<decision::Source> all_generators();

/// Completed bars per (timeframe, symbol) as of one base-bar close.
struct MarketSnapshot {
  Timestamp time = 0;
  std::vector<std::string> symbols;
  std::map<int, std::map<std::string, std::span<const market::Bar>>> series;

  std::span<const market::Bar> bars(int timeframe, const std::string& symbol) const;  // throws MissingTimeframeData
};

struct PipelineConfig {
  decision::RiskConfig risk{0.05, 0.05, 64};
  wavelet::FamilyName family = wavelet::FamilyName::haar;
  int scale = 1;
  std::size_t window = 256;  // closes fed to the wavelet transform
  sde::FitOptions fit{12, 3, 2, 5, 1e-8};
  int grid_points = 128;
  decision::IndicatorParams indicator_params;
  double kappa = 0.5;
  StateThresholds thresholds;
  std::size_t state_window = 48;
  std::size_t optimize_window = 96;
  std::size_t reopt_every = 12;
  int perturb_rounds = 4;
  double temperature = 0.05;
  std::size_t corr_window = 96;
  int k_max = 1;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

/// Signals of the three NSW generators computed from one close window.
struct NswSignals {
  decision::Signal dynamic = decision::Signal::hold(decision::Source::dynamic);
  decision::Signal statistical = decision::Signal::hold(decision::Source::statistical);
  decision::Signal convolution = decision::Signal::hold(decision::Source::convolution);
  double p_s = 0.5;
  double p_s_conv = 0.5;
  bool ks_reject = false;
  bool valid = false;
};

/// Wavelet -> increments -> F/G^2 fit -> density -> P_s, plus the KS-gated
/// shift convolution, on the newest `cfg.window` closes.
NswSignals nsw_signals(std::span<const double> closes, const PipelineConfig& cfg);

struct SymbolState {
  SignalHistory history;
  std::vector<int> realized;
  GeneratorWeights weights;
  UnitState unit;
  std::vector<int> predictions;
  std::vector<int> outcomes;
  std::vector<int> decisions;  // fused signs per node bar, for vertical feedback
  std::size_t bars_seen = 0;
  double last_close = 0.0;
  std::vector<int> pending_row;
  int pending_prediction = 0;
  std::vector<decision::Signal> own_signals;
  std::size_t node_evaluations = 0;
  double raw_score = 0.0;  // fused, before coupling
};

struct NodeState {
  std::map<std::string, SymbolState> symbols;
  std::vector<NodeState> children;
};

struct NodeOutput {
  int timeframe = 0;
  ScoreMap scores;
  std::map<std::string, std::vector<decision::Signal>> signals;
  std::map<std::string, UnitStateKind> states;
  std::map<std::string, bool> fresh;  // a new bar was consumed on this call
  std::vector<NodeOutput> children;
};

struct NodeResult {
  NodeOutput output;
  NodeState state;
};

/// Pure: the updated state is returned, never written through.
NodeResult evaluate_node(const AssemblyNode& node, const MarketSnapshot& snapshot, const NodeState& state,
                         const PipelineConfig& cfg, std::uint64_t node_id = 1);

}  // namespace chaos::assembly
