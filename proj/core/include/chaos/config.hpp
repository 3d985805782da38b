#pragma once

#include <chaos/assembly.hpp>
#include <chaos/ledger.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace chaos {

struct SymbolConfig {
  double spread = 0.00015;
  double swap_long = 0.0;   // USD per lot per day
  double swap_short = 0.0;
  std::optional<double> conversion_rate;
  std::string data;         // CSV path; empty means synthetic
  std::string synthetic = "ornstein_uhlenbeck";
  double start_price = 1.0;
  double theta = 0.002;     // per base bar
  double sigma = 0.0;       // per sqrt(base bar); 0 means 2e-4 * start_price
};

/// Backtest configuration. Text form is `key = value` lines at top level
/// plus one `[symbol]` section per pair; unknown keys are rejected.
struct RunConfig {
  std::vector<std::string> symbols;
  int base_timeframe = 5;
  std::vector<int> homothetic_factors{3};
  int k_max = 1;

  double alpha1 = 0.05;
  double ks_alpha = 0.05;
  int shift_T = 64;
  std::string wavelet = "haar";
  int wavelet_scale = 1;
  std::size_t window = 256;
  int hermite_order_f = 3;
  int hermite_order_g2 = 2;
  int bins = 12;
  int grid_points = 128;

  double coupling_kappa = 0.5;
  double q_hi = 0.55;
  double q_lo = 0.45;
  std::size_t state_window = 48;
  std::size_t optimize_window = 96;
  std::size_t reopt_every = 12;
  double temperature = 0.05;
  int feedback_depth = 0;

  double lambda_risk = 1.0;
  double alloc_floor = 0.02;
  std::size_t realloc_every = 288;

  double deposit = 5000.0;
  int leverage = 100;
  double risk_fraction = 0.2;
  double entry_threshold = 0.25;
  double tp_fraction = 0.003;
  double sl_fraction = 0.06;
  ledger::PlConvention pl_convention = ledger::PlConvention::profit_plus_swap;

  std::uint64_t seed = 1;
  std::size_t bars = 6000;
  std::string data_dir;
  unsigned threads = 1;

  std::map<std::string, SymbolConfig> symbol_settings;

  /// Throws ConfigError naming the offending key.
  void validate() const;
  assembly::PipelineConfig pipeline() const;
  assembly::AssemblyNode assembly() const;
  const SymbolConfig& settings(const std::string& symbol) const;
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

/// The eight-pair, 5-minute plus 15-minute configuration.
RunConfig reference_config();

/// Typical start price for well-known pairs, 1.0 otherwise.
double default_start_price(const std::string& symbol);

}  // namespace chaos
