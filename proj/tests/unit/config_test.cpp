#include <chaos/config.hpp>
#include <chaos/errors.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace chaos;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

}  // namespace

TEST(Config, ParsesTopLevelAndSections) {
  const auto c = parse(
      "symbols = eurusd, usdjpy\n"
      "homothetic_factors = 3, 4\n"
      "k_max = 2\n"
      "alpha1 = 0.1\n"
      "wavelet = db4\n"
      "window = 128\n"
      "pl_convention = profit_only\n"
      "seed = 99\n"
      "[usdjpy]\n"
      "spread = 0.03\n"
      "sigma = 0.01\n");
  EXPECT_EQ(c.symbols, (std::vector<std::string>{"eurusd", "usdjpy"}));
  EXPECT_EQ(c.homothetic_factors, (std::vector<int>{3, 4}));
  EXPECT_DOUBLE_EQ(c.alpha1, 0.1);
  EXPECT_EQ(c.wavelet, "db4");
  EXPECT_EQ(c.window, 128u);
  EXPECT_EQ(c.pl_convention, ledger::PlConvention::profit_only);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_DOUBLE_EQ(c.settings("usdjpy").spread, 0.03);
  EXPECT_DOUBLE_EQ(c.settings("usdjpy").start_price, default_start_price("usdjpy"));
  EXPECT_DOUBLE_EQ(c.settings("eurusd").start_price, 1.48);
}

TEST(Config, PipelineAndAssemblyFollowTheSettings) {
  const auto c = parse("symbols = eurusd\nhomothetic_factors = 3, 4\nk_max = 2\nbase_timeframe = 5\n");
  const auto node = c.assembly();
  EXPECT_EQ(node.timeframe, 60);
  ASSERT_EQ(node.children.size(), 1u);
  EXPECT_EQ(node.children[0].timeframe, 15);
  ASSERT_EQ(node.children[0].children.size(), 1u);
  EXPECT_EQ(node.children[0].children[0].timeframe, 5);
  const auto p = c.pipeline();
  EXPECT_EQ(p.window, c.window);
  EXPECT_EQ(p.k_max, 2);
  EXPECT_DOUBLE_EQ(p.risk.alpha1, c.alpha1);
}

TEST(Config, UnknownKeysAreRejected) {
  EXPECT_THROW(parse("symbols = eurusd\nalpha = 0.1\n"), ConfigError);
  EXPECT_THROW(parse("symbols = eurusd\n[eurusd]\nspred = 0.1\n"), ConfigError);
}

TEST(Config, ErrorNamesTheKey) {
  try {
    parse("symbols = eurusd\nalpha1 = 0.7\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("alpha1"), std::string::npos);
  }
}

TEST(Config, RangeChecks) {
  const std::string base = "symbols = eurusd\n";
  EXPECT_THROW(parse(base + "alpha1 = 0.7\n"), ConfigError);
  EXPECT_THROW(parse(base + "alpha1 = 0\n"), ConfigError);
  EXPECT_THROW(parse(base + "ks_alpha = 1\n"), ConfigError);
  EXPECT_THROW(parse(base + "wavelet = sym8\n"), ConfigError);
  EXPECT_THROW(parse(base + "window = 100\nwavelet_scale = 3\n"), ConfigError);
  EXPECT_THROW(parse(base + "temperature = 1.5\n"), ConfigError);
  EXPECT_THROW(parse(base + "q_lo = 0.6\nq_hi = 0.5\n"), ConfigError);
  EXPECT_THROW(parse(base + "homothetic_factors = 3, 3\n"), ConfigError);
  EXPECT_THROW(parse(base + "leverage = 0\n"), ConfigError);
  EXPECT_THROW(parse(base + "pl_convention = gross\n"), ConfigError);
  EXPECT_THROW(parse(base + "seed = abc\n"), ConfigError);
  EXPECT_THROW(parse(base + "bins = 4\n"), ConfigError);
  EXPECT_THROW(parse("symbols = EURUSD\n"), ConfigError);
  EXPECT_THROW(parse("symbols = eurusd, eurusd\n"), ConfigError);
  EXPECT_THROW(parse(""), ConfigError);
  EXPECT_THROW(parse(base + "[gbpusd]\nspread = 0.1\n"), ConfigError);
  EXPECT_THROW(parse(base + "[eurusd]\nsynthetic = brownian\n"), ConfigError);
  EXPECT_THROW(parse(base + "[eurusd]\nconversion_rate = -1\n"), ConfigError);
}

TEST(Config, MalformedTextIsAConfigError) {
  EXPECT_THROW(parse("symbols = eurusd\n[eurusd\n"), ConfigError);
}

TEST(Config, ReferenceConfigValidates) {
  const auto c = reference_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.symbols.size(), 8u);
  EXPECT_EQ(c.base_timeframe, 5);
  EXPECT_EQ(c.assembly().timeframe, 15);
  EXPECT_DOUBLE_EQ(c.settings("usdjpy").spread, 0.02);
}

TEST(Config, LoadFromFile) {
  const auto path = std::filesystem::temp_directory_path() / "chaos_config_test.cfg";
  {
    std::ofstream out(path);
    out << "# comment\nsymbols = gbpusd\nbars = 500\n";
  }
  const auto c = load_config(path);
  EXPECT_EQ(c.symbols, std::vector<std::string>{"gbpusd"});
  EXPECT_EQ(c.bars, 500u);
  std::filesystem::remove(path);
  EXPECT_THROW(load_config(path), FileNotFound);
}

TEST(Config, DefaultStartPrice) {
  EXPECT_DOUBLE_EQ(default_start_price("usdjpy"), 82.1);
  EXPECT_DOUBLE_EQ(default_start_price("xyzabc"), 1.0);
}

TEST(Config, ShippedReferenceFileMatchesReferenceConfig) {
  const auto file = load_config(std::filesystem::path(CHAOS_CONFIG_DIR) / "reference.cfg");
  const auto ref = reference_config();
  EXPECT_EQ(file.symbols, ref.symbols);
  EXPECT_EQ(file.base_timeframe, ref.base_timeframe);
  EXPECT_EQ(file.homothetic_factors, ref.homothetic_factors);
  EXPECT_EQ(file.k_max, ref.k_max);
  EXPECT_EQ(file.window, ref.window);
  EXPECT_EQ(file.bins, ref.bins);
  EXPECT_EQ(file.grid_points, ref.grid_points);
  EXPECT_EQ(file.state_window, ref.state_window);
  EXPECT_EQ(file.optimize_window, ref.optimize_window);
  EXPECT_EQ(file.reopt_every, ref.reopt_every);
  EXPECT_EQ(file.realloc_every, ref.realloc_every);
  EXPECT_EQ(file.leverage, ref.leverage);
  EXPECT_EQ(file.bars, ref.bars);
  EXPECT_EQ(file.seed, ref.seed);
  EXPECT_EQ(file.pl_convention, ref.pl_convention);
  for (const double RunConfig::*field :
       {&RunConfig::alpha1, &RunConfig::ks_alpha, &RunConfig::coupling_kappa, &RunConfig::q_hi, &RunConfig::q_lo,
        &RunConfig::temperature, &RunConfig::lambda_risk, &RunConfig::alloc_floor, &RunConfig::deposit,
        &RunConfig::risk_fraction, &RunConfig::entry_threshold, &RunConfig::tp_fraction, &RunConfig::sl_fraction})
    EXPECT_DOUBLE_EQ(file.*field, ref.*field);
  for (const auto& s : ref.symbols) {
    EXPECT_DOUBLE_EQ(file.settings(s).spread, ref.settings(s).spread) << s;
    EXPECT_DOUBLE_EQ(file.settings(s).swap_long, ref.settings(s).swap_long) << s;
    EXPECT_DOUBLE_EQ(file.settings(s).swap_short, ref.settings(s).swap_short) << s;
    EXPECT_DOUBLE_EQ(file.settings(s).start_price, ref.settings(s).start_price) << s;
  }
}
