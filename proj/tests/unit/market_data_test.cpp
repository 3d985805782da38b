#include <chaos/errors.hpp>
#include <chaos/market_data.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

using namespace chaos;
using namespace chaos::market;

namespace {

QuoteSeries parse(const std::string& text, int tf = 5) {
  std::istringstream in(text);
  return read_history(in, "eurusd", tf);
}

QuoteSeries ramp(std::size_t n) {
  QuoteSeries s{"eurusd", 5, {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double c = 1.0 + 0.001 * static_cast<double>(i);
    const double o = c - 0.0005;
    s.bars.push_back({static_cast<Timestamp>(300 * i), o, c + 0.0002 * static_cast<double>(i % 3), o - 0.0001, c, 0.0001});
  }
  return s;
}

double sample_variance(const std::vector<double>& x) {
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double v = 0.0;
  for (double a : x) v += (a - m) * (a - m);
  return v / static_cast<double>(x.size() - 1);
}

}  // namespace

TEST(LoadHistory, MinimalFile) {
  const auto s = parse("timestamp,open,high,low,close,spread\n0,1.0,1.0,1.0,1.0,0\n300,1.0,1.0,1.0,1.0,0\n");
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.timeframe, 5);
  EXPECT_EQ(s.bars[1].timestamp, 300);
}

TEST(LoadHistory, NonMonotonicTimestamps) {
  EXPECT_THROW(parse("timestamp,open,high,low,close,spread\n300,1,1,1,1,0\n0,1,1,1,1,0\n"), NonMonotonicTimestamps);
}

TEST(LoadHistory, GarbageCloseReportsRow) {
  try {
    parse("timestamp,open,high,low,close,spread\n0,1,1,1,abc,0\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 1u);
  }
}

TEST(LoadHistory, MissingFile) {
  EXPECT_THROW(load_history("/nonexistent/quotes.csv", "eurusd", 5), FileNotFound);
}

TEST(LoadHistory, WriteReadRoundtrip) {
  const auto s = ramp(20);
  std::ostringstream out;
  write_history(out, s);
  const auto back = parse(out.str());
  ASSERT_EQ(back.size(), s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(back.bars[i].timestamp, s.bars[i].timestamp);
    EXPECT_NEAR(back.bars[i].close, s.bars[i].close, 5e-6);
  }
}

TEST(Resample, CountArithmetic) {
  EXPECT_EQ(resample(ramp(6), 3).size(), 2u);
  EXPECT_EQ(resample(ramp(7), 3).size(), 2u);
  EXPECT_EQ(resample(ramp(6), 3).timeframe, 15);
}

TEST(Resample, AggregatesOneGroup) {
  QuoteSeries s{"x", 5, {}};
  for (int i = 0; i < 3; ++i) {
    const double c = i + 1.0;
    s.bars.push_back({300 * i, c - 0.5, c + 0.25, c - 0.75, c, 0.0});
  }
  const auto r = resample(s, 3);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r.bars[0].open, 0.5);
  EXPECT_DOUBLE_EQ(r.bars[0].close, 3.0);
  EXPECT_DOUBLE_EQ(r.bars[0].high, 3.25);
  EXPECT_DOUBLE_EQ(r.bars[0].low, 0.25);
  EXPECT_EQ(r.bars[0].timestamp, 0);
}

TEST(Resample, Composes) {
  const auto s = ramp(36);
  EXPECT_EQ(resample(resample(s, 2), 3).bars, resample(s, 6).bars);
  EXPECT_EQ(resample(resample(s, 3), 2).bars, resample(s, 6).bars);
}

TEST(Resample, RejectsFactorBelowTwo) { EXPECT_THROW(resample(ramp(6), 1), InvalidParameter); }

TEST(Generate, ZeroNoiseWienerIsFlat) {
  SyntheticSpec spec{SyntheticKind::wiener, {{"sigma", 0.0}, {"y0", 1.0}}, 100, 7};
  const auto s = generate(spec);
  ASSERT_EQ(s.size(), 100u);
  for (const auto& b : s.bars) EXPECT_EQ(b.close, 1.0);
}

TEST(Generate, LogisticStep) {
  SyntheticSpec spec{SyntheticKind::logistic_map, {{"r", 4.0}, {"y0", 0.3}}, 3, 0};
  const auto s = generate(spec);
  EXPECT_NEAR(s.bars[1].close, 0.84, 1e-12);
}

TEST(Generate, BitReproducible) {
  SyntheticSpec spec{SyntheticKind::ornstein_uhlenbeck, {{"theta", 0.5}, {"sigma", 0.2}}, 5000, 42};
  EXPECT_EQ(generate(spec), generate(spec));
  auto other = spec;
  other.seed = 43;
  EXPECT_NE(generate(spec).bars, generate(other).bars);
}

TEST(Generate, UnknownParameterRejected) {
  SyntheticSpec spec{SyntheticKind::wiener, {{"sigmaa", 1.0}}, 10, 0};
  EXPECT_THROW(generate(spec), InvalidParameter);
}

TEST(Generate, BarsAreValid) {
  SyntheticSpec spec{SyntheticKind::lorenz_x, {}, 2000, 0};
  for (const auto& b : generate(spec).bars) EXPECT_TRUE(b.valid());
}

TEST(Generate, OrnsteinUhlenbeckStationaryVariance) {
  // Closed form: sigma^2 / (2 theta) = 0.125.
  SyntheticSpec spec{SyntheticKind::ornstein_uhlenbeck, {{"theta", 1.0}, {"sigma", 0.5}, {"dt", 0.01}}, 1000000, 11};
  const auto closes = generate(spec).closes();
  EXPECT_NEAR(sample_variance(closes), 0.125, 0.0125);
}

TEST(Generate, OrnsteinUhlenbeckAutocorrelation) {
  const double theta = 1.0, dt = 0.01;
  SyntheticSpec spec{SyntheticKind::ornstein_uhlenbeck, {{"theta", theta}, {"sigma", 0.5}, {"dt", dt}}, 1000000, 5};
  const auto x = generate(spec).closes();
  const double m = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
  double c0 = 0.0;
  for (double a : x) c0 += (a - m) * (a - m);
  for (int k : {10, 50, 100}) {
    double ck = 0.0;
    for (std::size_t i = 0; i + static_cast<std::size_t>(k) < x.size(); ++i) ck += (x[i] - m) * (x[i + k] - m);
    const double expected = std::exp(-theta * k * dt);
    EXPECT_NEAR(ck / c0, expected, 0.1 * expected) << "lag " << k;
  }
}
