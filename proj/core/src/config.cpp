#include <chaos/config.hpp>
#include <chaos/errors.hpp>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

namespace chaos {

namespace pt = boost::property_tree;

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
T number(const std::string& key, const std::string& text) {
  const auto s = trim(text);
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": cannot parse '" + text + "'");
  return value;
}

void check(bool ok, const std::string& key, const std::string& why) {
  if (!ok) throw ConfigError(key + ": " + why);
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;
using SymbolSetter = std::function<void(SymbolConfig&, const std::string&, const std::string&)>;

template <typename T, typename C>
auto field(T C::*member) {
  return [member](C& c, const std::string& key, const std::string& v) {
    if constexpr (std::is_same_v<T, std::string>) c.*member = trim(v);
    else c.*member = number<T>(key, v);
  };
}

const std::map<std::string, Setter>& top_level_keys() {
  static const std::map<std::string, Setter> keys = {
      {"symbols", [](RunConfig& c, const std::string&, const std::string& v) { c.symbols = split_list(v); }},
      {"base_timeframe", field(&RunConfig::base_timeframe)},
      {"homothetic_factors",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.homothetic_factors.clear();
         for (const auto& f : split_list(v)) c.homothetic_factors.push_back(number<int>(k, f));
       }},
      {"k_max", field(&RunConfig::k_max)},
      {"alpha1", field(&RunConfig::alpha1)},
      {"ks_alpha", field(&RunConfig::ks_alpha)},
      {"shift_T", field(&RunConfig::shift_T)},
      {"wavelet", field(&RunConfig::wavelet)},
      {"wavelet_scale", field(&RunConfig::wavelet_scale)},
      {"window", field(&RunConfig::window)},
      {"hermite_order_f", field(&RunConfig::hermite_order_f)},
      {"hermite_order_g2", field(&RunConfig::hermite_order_g2)},
      {"bins", field(&RunConfig::bins)},
      {"grid_points", field(&RunConfig::grid_points)},
      {"coupling_kappa", field(&RunConfig::coupling_kappa)},
      {"q_hi", field(&RunConfig::q_hi)},
      {"q_lo", field(&RunConfig::q_lo)},
      {"state_window", field(&RunConfig::state_window)},
      {"optimize_window", field(&RunConfig::optimize_window)},
      {"reopt_every", field(&RunConfig::reopt_every)},
      {"temperature", field(&RunConfig::temperature)},
      {"feedback_depth", field(&RunConfig::feedback_depth)},
      {"lambda_risk", field(&RunConfig::lambda_risk)},
      {"alloc_floor", field(&RunConfig::alloc_floor)},
      {"realloc_every", field(&RunConfig::realloc_every)},
      {"deposit", field(&RunConfig::deposit)},
      {"leverage", field(&RunConfig::leverage)},
      {"risk_fraction", field(&RunConfig::risk_fraction)},
      {"entry_threshold", field(&RunConfig::entry_threshold)},
      {"tp_fraction", field(&RunConfig::tp_fraction)},
      {"sl_fraction", field(&RunConfig::sl_fraction)},
      {"pl_convention",
       [](RunConfig& c, const std::string&, const std::string& v) {
         try {
           c.pl_convention = ledger::parse_pl_convention(trim(v));
         } catch (const InvalidParameter& e) {
           throw ConfigError(e.what());
         }
       }},
      {"seed", field(&RunConfig::seed)},
      {"bars", field(&RunConfig::bars)},
      {"data_dir", field(&RunConfig::data_dir)},
      {"threads", field(&RunConfig::threads)},
  };
  return keys;
}

const std::map<std::string, SymbolSetter>& symbol_keys() {
  static const std::map<std::string, SymbolSetter> keys = {
      {"spread", field(&SymbolConfig::spread)},
      {"swap_long", field(&SymbolConfig::swap_long)},
      {"swap_short", field(&SymbolConfig::swap_short)},
      {"conversion_rate",
       [](SymbolConfig& c, const std::string& k, const std::string& v) { c.conversion_rate = number<double>(k, v); }},
      {"data", field(&SymbolConfig::data)},
      {"synthetic", field(&SymbolConfig::synthetic)},
      {"start_price", field(&SymbolConfig::start_price)},
      {"theta", field(&SymbolConfig::theta)},
      {"sigma", field(&SymbolConfig::sigma)},
  };
  return keys;
}

}  // namespace

double default_start_price(const std::string& symbol) {
  static const std::map<std::string, double> prices = {
      {"eurusd", 1.48}, {"gbpusd", 1.66}, {"audusd", 1.09}, {"nzdusd", 0.80},
      {"usdchf", 0.87}, {"usdcad", 0.96}, {"usdjpy", 82.1}, {"euraud", 1.34},
  };
  const auto it = prices.find(symbol);
  return it == prices.end() ? 1.0 : it->second;
}

void RunConfig::validate() const {
  check(!symbols.empty(), "symbols", "at least one symbol is required");
  std::set<std::string> seen;
  for (const auto& s : symbols) {
    check(s.size() == 6 && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'a' && c <= 'z'; }), "symbols",
          "'" + s + "' is not a six-letter lowercase pair code");
    check(seen.insert(s).second, "symbols", "duplicate '" + s + "'");
  }
  for (const auto& [s, cfg] : symbol_settings) {
    check(seen.count(s) != 0, s, "section for a symbol not listed in 'symbols'");
    check(cfg.spread >= 0.0, s + ".spread", "must be >= 0");
    check(cfg.start_price > 0.0, s + ".start_price", "must be > 0");
    check(cfg.theta >= 0.0, s + ".theta", "must be >= 0");
    check(cfg.sigma >= 0.0, s + ".sigma", "must be >= 0");
    check(!cfg.conversion_rate || *cfg.conversion_rate > 0.0, s + ".conversion_rate", "must be > 0");
    try {
      market::parse_synthetic_kind(cfg.synthetic);
    } catch (const Error&) {
      throw ConfigError(s + ".synthetic: unknown kind '" + cfg.synthetic + "'");
    }
  }
  check(base_timeframe > 0, "base_timeframe", "must be > 0");
  check(k_max >= 0, "k_max", "must be >= 0");
  check(static_cast<int>(homothetic_factors.size()) <= k_max, "homothetic_factors", "more layers than k_max allows");
  for (int f : homothetic_factors) check(f >= 2, "homothetic_factors", "each factor must be >= 2");
  check(alpha1 > 0.0 && alpha1 < 0.5, "alpha1", "must lie in (0, 0.5)");
  check(ks_alpha > 0.0 && ks_alpha < 1.0, "ks_alpha", "must lie in (0, 1)");
  check(shift_T > 0, "shift_T", "must be > 0");
  check(wavelet == "haar" || wavelet == "db4", "wavelet", "expected haar or db4");
  check(wavelet_scale >= 1 && wavelet_scale <= 8, "wavelet_scale", "must lie in [1, 8]");
  check(window >= 64 && window % (std::size_t{1} << wavelet_scale) == 0, "window",
        "must be >= 64 and a multiple of 2^wavelet_scale");
  check(hermite_order_f >= 0 && hermite_order_f <= 8, "hermite_order_f", "must lie in [0, 8]");
  check(hermite_order_g2 >= 0 && hermite_order_g2 <= 8, "hermite_order_g2", "must lie in [0, 8]");
  check(bins >= 5, "bins", "must be >= 5");
  check(grid_points >= 16, "grid_points", "must be >= 16");
  check(coupling_kappa >= 0.0, "coupling_kappa", "must be >= 0");
  check(q_lo >= 0.0 && q_lo <= q_hi && q_hi <= 1.0, "q_hi", "need 0 <= q_lo <= q_hi <= 1");
  check(state_window > 0, "state_window", "must be > 0");
  check(optimize_window >= 30, "optimize_window", "must be >= 30");
  check(reopt_every > 0, "reopt_every", "must be > 0");
  check(temperature >= 0.0 && temperature <= 1.0, "temperature", "must lie in [0, 1]");
  check(feedback_depth >= 0, "feedback_depth", "must be >= 0");
  check(lambda_risk >= 0.0, "lambda_risk", "must be >= 0");
  check(alloc_floor >= 0.0, "alloc_floor", "must be >= 0");
  const auto layers = static_cast<double>(symbols.size() * (1 + homothetic_factors.size()));
  check(alloc_floor * layers <= 1.0, "alloc_floor", "floor times record count exceeds 1");
  check(realloc_every > 0, "realloc_every", "must be > 0");
  check(deposit > 0.0, "deposit", "must be > 0");
  check(leverage >= 1, "leverage", "must be >= 1");
  check(risk_fraction > 0.0 && risk_fraction <= 1.0, "risk_fraction", "must lie in (0, 1]");
  check(entry_threshold >= 0.0 && entry_threshold <= 1.0, "entry_threshold", "must lie in [0, 1]");
  check(tp_fraction >= 0.0, "tp_fraction", "must be >= 0");
  check(sl_fraction >= 0.0, "sl_fraction", "must be >= 0");
  check(bars > 0, "bars", "must be > 0");
  check(threads >= 1, "threads", "must be >= 1");
}

const SymbolConfig& RunConfig::settings(const std::string& symbol) const {
  static const SymbolConfig fallback;
  const auto it = symbol_settings.find(symbol);
  return it == symbol_settings.end() ? fallback : it->second;
}

assembly::PipelineConfig RunConfig::pipeline() const {
  assembly::PipelineConfig p;
  p.risk = {alpha1, ks_alpha, shift_T};
  p.family = wavelet == "db4" ? wavelet::FamilyName::db4 : wavelet::FamilyName::haar;
  p.scale = wavelet_scale;
  p.window = window;
  p.fit = {bins, hermite_order_f, hermite_order_g2, 5, 1e-8};
  p.grid_points = grid_points;
  p.kappa = coupling_kappa;
  p.thresholds = {q_hi, q_lo};
  p.state_window = state_window;
  p.optimize_window = optimize_window;
  p.reopt_every = reopt_every;
  p.temperature = temperature;
  p.k_max = k_max;
  p.seed = seed;
  p.threads = threads;
  return p;
}

assembly::AssemblyNode RunConfig::assembly() const {
  auto node = assembly::AssemblyNode::elementary(base_timeframe, assembly::all_generators());
  node.feedback_depth = feedback_depth;
  int tf = base_timeframe;
  for (int f : homothetic_factors) {
    tf *= f;
    auto parent = assembly::AssemblyNode::homothetic(tf, {std::move(node)}, assembly::all_generators());
    parent.feedback_depth = feedback_depth;
    node = std::move(parent);
  }
  return node;
}

RunConfig parse_config(std::istream& in) {
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  RunConfig c;
  for (const auto& [key, node] : tree) {
    if (node.empty()) {
      const auto it = top_level_keys().find(key);
      if (it == top_level_keys().end()) throw ConfigError(key + ": unknown key");
      it->second(c, key, node.data());
      continue;
    }
    auto& sym = c.symbol_settings[key];
    sym.start_price = default_start_price(key);
    for (const auto& [sub, value] : node) {
      const auto it = symbol_keys().find(sub);
      if (it == symbol_keys().end()) throw ConfigError(key + "." + sub + ": unknown key");
      it->second(sym, key + "." + sub, value.data());
    }
  }
  for (const auto& s : c.symbols)
    if (!c.symbol_settings.count(s)) c.symbol_settings[s].start_price = default_start_price(s);
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound(path.string());
  return parse_config(in);
}

RunConfig reference_config() {
  RunConfig c;
  c.symbols = {"eurusd", "gbpusd", "audusd", "nzdusd", "usdchf", "usdcad", "usdjpy", "euraud"};
  const std::map<std::string, double> spreads = {
      {"eurusd", 0.00015}, {"gbpusd", 0.0002}, {"audusd", 0.0002}, {"nzdusd", 0.00025},
      {"usdchf", 0.0002},  {"usdcad", 0.0002}, {"usdjpy", 0.02},   {"euraud", 0.0003},
  };
  for (const auto& s : c.symbols) {
    auto& sc = c.symbol_settings[s];
    sc.spread = spreads.at(s);
    sc.start_price = default_start_price(s);
    sc.swap_long = -0.5;
    sc.swap_short = 0.3;
  }
  return c;
}

}  // namespace chaos
