#include <chaos/decision.hpp>
#include <chaos/errors.hpp>

#include <cmath>

namespace chaos::decision {

void RiskConfig::validate() const {
  if (!(alpha1 > 0.0 && alpha1 < 0.5)) throw InvalidParameter("alpha1", "must lie in (0, 0.5)");
  if (!(ks_alpha > 0.0 && ks_alpha < 1.0)) throw InvalidParameter("ks_alpha", "must lie in (0, 1)");
  if (shift_T <= 0) throw InvalidParameter("shift_T", "must be > 0");
}

std::string to_string(Action action) {
  switch (action) {
    case Action::enter_long: return "enter_long";
    case Action::enter_short: return "enter_short";
    case Action::exit_long: return "exit_long";
    case Action::exit_short: return "exit_short";
    case Action::hold: return "hold";
  }
  return "?";
}

std::string to_string(Source source) {
  switch (source) {
    case Source::dynamic: return "dynamic";
    case Source::statistical: return "statistical";
    case Source::convolution: return "convolution";
    case Source::macd: return "macd";
    case Source::bollinger: return "bollinger";
    case Source::rsi: return "rsi";
  }
  return "?";
}

Action parse_action(const std::string& name) {
  for (auto a : {Action::enter_long, Action::enter_short, Action::exit_long, Action::exit_short, Action::hold}) {
    if (to_string(a) == name) return a;
  }
  throw InvalidParameter("action", "unknown action '" + name + "'");
}

Source parse_source(const std::string& name) {
  for (auto s : {Source::dynamic, Source::statistical, Source::convolution, Source::macd, Source::bollinger, Source::rsi}) {
    if (to_string(s) == name) return s;
  }
  throw InvalidParameter("source", "unknown generator '" + name + "'");
}

int direction(Action action) noexcept {
  switch (action) {
    case Action::enter_long:
    case Action::exit_short: return 1;
    case Action::enter_short:
    case Action::exit_long: return -1;
    case Action::hold: return 0;
  }
  return 0;
}

namespace {
void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter(name, "must lie in [0, 1]");
}
}  // namespace

Signal dynamic_signal(double /*y*/, double dy, double p_s, const RiskConfig& cfg) {
  require_probability(p_s, "P_s");
  const double strength = std::abs(2.0 * p_s - 1.0);
  if (-dy > 0.0 && p_s > 1.0 - cfg.alpha1) return {Action::enter_long, Source::dynamic, strength};
  if (-dy < 0.0 && p_s < cfg.alpha1) return {Action::enter_short, Source::dynamic, strength};
  return Signal::hold(Source::dynamic);
}

Signal statistical_signal(double p_s, const RiskConfig& cfg, Source source) {
  require_probability(p_s, "P_s_conv");
  const double strength = std::abs(2.0 * p_s - 1.0);
  if (p_s > 1.0 - cfg.alpha1) return {Action::exit_long, source, strength};
  if (p_s < cfg.alpha1) return {Action::exit_short, source, strength};
  return Signal::hold(source);
}

bool stationarity_gate(const sde::KSResult& ks, Criterion criterion) noexcept {
  return criterion == Criterion::dynamic ? !ks.reject_equality : ks.reject_equality;
}

}  // namespace chaos::decision
