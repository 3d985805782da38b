#include <chaos/assembly.hpp>
#include <chaos/errors.hpp>

#include <bit>
#include <map>
#include <random>

namespace chaos::assembly {

void SignalHistory::push(std::span<const int> row) {
  if (row.size() != generators_) throw LengthMismatch(row.size(), generators_);
  for (int a : row) actions_.push_back(a > 0 ? 1 : (a < 0 ? -1 : 0));
}

void SignalHistory::trim_front(std::size_t keep) {
  if (bars() <= keep) return;
  const auto drop = (bars() - keep) * generators_;
  actions_.erase(actions_.begin(), actions_.begin() + static_cast<std::ptrdiff_t>(drop));
}

GeneratorWeights GeneratorWeights::all_on(std::size_t generators) {
  return {std::vector<std::uint8_t>(2 * generators, 1), 0};
}

std::size_t GeneratorWeights::active() const noexcept {
  std::size_t n = 0;
  for (auto w : weights) n += w != 0;
  return n;
}

bool GeneratorWeights::slot(std::size_t generator, int action) const {
  if (action == 0) return false;
  return weights[2 * generator + (action > 0 ? 0 : 1)] != 0;
}

int fused_sign(std::span<const std::uint8_t> weights, std::span<const int> actions) {
  int sum = 0;
  for (std::size_t g = 0; g < actions.size(); ++g) {
    if (actions[g] > 0 && weights[2 * g]) ++sum;
    if (actions[g] < 0 && weights[2 * g + 1]) --sum;
  }
  return (sum > 0) - (sum < 0);
}

namespace {

void check_inputs(const SignalHistory& history, std::span<const int> realized) {
  if (history.generators() == 0 || history.bars() == 0) throw EmptyHistory();
  if (history.bars() != realized.size()) throw LengthMismatch(history.bars(), realized.size());
}

int sign_of(int v) { return (v > 0) - (v < 0); }

// Order used for every comparison between candidate weight vectors.
bool better(std::size_t norm_a, std::span<const std::uint8_t> a, std::size_t norm_b, std::span<const std::uint8_t> b) {
  if (norm_a != norm_b) return norm_a < norm_b;
  std::size_t active_a = 0, active_b = 0;
  for (auto w : a) active_a += w != 0;
  for (auto w : b) active_b += w != 0;
  if (active_a != active_b) return active_a < active_b;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Bars collapsed to (long mask, short mask) patterns with realized-sign counts.
struct Pattern {
  std::uint64_t long_mask = 0;
  std::uint64_t short_mask = 0;
  std::size_t up = 0;
  std::size_t down = 0;
};

std::vector<Pattern> collapse(const SignalHistory& history, std::span<const int> realized) {
  std::map<std::pair<std::uint64_t, std::uint64_t>, Pattern> table;
  for (std::size_t t = 0; t < history.bars(); ++t) {
    const int r = sign_of(realized[t]);
    if (r == 0) continue;
    std::uint64_t lm = 0, sm = 0;
    for (std::size_t g = 0; g < history.generators(); ++g) {
      const int a = history.at(t, g);
      if (a > 0) lm |= std::uint64_t{1} << g;
      if (a < 0) sm |= std::uint64_t{1} << g;
    }
    auto& p = table[{lm, sm}];
    p.long_mask = lm;
    p.short_mask = sm;
    (r > 0 ? p.up : p.down) += 1;
  }
  std::vector<Pattern> out;
  out.reserve(table.size());
  for (auto& [key, p] : table) out.push_back(p);
  return out;
}

std::size_t masked_norm(const std::vector<Pattern>& patterns, std::uint64_t wl, std::uint64_t ws) {
  std::size_t norm = 0;
  for (const auto& p : patterns) {
    const int s = std::popcount(wl & p.long_mask) - std::popcount(ws & p.short_mask);
    if (s > 0) norm += p.down;
    else if (s < 0) norm += p.up;
    else norm += p.up + p.down;
  }
  return norm;
}

std::vector<std::uint8_t> expand(std::uint64_t wl, std::uint64_t ws, std::size_t generators) {
  std::vector<std::uint8_t> w(2 * generators, 0);
  for (std::size_t g = 0; g < generators; ++g) {
    w[2 * g] = (wl >> g) & 1U;
    w[2 * g + 1] = (ws >> g) & 1U;
  }
  return w;
}

GeneratorWeights exhaustive(const SignalHistory& history, std::span<const int> realized) {
  const auto m = history.generators();
  const auto patterns = collapse(history, realized);
  const std::uint64_t limit = std::uint64_t{1} << m;
  std::uint64_t best_wl = 0, best_ws = 0;
  std::size_t best_norm = masked_norm(patterns, 0, 0);
  int best_active = 0;
  for (std::uint64_t wl = 0; wl < limit; ++wl) {
    for (std::uint64_t ws = 0; ws < limit; ++ws) {
      const auto norm = masked_norm(patterns, wl, ws);
      if (norm > best_norm) continue;
      const int active = std::popcount(wl) + std::popcount(ws);
      if (norm == best_norm) {
        if (active > best_active) continue;
        if (active == best_active) {
          // Lexicographic on the slot vector: the lowest differing slot decides.
          const auto a = expand(wl, ws, m);
          const auto b = expand(best_wl, best_ws, m);
          if (!std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end())) continue;
        }
      }
      best_wl = wl;
      best_ws = ws;
      best_norm = norm;
      best_active = active;
    }
  }
  return {expand(best_wl, best_ws, m), best_norm};
}

}  // namespace

std::size_t mismatch(std::span<const std::uint8_t> weights, const SignalHistory& history, std::span<const int> realized) {
  check_inputs(history, realized);
  if (weights.size() != 2 * history.generators()) throw LengthMismatch(weights.size(), 2 * history.generators());
  std::size_t norm = 0;
  for (std::size_t t = 0; t < history.bars(); ++t) {
    const int r = sign_of(realized[t]);
    if (r == 0) continue;
    norm += fused_sign(weights, history.row(t)) != r;
  }
  return norm;
}

GeneratorWeights perturb(const GeneratorWeights& incumbent, const SignalHistory& history, std::span<const int> realized,
                         double temperature, std::uint64_t seed) {
  if (temperature < 0.0 || temperature > 1.0) throw InvalidParameter("temperature", "must lie in [0, 1]");
  GeneratorWeights current = incumbent;
  current.mismatch_norm = mismatch(current.weights, history, realized);
  if (temperature == 0.0) return current;

  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(temperature);
  GeneratorWeights candidate = current;
  for (auto& w : candidate.weights) {
    if (flip(rng)) w = w ? 0 : 1;
  }
  candidate.mismatch_norm = mismatch(candidate.weights, history, realized);
  return candidate.mismatch_norm <= current.mismatch_norm ? candidate : current;
}

GeneratorWeights optimize_weights(const SignalHistory& history, std::span<const int> realized,
                                  const OptimizerOptions& options) {
  check_inputs(history, realized);
  if (history.bars() < 30) throw InsufficientData("optimize_weights needs at least 30 bars");
  const auto m = history.generators();
  if (m <= options.exhaustive_limit && m <= 16) return exhaustive(history, realized);

  // Greedy single-bit descent from the empty vector.
  GeneratorWeights best{std::vector<std::uint8_t>(2 * m, 0), 0};
  best.mismatch_norm = mismatch(best.weights, history, realized);
  bool improved = true;
  while (improved) {
    improved = false;
    GeneratorWeights round_best = best;
    for (std::size_t k = 0; k < best.weights.size(); ++k) {
      auto trial = best.weights;
      trial[k] ^= 1U;
      const auto norm = mismatch(trial, history, realized);
      if (better(norm, trial, round_best.mismatch_norm, round_best.weights)) round_best = {trial, norm};
    }
    if (round_best.mismatch_norm < best.mismatch_norm) {
      best = round_best;
      improved = true;
    }
  }

  // Random survival around the local optimum; the best survivor is kept.
  std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32)};
  std::mt19937_64 seeder(seq);
  GeneratorWeights walker = best;
  for (int round = 0; round < options.rounds; ++round) {
    walker = perturb(walker, history, realized, options.temperature, seeder());
    if (better(walker.mismatch_norm, walker.weights, best.mismatch_norm, best.weights)) best = walker;
  }
  return best;
}

}  // namespace chaos::assembly
