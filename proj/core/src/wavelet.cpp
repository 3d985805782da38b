#include <chaos/errors.hpp>
#include <chaos/wavelet.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace chaos::wavelet {

WaveletFamily WaveletFamily::haar() {
  const double s = 1.0 / std::sqrt(2.0);
  return {FamilyName::haar, {s, s}};
}

WaveletFamily WaveletFamily::db4() {
  // Four-tap Daubechies filter (two vanishing moments).
  const double r3 = std::sqrt(3.0);
  const double norm = 4.0 * std::sqrt(2.0);
  return {FamilyName::db4, {(1.0 + r3) / norm, (3.0 + r3) / norm, (3.0 - r3) / norm, (1.0 - r3) / norm}};
}

WaveletFamily WaveletFamily::from_name(const std::string& name) {
  if (name == "haar") return haar();
  if (name == "db4" || name == "daubechies4") return db4();
  throw InvalidParameter("wavelet", "unknown family '" + name + "'");
}

std::string to_string(FamilyName name) { return name == FamilyName::haar ? "haar" : "db4"; }

std::vector<double> WaveletFamily::high_pass() const {
  const auto n = filter_taps.size();
  std::vector<double> g(n);
  for (std::size_t k = 0; k < n; ++k) g[k] = (k % 2 == 0 ? 1.0 : -1.0) * filter_taps[n - 1 - k];
  return g;
}

double WaveletFamily::orthonormality_error() const {
  const auto n = filter_taps.size();
  double err = 0.0;
  for (std::size_t shift = 0; shift < n; shift += 2) {
    double dot = 0.0;
    for (std::size_t k = 0; k + shift < n; ++k) dot += filter_taps[k] * filter_taps[k + shift];
    err = std::max(err, std::abs(dot - (shift == 0 ? 1.0 : 0.0)));
  }
  return err;
}

namespace {

void analysis_step(std::span<const double> x, std::span<const double> h, std::span<const double> g,
                   std::vector<double>& approx, std::vector<double>& detail) {
  const auto n = x.size();
  const auto half = n / 2;
  approx.assign(half, 0.0);
  detail.assign(half, 0.0);
  for (std::size_t i = 0; i < half; ++i) {
    double a = 0.0, d = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      const double v = x[(2 * i + k) % n];
      a += h[k] * v;
      d += g[k] * v;
    }
    approx[i] = a;
    detail[i] = d;
  }
}

CoeffSeries make_series(int scale, std::vector<double> values) {
  CoeffSeries s;
  s.scale = scale;
  s.shifts.resize(values.size());
  std::iota(s.shifts.begin(), s.shifts.end(), std::size_t{0});
  s.values = std::move(values);
  return s;
}

}  // namespace

Decomposition decompose(std::span<const double> signal, int levels, const WaveletFamily& family) {
  if (levels < 1) throw InvalidParameter("levels", "must be >= 1");
  if (levels >= 63) throw InvalidParameter("levels", "too many levels");
  const std::size_t needed = std::size_t{1} << levels;
  if (signal.size() < needed) throw SeriesTooShort(needed, signal.size());

  const auto g = family.high_pass();
  Decomposition out;
  out.input_length = signal.size();
  std::vector<double> current(signal.begin(), signal.end());
  std::vector<double> approx, detail;
  for (int level = 1; level <= levels; ++level) {
    if (current.size() % 2 == 1) {
      current.erase(current.begin());
      if (level == 1) out.dropped = 1;
      else out.dropped += std::size_t{1} << (level - 1);
    }
    analysis_step(current, family.filter_taps, g, approx, detail);
    out.details.push_back(make_series(level, detail));
    current.swap(approx);
  }
  out.approximation = make_series(levels, std::move(current));
  return out;
}

Decomposition decompose(const market::QuoteSeries& series, int levels, const WaveletFamily& family) {
  const auto c = series.closes();
  return decompose(std::span<const double>(c), levels, family);
}

std::vector<double> reconstruct(const Decomposition& decomposition, const WaveletFamily& family) {
  if (decomposition.dropped != 0) throw InvalidParameter("decomposition", "samples were dropped; not invertible");
  const auto& h = family.filter_taps;
  const auto g = family.high_pass();
  std::vector<double> current = decomposition.approximation.values;
  for (auto it = decomposition.details.rbegin(); it != decomposition.details.rend(); ++it) {
    const auto& d = it->values;
    if (d.size() != current.size()) throw LengthMismatch(d.size(), current.size());
    const auto n = 2 * d.size();
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < d.size(); ++i) {
      for (std::size_t k = 0; k < h.size(); ++k) x[(2 * i + k) % n] += h[k] * current[i] + g[k] * d[i];
    }
    current.swap(x);
  }
  return current;
}

std::vector<Increment> increments(std::span<const double> values) {
  if (values.size() < 2) throw SeriesTooShort(2, values.size());
  std::vector<Increment> out;
  out.reserve(values.size() - 1);
  for (std::size_t i = 0; i + 1 < values.size(); ++i) out.push_back({values[i], values[i + 1] - values[i]});
  return out;
}

std::vector<Increment> increments(const CoeffSeries& coeffs) { return increments(std::span<const double>(coeffs.values)); }

}  // namespace chaos::wavelet
