#pragma once

#include <chaos/market_data.hpp>

#include <span>
#include <string>
#include <vector>

namespace chaos::wavelet {

enum class FamilyName { haar, db4 };

/// Orthonormal scaling filter h; the wavelet filter is g_k = (-1)^k h_{L-1-k}.
struct WaveletFamily {
  FamilyName name = FamilyName::haar;
  std::vector<double> filter_taps;

  static WaveletFamily haar();
  static WaveletFamily db4();
  static WaveletFamily from_name(const std::string& name);

  std::vector<double> high_pass() const;
  /// Max deviation from sum h^2 = 1 and sum h_k h_{k+2m} = 0 (m != 0).
  double orthonormality_error() const;
};

std::string to_string(FamilyName name);

/// Coefficients Y_i(tau) at one dyadic scale.
struct CoeffSeries {
  int scale = 1;
  std::vector<std::size_t> shifts;
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
};

struct Decomposition {
  std::vector<CoeffSeries> details;  // details[0] is scale 1 (finest)
  CoeffSeries approximation;         // scale == levels
  std::size_t input_length = 0;
  std::size_t dropped = 0;           // leading samples discarded to keep levels even
};

/// Periodic-boundary dyadic DWT. Odd lengths at any level drop the oldest
/// sample so the newest coefficients stay aligned with the newest data.
Decomposition decompose(std::span<const double> signal, int levels, const WaveletFamily& family);
Decomposition decompose(const market::QuoteSeries& series, int levels, const WaveletFamily& family);

/// Inverse transform. Exact only when no samples were dropped.
std::vector<double> reconstruct(const Decomposition& decomposition, const WaveletFamily& family);

struct Increment {
  double y = 0.0;   // pre-step value y_tau
  double dy = 0.0;  // y_{tau+1} - y_tau
  friend bool operator==(const Increment&, const Increment&) = default;
};

std::vector<Increment> increments(const CoeffSeries& coeffs);
std::vector<Increment> increments(std::span<const double> values);

}  // namespace chaos::wavelet
