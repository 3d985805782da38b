#pragma once

#include <chaos/wavelet.hpp>

#include <functional>
#include <span>
#include <vector>

namespace chaos::sde {

/// Probabilists' Hermite polynomials He_0..He_order at x.
std::vector<double> hermite_basis(double x, int order);

/// sum_k coeffs[k] He_k(x)
double hermite_eval(std::span<const double> coeffs, double x);

struct BinStat {
  double center = 0.0;
  std::size_t count = 0;
  double f_hat = 0.0;   // mean(dy) / dtau
  double g2_hat = 0.0;  // mean(dy^2) / dtau
};

struct FitOptions {
  int bins = 32;
  int order_f = 3;
  int order_g2 = 2;
  std::size_t min_bin_count = 5;
  double g2_clamp = 1e-8;  // relative to max binned G^2
};

/// Drift F and squared diffusion G^2 of dY = F dtau + G dW, as Hermite
/// expansions in the standardized variable u = (y - y_mean) / y_std.
struct DriftDiffusionFit {
  std::vector<double> hermite_f;
  std::vector<double> hermite_g2;
  std::vector<double> stderr_f;  // standard errors of hermite_f
  double y_min = 0.0;            // density domain
  double y_max = 0.0;
  double bin_lo = 0.0;           // 1st percentile
  double bin_hi = 0.0;           // 99th percentile
  std::vector<BinStat> bin_stats;
  double dtau = 1.0;
  double y_mean = 0.0;
  double y_std = 1.0;
  double g2_floor = 0.0;
  FitOptions options;

  double standardize(double y) const noexcept { return (y - y_mean) / y_std; }
  double drift(double y) const;
  /// Clamped below at g2_floor.
  double diffusion2(double y) const;
  bool clamped_everywhere() const;
};

/// Binned Kramers-Moyal moments followed by count-weighted Hermite least
/// squares. Requires >= 10 * bins pairs, bins >= 5, orders in [0, 8].
DriftDiffusionFit estimate_fg(std::span<const wavelet::Increment> pairs, double dtau, const FitOptions& options = {});

/// Single order for both F and G^2.
DriftDiffusionFit estimate_fg(std::span<const wavelet::Increment> pairs, double dtau, int bins, int order);

struct StationaryDensity {
  std::vector<double> grid;        // uniform, strictly increasing
  std::vector<double> pdf;         // >= 0, trapezoidal integral 1
  std::vector<double> log_weight;  // W(y), W(0) = 0

  double spacing() const;
  double integral() const;
  double mean() const;
  double variance() const;
};

/// f_s ~ exp(W), W(y) = int_0^y 2 F / G^2, on a uniform grid spanning the
/// fit domain (widened to contain 0).
StationaryDensity stationary_density(const DriftDiffusionFit& fit, int grid_points = 512);

StationaryDensity stationary_density(const std::function<double(double)>& drift,
                                     const std::function<double(double)>& diffusion2,
                                     double lo, double hi, int grid_points = 512);

/// P_s = int_{-inf}^0 f_s.
double prob_nonpositive(const StationaryDensity& density);

/// Density of y -> -y.
StationaryDensity reflect(const StationaryDensity& density);

/// f(z) = int f_now(y) f_later(y + z) dy, renormalized.
StationaryDensity convolve_shifted(const StationaryDensity& now, const StationaryDensity& later);

struct KSResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool reject_equality = false;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
};

/// c(alpha) = sqrt(-ln(alpha / 2) / 2), the asymptotic two-sample constant.
double ks_critical_coefficient(double alpha);

/// Two-sample Kolmogorov-Smirnov test with the asymptotic threshold.
KSResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha);

}  // namespace chaos::sde
