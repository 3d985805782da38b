#include <chaos/errors.hpp>
#include <chaos/sde.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace chaos::sde {

std::vector<double> hermite_basis(double x, int order) {
  std::vector<double> he(static_cast<std::size_t>(order) + 1);
  he[0] = 1.0;
  if (order >= 1) he[1] = x;
  for (int n = 1; n < order; ++n) {
    he[static_cast<std::size_t>(n) + 1] = x * he[static_cast<std::size_t>(n)] - n * he[static_cast<std::size_t>(n) - 1];
  }
  return he;
}

double hermite_eval(std::span<const double> coeffs, double x) {
  if (coeffs.empty()) return 0.0;
  const auto he = hermite_basis(x, static_cast<int>(coeffs.size()) - 1);
  double sum = 0.0;
  for (std::size_t k = 0; k < coeffs.size(); ++k) sum += coeffs[k] * he[k];
  return sum;
}

double DriftDiffusionFit::drift(double y) const { return hermite_eval(hermite_f, standardize(y)); }

double DriftDiffusionFit::diffusion2(double y) const {
  return std::max(hermite_eval(hermite_g2, standardize(y)), g2_floor);
}

bool DriftDiffusionFit::clamped_everywhere() const {
  for (const auto& b : bin_stats) {
    if (b.count >= options.min_bin_count && hermite_eval(hermite_g2, standardize(b.center)) > g2_floor) return false;
  }
  return true;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

struct WlsResult {
  std::vector<double> coeffs;
  std::vector<double> stderrs;
};

WlsResult weighted_least_squares(const std::vector<double>& u, const std::vector<double>& target,
                                 const std::vector<double>& weights, int order) {
  const auto rows = static_cast<Eigen::Index>(u.size());
  const auto cols = static_cast<Eigen::Index>(order + 1);
  Eigen::MatrixXd x(rows, cols);
  Eigen::VectorXd y(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double sw = std::sqrt(weights[static_cast<std::size_t>(r)]);
    const auto he = hermite_basis(u[static_cast<std::size_t>(r)], order);
    for (Eigen::Index c = 0; c < cols; ++c) x(r, c) = sw * he[static_cast<std::size_t>(c)];
    y(r) = sw * target[static_cast<std::size_t>(r)];
  }
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  WlsResult out;
  out.coeffs.assign(beta.data(), beta.data() + beta.size());

  out.stderrs.assign(static_cast<std::size_t>(cols), 0.0);
  if (rows > cols) {
    const Eigen::VectorXd resid = y - x * beta;
    const double sigma2 = resid.squaredNorm() / static_cast<double>(rows - cols);
    const Eigen::MatrixXd xtx = x.transpose() * x;
    const Eigen::MatrixXd cov = sigma2 * xtx.completeOrthogonalDecomposition().pseudoInverse();
    for (Eigen::Index c = 0; c < cols; ++c) out.stderrs[static_cast<std::size_t>(c)] = std::sqrt(std::max(0.0, cov(c, c)));
  }
  return out;
}

}  // namespace

DriftDiffusionFit estimate_fg(std::span<const wavelet::Increment> pairs, double dtau, const FitOptions& options) {
  if (options.bins < 5) throw InvalidParameter("bins", "must be >= 5");
  if (options.order_f < 0 || options.order_f > 8) throw InvalidParameter("order_f", "must lie in [0, 8]");
  if (options.order_g2 < 0 || options.order_g2 > 8) throw InvalidParameter("order_g2", "must lie in [0, 8]");
  if (!(dtau > 0.0)) throw InvalidParameter("dtau", "must be > 0");
  const auto bins = static_cast<std::size_t>(options.bins);
  if (pairs.size() < 10 * bins) {
    throw InsufficientData("need at least " + std::to_string(10 * bins) + " pairs, got " + std::to_string(pairs.size()));
  }

  std::vector<double> ys;
  ys.reserve(pairs.size());
  for (const auto& p : pairs) ys.push_back(p.y);
  std::sort(ys.begin(), ys.end());
  if (ys.front() == ys.back()) throw DegenerateDomain();

  DriftDiffusionFit fit;
  fit.options = options;
  fit.dtau = dtau;
  fit.bin_lo = quantile_sorted(ys, 0.01);
  fit.bin_hi = quantile_sorted(ys, 0.99);
  if (!(fit.bin_hi > fit.bin_lo)) throw DegenerateDomain();
  const double width = fit.bin_hi - fit.bin_lo;
  fit.y_min = std::max(ys.front(), fit.bin_lo - 0.5 * width);
  fit.y_max = std::min(ys.back(), fit.bin_hi + 0.5 * width);

  const double n = static_cast<double>(ys.size());
  const double mean = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double ss = 0.0;
  for (double y : ys) ss += (y - mean) * (y - mean);
  fit.y_mean = mean;
  fit.y_std = std::sqrt(ss / (n - 1.0));
  if (!(fit.y_std > 0.0)) throw DegenerateDomain();

  const double bin_width = width / static_cast<double>(bins);
  std::vector<double> sum_dy(bins, 0.0), sum_dy2(bins, 0.0);
  std::vector<std::size_t> counts(bins, 0);
  for (const auto& p : pairs) {
    if (p.y < fit.bin_lo || p.y > fit.bin_hi) continue;
    auto b = static_cast<std::size_t>((p.y - fit.bin_lo) / bin_width);
    b = std::min(b, bins - 1);
    sum_dy[b] += p.dy;
    sum_dy2[b] += p.dy * p.dy;
    ++counts[b];
  }

  std::vector<double> u, f_target, g2_target, weights;
  double g2_max = 0.0;
  fit.bin_stats.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    auto& stat = fit.bin_stats[b];
    stat.center = fit.bin_lo + (static_cast<double>(b) + 0.5) * bin_width;
    stat.count = counts[b];
    if (counts[b] == 0) continue;
    const double c = static_cast<double>(counts[b]);
    stat.f_hat = sum_dy[b] / c / dtau;
    stat.g2_hat = sum_dy2[b] / c / dtau;
    if (counts[b] < options.min_bin_count) continue;
    u.push_back(fit.standardize(stat.center));
    f_target.push_back(stat.f_hat);
    g2_target.push_back(stat.g2_hat);
    weights.push_back(c);
    g2_max = std::max(g2_max, stat.g2_hat);
  }
  const auto needed = static_cast<std::size_t>(std::max(options.order_f, options.order_g2)) + 1;
  if (u.size() < needed) {
    throw InsufficientData("only " + std::to_string(u.size()) + " bins have enough samples");
  }

  const auto f_fit = weighted_least_squares(u, f_target, weights, options.order_f);
  const auto g_fit = weighted_least_squares(u, g2_target, weights, options.order_g2);
  fit.hermite_f = f_fit.coeffs;
  fit.stderr_f = f_fit.stderrs;
  fit.hermite_g2 = g_fit.coeffs;
  fit.g2_floor = g2_max > 0.0 ? options.g2_clamp * g2_max : std::numeric_limits<double>::min();
  return fit;
}

DriftDiffusionFit estimate_fg(std::span<const wavelet::Increment> pairs, double dtau, int bins, int order) {
  FitOptions options;
  options.bins = bins;
  options.order_f = order;
  options.order_g2 = order;
  return estimate_fg(pairs, dtau, options);
}

double StationaryDensity::spacing() const { return grid.size() < 2 ? 0.0 : (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1); }

namespace {

double trapz(const std::vector<double>& x, const std::vector<double>& f) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) s += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
  return s;
}

double moment(const StationaryDensity& d, int k, double about) {
  std::vector<double> f(d.grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = d.pdf[i] * std::pow(d.grid[i] - about, k);
  return trapz(d.grid, f);
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) g[i] = lo + h * static_cast<double>(i);
  g.back() = hi;
  return g;
}

void finish_density(StationaryDensity& d) {
  const double z = trapz(d.grid, d.pdf);
  if (!(z > 0.0) || !std::isfinite(z)) throw NonNormalizable("density does not normalize");
  for (auto& p : d.pdf) p /= z;
}

}  // namespace

double StationaryDensity::integral() const { return trapz(grid, pdf); }
double StationaryDensity::mean() const { return moment(*this, 1, 0.0); }
double StationaryDensity::variance() const { return moment(*this, 2, mean()); }

StationaryDensity stationary_density(const std::function<double(double)>& drift,
                                     const std::function<double(double)>& diffusion2, double lo, double hi,
                                     int grid_points) {
  if (grid_points < 64) throw InvalidParameter("grid_points", "must be >= 64");
  if (!(hi > lo)) throw InvalidParameter("domain", "empty domain");
  lo = std::min(lo, 0.0);
  hi = std::max(hi, 0.0);

  StationaryDensity d;
  d.grid = uniform_grid(lo, hi, static_cast<std::size_t>(grid_points));
  const auto n = d.grid.size();
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = 2.0 * drift(d.grid[i]) / diffusion2(d.grid[i]);

  std::vector<double> cumulative(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) cumulative[i] = cumulative[i - 1] + 0.5 * (q[i] + q[i - 1]) * (d.grid[i] - d.grid[i - 1]);

  // Trapezoid from the bracketing node to 0 so that W(0) = 0.
  std::size_t j = 0;
  while (j + 1 < n && d.grid[j + 1] <= 0.0) ++j;
  const double q0 = 2.0 * drift(0.0) / diffusion2(0.0);
  const double at_zero = cumulative[j] + 0.5 * (q[j] + q0) * (0.0 - d.grid[j]);

  d.log_weight.resize(n);
  double w_max = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    d.log_weight[i] = cumulative[i] - at_zero;
    if (!std::isfinite(d.log_weight[i])) throw NonNormalizable("W is not finite on the grid");
    w_max = std::max(w_max, d.log_weight[i]);
  }
  d.pdf.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.pdf[i] = std::exp(d.log_weight[i] - w_max);
  finish_density(d);
  return d;
}

StationaryDensity stationary_density(const DriftDiffusionFit& fit, int grid_points) {
  return stationary_density([&fit](double y) { return fit.drift(y); }, [&fit](double y) { return fit.diffusion2(y); },
                            fit.y_min, fit.y_max, grid_points);
}

double prob_nonpositive(const StationaryDensity& density) {
  const auto& x = density.grid;
  const auto& f = density.pdf;
  if (x.empty() || x.front() > 0.0) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < x.size(); ++i) {
    if (x[i + 1] <= 0.0) {
      s += 0.5 * (f[i] + f[i + 1]) * (x[i + 1] - x[i]);
    } else {
      if (x[i] < 0.0) {
        const double t = (0.0 - x[i]) / (x[i + 1] - x[i]);
        const double f0 = f[i] + t * (f[i + 1] - f[i]);
        s += 0.5 * (f[i] + f0) * (0.0 - x[i]);
      }
      break;
    }
  }
  return std::clamp(s, 0.0, 1.0);
}

StationaryDensity reflect(const StationaryDensity& density) {
  StationaryDensity out;
  const auto n = density.grid.size();
  out.grid.resize(n);
  out.pdf.resize(n);
  out.log_weight.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    out.grid[i] = -density.grid[n - 1 - i];
    out.pdf[i] = density.pdf[n - 1 - i];
    out.log_weight[i] = density.log_weight.empty() ? 0.0 : density.log_weight[n - 1 - i];
  }
  return out;
}

namespace {

void require_uniform(const StationaryDensity& d, const char* which) {
  if (d.grid.size() < 2 || d.pdf.size() != d.grid.size()) throw GridMismatch(std::string(which) + ": malformed density");
  const double h = d.spacing();
  if (!(h > 0.0)) throw GridMismatch(std::string(which) + ": grid not increasing");
  const double tol = 1e-9 * std::max({1.0, std::abs(d.grid.front()), std::abs(d.grid.back())});
  for (std::size_t i = 0; i + 1 < d.grid.size(); ++i) {
    if (std::abs((d.grid[i + 1] - d.grid[i]) - h) > tol) {
      throw GridMismatch(std::string(which) + ": grid spacing not uniform");
    }
  }
}

std::vector<double> resample_pdf(const StationaryDensity& d, double h, std::size_t& count) {
  const double span = d.grid.back() - d.grid.front();
  count = static_cast<std::size_t>(std::floor(span / h + 1e-9)) + 1;
  std::vector<double> out(count);
  const double h0 = d.spacing();
  for (std::size_t i = 0; i < count; ++i) {
    const double pos = static_cast<double>(i) * h / h0;
    const auto k = std::min(static_cast<std::size_t>(std::floor(pos)), d.grid.size() - 1);
    if (k + 1 >= d.grid.size()) {
      out[i] = d.pdf.back();
    } else {
      const double t = pos - static_cast<double>(k);
      out[i] = d.pdf[k] + t * (d.pdf[k + 1] - d.pdf[k]);
    }
  }
  return out;
}

}  // namespace

StationaryDensity convolve_shifted(const StationaryDensity& now, const StationaryDensity& later) {
  require_uniform(now, "d_now");
  require_uniform(later, "d_later");
  const double h = std::min(now.spacing(), later.spacing());
  std::size_t n1 = 0, n2 = 0;
  const auto f1 = resample_pdf(now, h, n1);
  const auto f2 = resample_pdf(later, h, n2);

  // z_m = (lo2 - lo1) + m h, with y_i = lo1 + i h and y_i + z_m = lo2 + (i + m) h.
  const double offset = later.grid.front() - now.grid.front();
  const auto lags = n1 + n2 - 1;
  StationaryDensity out;
  out.grid.resize(lags);
  out.pdf.assign(lags, 0.0);
  for (std::size_t idx = 0; idx < lags; ++idx) {
    const auto m = static_cast<std::ptrdiff_t>(idx) - static_cast<std::ptrdiff_t>(n1 - 1);
    out.grid[idx] = offset + static_cast<double>(m) * h;
    const auto i_lo = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, -m));
    const auto i_hi = static_cast<std::size_t>(std::min<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(n1) - 1,
                                                                       static_cast<std::ptrdiff_t>(n2) - 1 - m));
    double s = 0.0;
    for (std::size_t i = i_lo; i <= i_hi && i_lo <= i_hi; ++i) {
      const double w = (i == 0 || i == n1 - 1) ? 0.5 : 1.0;
      s += w * f1[i] * f2[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(i) + m)];
    }
    out.pdf[idx] = s * h;
  }
  finish_density(out);
  out.log_weight.resize(lags);
  for (std::size_t i = 0; i < lags; ++i) out.log_weight[i] = std::log(std::max(out.pdf[i], 1e-300));
  return out;
}

}  // namespace chaos::sde
