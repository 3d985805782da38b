#include <chaos/errors.hpp>
#include <chaos/sde.hpp>

#include <algorithm>
#include <cmath>

namespace chaos::sde {

double ks_critical_coefficient(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidParameter("alpha", "must lie in (0, 1)");
  return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

KSResult ks_two_sample(std::span<const double> a, std::span<const double> b, double alpha) {
  constexpr std::size_t kMin = 8;
  if (a.size() < kMin) throw TooFewSamples(kMin, a.size());
  if (b.size() < kMin) throw TooFewSamples(kMin, b.size());
  const double c = ks_critical_coefficient(alpha);

  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());

  // Step both ECDFs past each distinct value so ties never open a spurious gap.
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n1 - static_cast<double>(j) / n2));
  }

  KSResult r;
  r.statistic = d;
  r.threshold = c * std::sqrt((n1 + n2) / (n1 * n2));
  r.reject_equality = d > r.threshold;
  r.n1 = x.size();
  r.n2 = y.size();
  return r;
}

}  // namespace chaos::sde
