#include "cfv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace cfv {

namespace {

double z_quantile(double alpha) {
  return boost::math::quantile(boost::math::normal_distribution<double>(), 1.0 - alpha / 2);
}

}  // namespace

Estimate mean_estimate(const std::vector<double>& values, double alpha) {
  if (values.empty()) throw std::invalid_argument("mean_estimate: no values");
  Estimate e;
  e.replicates = static_cast<std::int64_t>(values.size());
  double n = static_cast<double>(values.size());
  e.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : values) ss += (v - e.mean) * (v - e.mean);
  e.se = values.size() > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  double z = z_quantile(alpha);
  e.ci_low = e.mean - z * e.se;
  e.ci_high = e.mean + z * e.se;
  return e;
}

Estimate proportion_estimate(std::int64_t hits, std::int64_t n, double alpha) {
  if (n <= 0) throw std::invalid_argument("proportion_estimate: n must be positive");
  Estimate e;
  e.replicates = n;
  e.mean = static_cast<double>(hits) / static_cast<double>(n);
  e.se = std::sqrt(e.mean * (1 - e.mean) / static_cast<double>(n));
  double z = z_quantile(alpha);
  e.ci_low = e.mean - z * e.se;
  e.ci_high = e.mean + z * e.se;
  return e;
}

double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left, const std::vector<double>& atoms) {
  if (samples.empty()) throw std::invalid_argument("ks_distance: no samples");
  std::sort(samples.begin(), samples.end());
  auto left = [&](double x) { return cdf_left ? cdf_left(x) : cdf(x); };
  double n = static_cast<double>(samples.size());
  double D = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    double x = samples[i];
    // empirical CDF just below x and at x
    std::size_t below = static_cast<std::size_t>(std::lower_bound(samples.begin(), samples.end(), x) - samples.begin());
    std::size_t upto = static_cast<std::size_t>(std::upper_bound(samples.begin(), samples.end(), x) - samples.begin());
    D = std::max(D, std::abs(static_cast<double>(upto) / n - cdf(x)));
    D = std::max(D, std::abs(static_cast<double>(below) / n - left(x)));
    i = upto - 1;
  }
  for (double a : atoms) {
    std::size_t below = static_cast<std::size_t>(std::lower_bound(samples.begin(), samples.end(), a) - samples.begin());
    std::size_t upto = static_cast<std::size_t>(std::upper_bound(samples.begin(), samples.end(), a) - samples.begin());
    D = std::max(D, std::abs(static_cast<double>(upto) / n - cdf(a)));
    D = std::max(D, std::abs(static_cast<double>(below) / n - left(a)));
  }
  return D;
}

double ks_pvalue(double D, double n_effective) {
  double sn = std::sqrt(n_effective);
  double lambda = (sn + 0.12 + 0.11 / sn) * D;
  if (lambda < 1e-3) return 1.0;
  double sum = 0.0, sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

TwoSampleKs ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double D = 0.0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    D = std::max(D, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return {D, ks_pvalue(D, na * nb / (na + nb))};
}

double dkw_band(std::int64_t n, double alpha) {
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected_probs) {
  if (observed.size() != expected_probs.size() || observed.size() < 2)
    throw std::invalid_argument("chi_square_pvalue: need matching vectors with at least two cells");
  double n = std::accumulate(observed.begin(), observed.end(), 0.0);
  double stat = 0.0;
  int cells = 0;
  for (std::size_t k = 0; k < observed.size(); ++k) {
    double e = n * expected_probs[k];
    if (e <= 0.0) {
      if (observed[k] > 0.0) return 0.0;
      continue;
    }
    stat += (observed[k] - e) * (observed[k] - e) / e;
    ++cells;
  }
  if (cells < 2) return 1.0;
  return boost::math::gamma_q((cells - 1) / 2.0, stat / 2.0);
}

}  // namespace cfv
