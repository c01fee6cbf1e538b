#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace cfv {

struct Estimate {
  double mean = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::int64_t replicates = 0;
};

// Sample mean with a two-sided normal-theory interval at level 1 - alpha.
Estimate mean_estimate(const std::vector<double>& values, double alpha);

// Proportion with a normal-theory interval.
Estimate proportion_estimate(std::int64_t hits, std::int64_t n, double alpha);

// sup_x |F_n(x) - F(x)|. `cdf_left` gives F(x-) and `atoms` lists jump points of F;
// both may be omitted for continuous F.
double ks_distance(std::vector<double> samples, const std::function<double(double)>& cdf,
                   const std::function<double(double)>& cdf_left = {}, const std::vector<double>& atoms = {});

// Asymptotic Kolmogorov tail probability P(sqrt(n) D > x) with Stephens' small-sample correction.
double ks_pvalue(double D, double n_effective);

struct TwoSampleKs {
  double D;
  double p;
};
TwoSampleKs ks_two_sample(std::vector<double> a, std::vector<double> b);

// Dvoretzky-Kiefer-Wolfowitz half-width for an empirical CDF of n samples.
double dkw_band(std::int64_t n, double alpha);

// Pearson chi-square goodness-of-fit p-value.
double chi_square_pvalue(const std::vector<double>& observed, const std::vector<double>& expected_probs);

}  // namespace cfv
