#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cfv/measures.hpp"
#include "cfv/partitions.hpp"
#include "cfv/replicate.hpp"
#include "cfv/stats.hpp"
#include "cfv/trees.hpp"

namespace cfv {

struct CoalescentSample {
  MarkedDistanceMatrix rv;
  DistanceMatrix rho;  // alpha(rv)
  int events = 0;
};

// n-sample of the Xi-Fleming-Viot tree at time t via the Xi-coalescent run backwards
// for duration t. Lineages surviving to time 0 take distances (and marks) from a
// with-replacement sample of the initial state.
CoalescentSample sample_coalescent_tree(const LimitMeasure& xi, int n, double t, const TreeState* initial, Rng& rng);

// Jump-chain partition of n lineages at one event of the atom x (reference kernel).
Partition coalescent_event_partition(const MassPartition& x, int n, Rng& rng);

struct ExpTerm {
  double coef = 1.0;
  std::vector<double> a;  // n*n, coefficient of d(i,j) for ordered pairs
  std::vector<double> b;  // n, coefficient of v(i)
};

// phi(d, v) = constant + sum_k coef_k exp(-sum a_k(i,j) d(i,j) - sum b_k(i) v(i))
// with non-negative a, b. For marked arguments d is the r-matrix.
struct TestFunction {
  int n = 0;
  double constant = 0.0;
  std::vector<ExpTerm> terms;

  static TestFunction constant_fn(int n, double c);
  // exp(-d(1,2) - d(2,1))
  static TestFunction pair_exp(double a = 1.0);
  // exp(-b v(1)) on n points
  static TestFunction mark_exp(int n, double b = 1.0);
  static TestFunction exp_term(int n, std::vector<double> a, std::vector<double> b, double coef = 1.0);

  double operator()(const DistanceMatrix& d, const std::vector<double>* v = nullptr) const;
  double d_dist(const DistanceMatrix& d, const std::vector<double>* v, int i, int j) const;
  double d_mark(const DistanceMatrix& d, const std::vector<double>* v, int i) const;
  // 2 * sum_{i != j} d phi / d d(i,j)
  double grow(const DistanceMatrix& d, const std::vector<double>* v = nullptr) const;
  // sum_i d phi / d v(i)
  double mark_grow(const DistanceMatrix& d, const std::vector<double>& v) const;

  TestFunction scaled(double s) const;
  TestFunction plus(const TestFunction& other) const;
};

struct WeightedMatrix {
  double w;
  DistanceMatrix d;
  std::optional<std::vector<double>> v;
};

struct GeneratorValue {
  double value = 0.0;
  double se = 0.0;  // zero in exact mode
  bool exact = true;
  bool dust_mismatch = false;  // measure outside the intended dust class
};

// All ordered n-tuples drawn with replacement from chi, with their probabilities.
std::vector<WeightedMatrix> enumerate_with_replacement(const TreeState& chi, int n);

GeneratorValue apply_generator_B(const LimitMeasure& xi, const TreeState& chi, const TestFunction& phi,
                                 int mc_samples = 0, std::uint64_t seed = 0);
GeneratorValue apply_generator_Bhat(const LimitMeasure& xi, const TreeState& chi, const TestFunction& phi,
                                    int mc_samples = 0, std::uint64_t seed = 0);
// xi_state: distribution of n x n matrices representing a point of the space of
// distance matrix distributions.
GeneratorValue apply_generator_C(const LimitMeasure& xi, const std::vector<WeightedMatrix>& xi_state,
                                 const TestFunction& phi);

// c_N^{-1} (p_N - I) Phi_N at chi0, by Monte Carlo over one Cannings generation.
Estimate one_step_generator_estimate(const ReproductionLaw& law, int N, const TreeState& chi0, const TestFunction& phi,
                                     std::int64_t replicates, std::uint64_t seed, Exec exec = Exec::parallel,
                                     bool marked = false);

}  // namespace cfv
