#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cfv/measures.hpp"
#include "cfv/partitions.hpp"
#include "cfv/trees.hpp"

namespace cfv {

struct InvariantViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChainState {
  int N = 0;
  ReproductionLaw law;
  double cN = 0.0;
  // per-generation mark increment; distances grow by 2 * unit. Equal to cN unless
  // the chain runs in generation units (unit = 1).
  double unit = 0.0;
  std::int64_t generation = 0;
  DistanceMatrix rho;
  std::optional<MarkedDistanceMatrix> marked;
  Partition last_partition;
  // parent in the previous generation of every current individual
  std::vector<int> last_parents;
  bool check_each_step = false;
  Rng rng;
};

struct ChainOptions {
  bool track_marked = false;
  bool generation_units = false;
  bool check_each_step = false;
};

// Draws a uniformly relabeled copy of the initial state (a point mass is expanded
// to N points at distance zero). Marked initial states define rho := alpha(r, v);
// plain ones with track_marked start the marked chain at beta(rho).
ChainState init(int N, const ReproductionLaw& law, const TreeState& initial, const ChainOptions& opts,
                std::uint64_t seed);
// Same, but keeps the labels of an initial state with exactly N points.
ChainState init_labeled(int N, const ReproductionLaw& law, const TreeState& initial, const ChainOptions& opts,
                        std::uint64_t seed);

// Apply one generation with the given family partition and family ancestors.
void apply_generation(ChainState& s, const Partition& pi, const std::vector<int>& block_parent);
void step(ChainState& s);

struct ObserverRow {
  std::int64_t generation;
  double t;
  std::string observable;
  double value;
};

struct Observer {
  std::vector<std::int64_t> at;
  std::function<void(const ChainState&, std::vector<ObserverRow>&)> fn;
};

// generation index of time t, floor(t / cN)
std::int64_t generation_of(double t, double cN);

std::vector<ObserverRow> run(ChainState& s, std::int64_t generations, const std::vector<Observer>& observers);

// Age mark of individual 1 at generation floor(t/cN): cN * min(T, cap) with T the
// number of generations back to the latest non-singleton family membership.
double backward_age_mark(const ReproductionLaw& law, int N, double t, Rng& rng);
// Reference version drawing the family sizes of every generation.
double backward_age_mark_reference(const ReproductionLaw& law, int N, double t, Rng& rng);

// External branch length of individual 1 at generation floor(t/cN), from a point-mass
// initial state, by tracking the ancestor count of the whole population backwards.
// Supports laws whose events have one large family (moran, sparse-paintbox with one
// block, example5, singletons).
double backward_external_branch(const ReproductionLaw& law, int N, double t, Rng& rng);
// Same quantity from a full forward simulation.
double forward_external_branch(const ReproductionLaw& law, int N, double t, Rng& rng);

// Law of the restricted partition gamma_n(pi_1) for enumerable laws.
struct RestrictedPartitionLaw {
  int n = 0;
  std::vector<Partition> partitions;
  std::vector<double> probs;  // excludes the all-singleton partition
  double nontrivial = 0.0;
};
RestrictedPartitionLaw restricted_partition_law(const ReproductionLaw& law, int N, int n);

// Distances among an n-sample at generation k, by following the sample's
// ancestral lineages backwards. Lineages not merged by generation 0 take distances
// from a without-replacement sample of the initial state.
DistanceMatrix backward_sample_distances(const ReproductionLaw& law, int N, int n, std::int64_t k,
                                         const TreeState& initial, Rng& rng);

// gamma_n of (rho_0, rho_1) for one generation from a uniformly relabeled initial state.
std::pair<DistanceMatrix, DistanceMatrix> one_step_sample(const ReproductionLaw& law, int N, double cN, int n,
                                                          const TreeState& initial, Rng& rng);
std::pair<MarkedDistanceMatrix, MarkedDistanceMatrix> one_step_sample_marked(const ReproductionLaw& law, int N,
                                                                             double cN, int n,
                                                                             const TreeState& initial, Rng& rng);

// rho_k from full ancestry, for cross-checking the incremental update.
DistanceMatrix closed_form_distances(const DistanceMatrix& rho0, const std::vector<std::vector<int>>& parents,
                                     double unit);

}  // namespace cfv
