#pragma once

#include <map>
#include <string>
#include <vector>

#include "cfv/measures.hpp"
#include "cfv/rng.hpp"
#include "cfv/trees.hpp"

namespace cfv {

// Elements are 0-based internally; serialization is 1-based.
using Blocks = std::vector<std::vector<int>>;

// Sorts every block and orders blocks by least element.
Blocks canonical_blocks(Blocks blocks);

struct Partition {
  int n = 0;
  Blocks blocks;

  Partition() = default;
  Partition(int ground, Blocks b);

  static Partition singletons(int n);
  static Partition single_block(int n);

  // index of the block containing each element
  std::vector<int> block_index() const;
  int block_count() const { return static_cast<int>(blocks.size()); }
  bool operator==(const Partition&) const = default;
  auto operator<=>(const Partition&) const = default;
};

struct SemiPartition {
  int n = 0;
  Blocks blocks;

  SemiPartition() = default;
  SemiPartition(int ground, Blocks b);

  // non-singleton blocks of a partition
  static SemiPartition from_partition(const Partition& p);
  std::vector<bool> covered() const;
  // sigma(i): block index in the partition with the same non-singleton blocks
  std::vector<int> index_map() const;
  bool empty() const { return blocks.empty(); }
  bool operator==(const SemiPartition&) const = default;
  auto operator<=>(const SemiPartition&) const = default;
};

std::string to_string(const Blocks& blocks);

std::vector<Partition> all_partitions(int n);
std::vector<SemiPartition> all_semipartitions(int n);

Partition restrict(const Partition& p, int n);
SemiPartition restrict(const SemiPartition& s, int n);

Partition sample_uniform_partition_with_sizes(const IntegerMassPartition& sizes, Rng& rng);

double paintbox_partition_prob(const MassPartition& x, const Partition& pi);
double paintbox_semipartition_prob(const MassPartition& x, const SemiPartition& sigma);
double urn_partition_prob(const IntegerMassPartition& x, int n, const Partition& pi);
double urn_semipartition_prob(const IntegerMassPartition& x, int n, const SemiPartition& sigma);

Partition sample_paintbox_partition(const MassPartition& x, int n, Rng& rng);
SemiPartition sample_paintbox_semipartition(const MassPartition& x, int n, Rng& rng);
Partition sample_urn_partition(const IntegerMassPartition& x, int n, Rng& rng);
SemiPartition sample_urn_semipartition(const IntegerMassPartition& x, int n, Rng& rng);

DistanceMatrix apply_partition(const Partition& pi, const DistanceMatrix& rho);
MarkedDistanceMatrix apply_semipartition(const SemiPartition& sigma, const MarkedDistanceMatrix& rv);

struct PartitionRates {
  int n = 0;
  std::map<Partition, double> rate;
};

struct SemiPartitionRates {
  int n = 0;
  std::map<SemiPartition, double> rate;
  // true when the measure has a Kingman atom and the rates cover the atom part only
  bool atoms_only = false;
};

bool is_single_doubleton(const Partition& pi);

PartitionRates limit_rates_partitions(const LimitMeasure& xi, int n);
SemiPartitionRates limit_rates_semipartitions(const LimitMeasure& xi, int n);

}  // namespace cfv
