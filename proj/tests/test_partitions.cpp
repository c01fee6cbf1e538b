#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <random>

#include "cfv/partitions.hpp"
#include "oracles.hpp"

using namespace cfv;

namespace {

std::vector<MassPartition> paintbox_grid() {
  return {MassPartition({0.5}), MassPartition({0.5, 0.25}), MassPartition({0.3, 0.3, 0.3}), MassPartition({1.0}),
          MassPartition({0.9, 0.05}), MassPartition({0.2})};
}

std::vector<IntegerMassPartition> urn_grid() {
  return {IntegerMassPartition(6, {3, 2, 1}), IntegerMassPartition(6, {2, 2, 1, 1}), IntegerMassPartition(6, {6}),
          IntegerMassPartition(7, {4, 1, 1, 1}), IntegerMassPartition(6, {1, 1, 1, 1, 1, 1})};
}

double l1_diff(const MassPartition& x, const MassPartition& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < std::max(x.w.size(), y.w.size()); ++i)
    s += std::abs((i < x.w.size() ? x.w[i] : 0.0) - (i < y.w.size() ? y.w[i] : 0.0));
  return s;
}

}  // namespace

TEST(Partitions, CanonicalForm) {
  Partition p(4, {{3, 1}, {2}, {0}});
  EXPECT_EQ(p.blocks, (Blocks{{0}, {1, 3}, {2}}));
  EXPECT_EQ(to_string(p.blocks), "[[1],[2,4],[3]]");
  EXPECT_EQ(p.block_index(), (std::vector<int>{0, 1, 2, 1}));
  EXPECT_THROW(Partition(3, {{0, 1}}), std::invalid_argument);
  EXPECT_THROW(Partition(3, {{0, 1}, {1, 2}}), std::invalid_argument);
}

TEST(Partitions, CountsAreBellNumbers) {
  const int bell[] = {1, 1, 2, 5, 15, 52, 203, 877};
  for (int n = 1; n <= 6; ++n) {
    EXPECT_EQ(static_cast<int>(all_partitions(n).size()), bell[n]);
    EXPECT_EQ(static_cast<int>(all_semipartitions(n).size()), bell[n + 1]);
  }
}

TEST(Partitions, Restriction) {
  Partition p(5, {{0, 3}, {1, 4}, {2}});
  EXPECT_EQ(restrict(p, 3), Partition(3, {{0}, {1}, {2}}));
  EXPECT_EQ(restrict(p, 4), Partition(4, {{0, 3}, {1}, {2}}));
  SemiPartition s(4, {{0, 3}, {2}});
  EXPECT_EQ(restrict(s, 3), SemiPartition(3, {{0}, {2}}));
}

TEST(Partitions, SingleDoubleton) {
  EXPECT_TRUE(is_single_doubleton(Partition(3, {{0, 2}, {1}})));
  EXPECT_FALSE(is_single_doubleton(Partition(3, {{0, 1, 2}})));
  EXPECT_FALSE(is_single_doubleton(Partition(4, {{0, 1}, {2, 3}})));
  EXPECT_FALSE(is_single_doubleton(Partition::singletons(3)));
}

TEST(Kernels, PaintboxNormalized) {
  for (const MassPartition& x : paintbox_grid())
    for (int n = 1; n <= 6; ++n) {
      double sp = 0.0, ss = 0.0;
      for (const Partition& pi : all_partitions(n)) sp += paintbox_partition_prob(x, pi);
      for (const SemiPartition& s : all_semipartitions(n)) ss += paintbox_semipartition_prob(x, s);
      EXPECT_NEAR(sp, 1.0, 1e-12);
      EXPECT_NEAR(ss, 1.0, 1e-12);
    }
}

TEST(Kernels, UrnNormalized) {
  for (const IntegerMassPartition& x : urn_grid())
    for (int n = 1; n <= 6; ++n) {
      double sp = 0.0, ss = 0.0;
      for (const Partition& pi : all_partitions(n)) sp += urn_partition_prob(x, n, pi);
      for (const SemiPartition& s : all_semipartitions(n)) ss += urn_semipartition_prob(x, n, s);
      EXPECT_NEAR(sp, 1.0, 1e-12);
      EXPECT_NEAR(ss, 1.0, 1e-12);
    }
}

TEST(Kernels, PaintboxMatchesEnumeration) {
  for (const MassPartition& x : {MassPartition({0.5}), MassPartition({0.5, 0.25}), MassPartition({0.4, 0.3, 0.2})})
    for (int n = 1; n <= 6; ++n) {
      oracle::KernelTable t = oracle::paintbox_by_enumeration(x, n);
      for (const Partition& pi : all_partitions(n)) EXPECT_NEAR(paintbox_partition_prob(x, pi), t.partition[pi], 1e-12);
      for (const SemiPartition& s : all_semipartitions(n))
        EXPECT_NEAR(paintbox_semipartition_prob(x, s), t.semi[s], 1e-12);
    }
}

TEST(Kernels, UrnMatchesEnumeration) {
  for (const IntegerMassPartition& x : urn_grid())
    for (int n = 1; n <= 6; ++n) {
      oracle::KernelTable t = oracle::urn_by_enumeration(x, n);
      for (const Partition& pi : all_partitions(n)) EXPECT_NEAR(urn_partition_prob(x, n, pi), t.partition[pi], 1e-12);
      for (const SemiPartition& s : all_semipartitions(n))
        EXPECT_NEAR(urn_semipartition_prob(x, n, s), t.semi[s], 1e-12);
    }
}

TEST(Kernels, FrozenValues) {
  MassPartition half({0.5});
  // 1 and 2 share the colored block, 3 falls in the dust
  EXPECT_NEAR(paintbox_partition_prob(half, Partition(3, {{0, 1}, {2}})), 0.125, 1e-15);
  EXPECT_NEAR(paintbox_partition_prob(half, Partition::singletons(3)), 0.5, 1e-15);
  EXPECT_NEAR(urn_partition_prob(IntegerMassPartition(4, {2, 1, 1}), 2, Partition(2, {{0, 1}})), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(paintbox_semipartition_prob(half, SemiPartition(1, {{0}})), 0.5, 1e-15);
}

TEST(Kernels, UrnApproachesPaintbox) {
  for (int N : {8, 16, 32, 64}) {
    std::vector<int> one_half{N / 2};
    one_half.insert(one_half.end(), N - N / 2, 1);
    for (const IntegerMassPartition& x : {IntegerMassPartition(N, one_half), IntegerMassPartition(N, {N / 2, N / 4, N / 4})}) {
      // singleton families of the urn are dust of the paintbox
      std::vector<double> w;
      for (int c : x.counts)
        if (c >= 2) w.push_back(static_cast<double>(c) / N);
      MassPartition y(w);
      for (int n = 1; n <= 5; ++n) {
        double bound = static_cast<double>(n) * n / N;
        for (const Partition& pi : all_partitions(n))
          EXPECT_LE(std::abs(urn_partition_prob(x, n, pi) - paintbox_partition_prob(y, pi)), bound);
        for (const SemiPartition& s : all_semipartitions(n))
          EXPECT_LE(std::abs(urn_semipartition_prob(x, n, s) - paintbox_semipartition_prob(y, s)), bound);
      }
    }
  }
}

TEST(Kernels, PaintboxLipschitz) {
  std::mt19937_64 g(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto draw = [&] {
      double a = u(g), b = u(g) * (1 - a), c = u(g) * (1 - a - b);
      return MassPartition({a, b, c});
    };
    MassPartition x = draw(), y = draw();
    double d = l1_diff(x, y);
    for (int n = 1; n <= 4; ++n)
      for (const Partition& pi : all_partitions(n))
        EXPECT_LE(std::abs(paintbox_partition_prob(x, pi) - paintbox_partition_prob(y, pi)), n * d + 1e-12);
  }
}

TEST(Kernels, SemiPartitionMonotone) {
  for (const MassPartition& x : paintbox_grid())
    for (int n = 1; n <= 5; ++n)
      for (const SemiPartition& s : all_semipartitions(n)) {
        if (s.empty()) continue;
        EXPECT_LE(paintbox_semipartition_prob(x, s), x.l1() + 1e-12);
      }
  EXPECT_NEAR(paintbox_semipartition_prob(MassPartition({0.5, 0.25}), SemiPartition(1, {{0}})), 0.75, 1e-15);
}

TEST(Kernels, RestrictionConsistency) {
  MassPartition x({0.5, 0.2});
  for (int n = 2; n <= 5; ++n) {
    std::map<Partition, double> marg;
    for (const Partition& pi : all_partitions(n)) marg[restrict(pi, n - 1)] += paintbox_partition_prob(x, pi);
    for (const auto& [pi, p] : marg) EXPECT_NEAR(p, paintbox_partition_prob(x, pi), 1e-12);
  }
}

TEST(Samplers, MatchProbabilities) {
  const int draws = 100000;
  MassPartition x({0.5, 0.25});
  IntegerMassPartition ux(8, {4, 2, 1, 1});
  int n = 3;
  Rng rng = substream(5, 0);
  std::map<Partition, int> pb, ub;
  std::map<SemiPartition, int> ps, us;
  for (int k = 0; k < draws; ++k) {
    ++pb[sample_paintbox_partition(x, n, rng)];
    ++ub[sample_urn_partition(ux, n, rng)];
    ++ps[sample_paintbox_semipartition(x, n, rng)];
    ++us[sample_urn_semipartition(ux, n, rng)];
  }
  auto check = [&](double p, int count) {
    double se = std::sqrt(p * (1 - p) / draws);
    EXPECT_NEAR(static_cast<double>(count) / draws, p, 4 * se + 1e-12);
  };
  for (const Partition& pi : all_partitions(n)) {
    check(paintbox_partition_prob(x, pi), pb[pi]);
    check(urn_partition_prob(ux, n, pi), ub[pi]);
  }
  for (const SemiPartition& s : all_semipartitions(n)) {
    check(paintbox_semipartition_prob(x, s), ps[s]);
    check(urn_semipartition_prob(ux, n, s), us[s]);
  }
}

TEST(Samplers, UniformPartitionWithSizes) {
  Rng rng = substream(9, 0);
  IntegerMassPartition sizes(6, {3, 2, 1});
  for (int k = 0; k < 100; ++k) {
    Partition p = sample_uniform_partition_with_sizes(sizes, rng);
    std::vector<int> got;
    for (const auto& b : p.blocks) got.push_back(static_cast<int>(b.size()));
    std::sort(got.rbegin(), got.rend());
    EXPECT_EQ(got, sizes.counts);
  }
}

TEST(Actions, PreserveTreeSpaces) {
  std::mt19937_64 g(21);
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + trial % 5;
    DistanceMatrix rho = oracle::random_ultrametric(n, g);
    MarkedDistanceMatrix rv = oracle::random_marked(n, g);
    for (const Partition& pi : all_partitions(n)) EXPECT_FALSE(validate(apply_partition(pi, rho)).has_value());
    for (const SemiPartition& s : all_semipartitions(n)) {
      auto v = validate(apply_semipartition(s, rv));
      EXPECT_FALSE(v.has_value()) << (v ? v->describe() : "");
    }
  }
}

TEST(Actions, FrozenExample) {
  DistanceMatrix rho(3);
  rho.set(0, 1, 1.0);
  rho.set(0, 2, 3.0);
  rho.set(1, 2, 3.0);
  DistanceMatrix out = apply_partition(Partition(3, {{0, 2}, {1}}), rho);
  EXPECT_EQ(out(0, 2), 0.0);
  EXPECT_EQ(out(0, 1), 1.0);
  EXPECT_EQ(out(1, 2), 1.0);
  MarkedDistanceMatrix rv = beta(rho);
  MarkedDistanceMatrix m = apply_semipartition(SemiPartition(3, {{0, 1}}), rv);
  EXPECT_EQ(m.v[0], 0.0);
  EXPECT_EQ(m.v[1], 0.0);
  EXPECT_EQ(m.r(0, 1), 2 * rv.v[0]);
}

TEST(LimitRates, KingmanAndHalfAtom) {
  PartitionRates k = limit_rates_partitions(LimitMeasure::kingman_only(), 3);
  EXPECT_EQ(k.rate.at(Partition(3, {{0, 1}, {2}})), 1.0);
  EXPECT_EQ(k.rate.at(Partition::single_block(3)), 0.0);
  PartitionRates h = limit_rates_partitions(LimitMeasure::point(MassPartition({0.5})), 3);
  EXPECT_NEAR(h.rate.at(Partition(3, {{0, 1}, {2}})), 0.5, 1e-15);
  EXPECT_NEAR(h.rate.at(Partition::single_block(3)), 0.5, 1e-15);
  SemiPartitionRates s = limit_rates_semipartitions(LimitMeasure::point(MassPartition({0.5})), 1);
  EXPECT_NEAR(s.rate.at(SemiPartition(1, {{0}})), 2.0, 1e-15);
  EXPECT_FALSE(s.atoms_only);
  EXPECT_TRUE(limit_rates_semipartitions(LimitMeasure::kingman_only(), 2).atoms_only);
}
