#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>

#include "cfv/harness.hpp"
#include "cfv/limits.hpp"
#include "cfv/metrics.hpp"
#include "cfv/partitions.hpp"

namespace cfv {

namespace {

ResultRow max_error_row(const std::string& tag, double err, double bound) {
  ResultRow r;
  r.experiment = "selftest";
  r.tag = tag;
  r.estimate = err;
  r.reference = bound;
  r.agree = err <= bound;
  settle(r);
  return r;
}

// Partition of the sample positions by color, with negative colors as singletons.
Partition by_color(const std::vector<int>& col) {
  Blocks blocks;
  std::map<int, int> where;
  for (int i = 0; i < static_cast<int>(col.size()); ++i) {
    if (col[i] < 0) {
      blocks.push_back({i});
      continue;
    }
    auto [it, fresh] = where.emplace(col[i], static_cast<int>(blocks.size()));
    if (fresh) blocks.emplace_back();
    blocks[it->second].push_back(i);
  }
  return Partition(static_cast<int>(col.size()), blocks);
}

SemiPartition semi_of(const Partition& p, const std::vector<int>& col, const std::vector<int>& family_size) {
  Blocks blocks;
  for (const auto& b : p.blocks)
    if (col[b.front()] >= 0 && family_size[col[b.front()]] >= 2) blocks.push_back(b);
  return SemiPartition(p.n, blocks);
}

double urn_enumeration_error(const IntegerMassPartition& x) {
  int N = x.N;
  std::vector<int> family, family_size = x.counts;
  for (int f = 0; f < static_cast<int>(x.counts.size()); ++f) family.insert(family.end(), x.counts[f], f);
  double err = 0.0;
  for (int n = 1; n <= std::min(6, N); ++n) {
    std::map<Partition, double> pp;
    std::map<SemiPartition, double> sp;
    double w = 1.0;
    for (int k = 0; k < n; ++k) w /= N - k;
    std::vector<int> pick(n);
    std::function<void(int, std::vector<bool>&)> rec = [&](int depth, std::vector<bool>& used) {
      if (depth == n) {
        std::vector<int> col(n);
        for (int k = 0; k < n; ++k) col[k] = family[pick[k]];
        Partition p = by_color(col);
        pp[p] += w;
        sp[semi_of(p, col, family_size)] += w;
        return;
      }
      for (int i = 0; i < N; ++i) {
        if (used[i]) continue;
        used[i] = true;
        pick[depth] = i;
        rec(depth + 1, used);
        used[i] = false;
      }
    };
    std::vector<bool> used(N, false);
    rec(0, used);
    for (const Partition& pi : all_partitions(n)) err = std::max(err, std::abs(urn_partition_prob(x, n, pi) - pp[pi]));
    for (const SemiPartition& s : all_semipartitions(n))
      err = std::max(err, std::abs(urn_semipartition_prob(x, n, s) - sp[s]));
  }
  return err;
}

double paintbox_enumeration_error(const MassPartition& x) {
  int k = static_cast<int>(x.w.size());
  double err = 0.0;
  std::vector<int> sizes(k, 2);  // any family of positive mass is a non-singleton
  for (int n = 1; n <= 6; ++n) {
    std::map<Partition, double> pp;
    std::map<SemiPartition, double> sp;
    std::vector<int> col(n, 0);
    int total = 1;
    for (int i = 0; i < n; ++i) total *= k + 1;
    for (int code = 0; code < total; ++code) {
      int c = code;
      double w = 1.0;
      for (int i = 0; i < n; ++i) {
        int d = c % (k + 1);
        c /= k + 1;
        col[i] = d == k ? -1 - i : d;
        w *= d == k ? x.dust() : x.w[d];
      }
      Partition p = by_color(col);
      pp[p] += w;
      sp[semi_of(p, col, sizes)] += w;
    }
    for (const Partition& pi : all_partitions(n)) err = std::max(err, std::abs(paintbox_partition_prob(x, pi) - pp[pi]));
    for (const SemiPartition& s : all_semipartitions(n))
      err = std::max(err, std::abs(paintbox_semipartition_prob(x, s) - sp[s]));
  }
  return err;
}

DistanceMatrix five_point_tree() {
  DistanceMatrix d(5);
  d.set(0, 1, 0.4);
  d.set(2, 3, 1.0);
  d.set(0, 2, 2.2);
  d.set(0, 3, 2.2);
  d.set(1, 2, 2.2);
  d.set(1, 3, 2.2);
  for (int i = 0; i < 4; ++i) d.set(i, 4, 3.0);
  return d;
}

}  // namespace

std::vector<ResultRow> selftest(const ExperimentConfig&) {
  std::vector<ResultRow> rows;

  double err = 0.0;
  for (int N = 4; N <= 512; ++N) {
    ReproductionLaw law = ReproductionLaw::moran();
    double cN = pairwise_coalescence_probability(law, N);
    double p = urn_partition_prob(law.enumerate(N)->front().second, 2, Partition(2, {{0, 1}}));
    err = std::max(err, std::abs(p / cN - 1.0));
  }
  rows.push_back(max_error_row("moran rate {{1,2}} = 1, N=4..512", err, 1e-12));

  err = std::max({urn_enumeration_error(IntegerMassPartition(6, {3, 2, 1})),
                  urn_enumeration_error(IntegerMassPartition(6, {2, 2, 1, 1})),
                  urn_enumeration_error(IntegerMassPartition(5, {5}))});
  rows.push_back(max_error_row("urn kernels vs enumeration", err, 1e-12));

  err = std::max(paintbox_enumeration_error(MassPartition({0.5, 0.25})), paintbox_enumeration_error(MassPartition({0.5})));
  rows.push_back(max_error_row("paintbox kernels vs enumeration", err, 1e-12));

  err = 0.0;
  err = std::max(err, std::abs(prohorov(EmpiricalMeasure::on_line({0.0}, {1.0}), EmpiricalMeasure::on_line({0.0, 1.0}, {0.5, 0.5})).value - 0.5));
  err = std::max(err, std::abs(prohorov(EmpiricalMeasure::on_line({0.0}, {1.0}), EmpiricalMeasure::on_line({0.3}, {1.0})).value - 0.3));
  err = std::max(err, std::abs(prohorov(EmpiricalMeasure::on_line({0.0}, {1.0}), EmpiricalMeasure::on_line({2.0}, {1.0})).value - 1.0));
  rows.push_back(max_error_row("prohorov reference values", err, 1e-9));

  {
    TreeState chi(five_point_tree());
    TestFunction phi = TestFunction::pair_exp();
    double with = 0.0;
    for (const WeightedMatrix& wm : enumerate_with_replacement(chi, 2)) with += wm.w * phi(wm.d);
    double without = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        if (i == j) continue;
        DistanceMatrix d(2);
        d.set(0, 1, chi.rho(i, j));
        without += phi(d) / 20.0;
      }
    rows.push_back(max_error_row("with/without replacement, n=2 N=5", std::abs(with - without), 2.0 * 4 / 5));
  }

  {
    DistanceMatrix d = five_point_tree();
    rows.push_back(max_error_row("alpha(beta(rho)) = rho", alpha(beta(d)) == d ? 0.0 : 1.0, 0.0));
  }

  err = 0.0;
  for (int N : {8, 64, 1024}) {
    for (const ReproductionLaw& law : {ReproductionLaw::sparse_paintbox(MassPartition({0.5})), ReproductionLaw::example5()}) {
      auto s = *law.enumerate(N);
      err = std::max(err, std::abs(coalescence_from_support(s, N) / *closed_form_coalescence(law, N) - 1.0));
      err = std::max(err, std::abs(escape_from_support(s, N) / *closed_form_escape(law, N) - 1.0));
    }
  }
  rows.push_back(max_error_row("c_N, b_N closed forms vs support", err, 1e-9));
  return rows;
}

}  // namespace cfv
