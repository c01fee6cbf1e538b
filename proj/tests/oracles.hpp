#pragma once

// Independent reference computations used by the unit tests and the acceptance binary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <vector>

#include "cfv/metrics.hpp"
#include "cfv/partitions.hpp"
#include "cfv/trees.hpp"

namespace oracle {

using cfv::Blocks;
using cfv::DistanceMatrix;
using cfv::MarkedDistanceMatrix;
using cfv::Partition;
using cfv::SemiPartition;

// Prohorov distance by enumerating every subset F of the support of mu:
// the smallest eps with mu(F) <= nu(F^eps) + eps for all F.
inline double prohorov_brute(const cfv::EmpiricalMeasure& mu, const cfv::EmpiricalMeasure& nu,
                             const cfv::PointDistance& dist = cfv::euclidean) {
  int a = static_cast<int>(mu.points.size()), b = static_cast<int>(nu.points.size());
  std::vector<double> cand{0.0};
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j) cand.push_back(dist(mu.points[i], nu.points[j]));
  std::sort(cand.begin(), cand.end());
  cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
  auto excess = [&](double eps) {
    double worst = 0.0;
    for (unsigned mask = 1; mask < (1u << a); ++mask) {
      double m = 0.0, cover = 0.0;
      for (int i = 0; i < a; ++i)
        if (mask >> i & 1) m += mu.weights[i];
      for (int j = 0; j < b; ++j)
        for (int i = 0; i < a; ++i)
          if ((mask >> i & 1) && dist(mu.points[i], nu.points[j]) <= eps) {
            cover += nu.weights[j];
            break;
          }
      worst = std::max(worst, m - cover);
    }
    return worst;
  };
  double best = 1.0;
  for (double eps : cand) best = std::min(best, std::max(eps, excess(eps)));
  return best;
}

// Partition of positions by color; negative colors are singletons.
inline Partition by_color(const std::vector<int>& col) {
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

struct KernelTable {
  std::map<Partition, double> partition;
  std::map<SemiPartition, double> semi;
};

// Ordered draws without replacement from N individuals grouped into families.
inline KernelTable urn_by_enumeration(const cfv::IntegerMassPartition& x, int n) {
  std::vector<int> family;
  for (int f = 0; f < static_cast<int>(x.counts.size()); ++f) family.insert(family.end(), x.counts[f], f);
  int N = x.N;
  double w = 1.0;
  for (int k = 0; k < n; ++k) w /= N - k;
  KernelTable t;
  std::vector<int> pick;
  std::vector<bool> used(N, false);
  std::function<void()> rec = [&] {
    if (static_cast<int>(pick.size()) == n) {
      std::vector<int> col(n);
      for (int k = 0; k < n; ++k) col[k] = family[pick[k]];
      Partition p = by_color(col);
      Blocks big;
      for (const auto& blk : p.blocks)
        if (x.counts[col[blk.front()]] >= 2) big.push_back(blk);
      t.partition[p] += w;
      t.semi[SemiPartition(n, big)] += w;
      return;
    }
    for (int i = 0; i < N; ++i) {
      if (used[i]) continue;
      used[i] = true;
      pick.push_back(i);
      rec();
      pick.pop_back();
      used[i] = false;
    }
  };
  rec();
  return t;
}

// Independent colors: color c with probability x(c), a fresh singleton with the dust.
inline KernelTable paintbox_by_enumeration(const cfv::MassPartition& x, int n) {
  int k = static_cast<int>(x.w.size());
  KernelTable t;
  int total = 1;
  for (int i = 0; i < n; ++i) total *= k + 1;
  std::vector<int> col(n);
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
    Blocks big;
    for (const auto& blk : p.blocks)
      if (col[blk.front()] >= 0) big.push_back(blk);
    t.partition[p] += w;
    t.semi[SemiPartition(n, big)] += w;
  }
  return t;
}

// Ultrametric on n leaves from random pairwise merges at increasing heights.
// With dyadic set, heights are multiples of 1/64 so every sum is exact.
inline DistanceMatrix random_ultrametric(int n, std::mt19937_64& g, bool dyadic = false) {
  DistanceMatrix d(n);
  std::vector<std::vector<int>> cl;
  for (int i = 0; i < n; ++i) cl.push_back({i});
  std::exponential_distribution<double> step(1.0);
  double h = 0.0;
  while (cl.size() > 1) {
    h += dyadic ? std::floor(64.0 * step(g) + 1.0) / 64.0 : step(g);
    std::uniform_int_distribution<std::size_t> pick(0, cl.size() - 1);
    std::size_t a = pick(g), b = pick(g);
    while (b == a) b = pick(g);
    for (int i : cl[a])
      for (int j : cl[b]) d.set(i, j, 2.0 * h);
    cl[a].insert(cl[a].end(), cl[b].begin(), cl[b].end());
    cl.erase(cl.begin() + static_cast<std::ptrdiff_t>(b));
  }
  return d;
}

// beta of a random ultrametric with each mark shrunk by a uniform factor; the
// shrunk part moves into r, so alpha is unchanged.
inline MarkedDistanceMatrix random_marked(int n, std::mt19937_64& g) {
  MarkedDistanceMatrix rv = cfv::beta(random_ultrametric(n, g));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> moved(n);
  for (int i = 0; i < n; ++i) {
    moved[i] = rv.v[i] * u(g);
    rv.v[i] -= moved[i];
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) rv.r.set(i, j, rv.r(i, j) + moved[i] + moved[j]);
  return rv;
}

}  // namespace oracle
