#include "cfv/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cfv {

Blocks canonical_blocks(Blocks blocks) {
  blocks.erase(std::remove_if(blocks.begin(), blocks.end(), [](const auto& b) { return b.empty(); }), blocks.end());
  for (auto& b : blocks) std::sort(b.begin(), b.end());
  std::sort(blocks.begin(), blocks.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return blocks;
}

namespace {

std::vector<int> membership(int n, const Blocks& blocks, const char* what) {
  std::vector<int> owner(n, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int e : blocks[b]) {
      if (e < 0 || e >= n) throw std::invalid_argument(std::string(what) + ": element out of range");
      if (owner[e] != -1) throw std::invalid_argument(std::string(what) + ": blocks overlap");
      owner[e] = static_cast<int>(b);
    }
  return owner;
}

}  // namespace

Partition::Partition(int ground, Blocks b) : n(ground), blocks(canonical_blocks(std::move(b))) {
  auto owner = membership(n, blocks, "Partition");
  for (int o : owner)
    if (o == -1) throw std::invalid_argument("Partition: blocks must cover the ground set");
}

Partition Partition::singletons(int n) {
  Blocks b(n);
  for (int i = 0; i < n; ++i) b[i] = {i};
  return Partition(n, std::move(b));
}

Partition Partition::single_block(int n) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  return Partition(n, n > 0 ? Blocks{all} : Blocks{});
}

std::vector<int> Partition::block_index() const {
  std::vector<int> idx(n, -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int e : blocks[b]) idx[e] = static_cast<int>(b);
  return idx;
}

SemiPartition::SemiPartition(int ground, Blocks b) : n(ground), blocks(canonical_blocks(std::move(b))) {
  membership(n, blocks, "SemiPartition");
}

SemiPartition SemiPartition::from_partition(const Partition& p) {
  Blocks b;
  for (const auto& blk : p.blocks)
    if (blk.size() >= 2) b.push_back(blk);
  return SemiPartition(p.n, std::move(b));
}

std::vector<bool> SemiPartition::covered() const {
  std::vector<bool> c(n, false);
  for (const auto& b : blocks)
    for (int e : b) c[e] = true;
  return c;
}

std::vector<int> SemiPartition::index_map() const {
  Blocks b;
  std::vector<bool> in_big(n, false);
  for (const auto& blk : blocks)
    if (blk.size() >= 2) {
      b.push_back(blk);
      for (int e : blk) in_big[e] = true;
    }
  for (int i = 0; i < n; ++i)
    if (!in_big[i]) b.push_back({i});
  return Partition(n, std::move(b)).block_index();
}

std::string to_string(const Blocks& blocks) {
  std::ostringstream os;
  os << "[";
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    if (b) os << ",";
    os << "[";
    for (std::size_t k = 0; k < blocks[b].size(); ++k) {
      if (k) os << ",";
      os << blocks[b][k] + 1;
    }
    os << "]";
  }
  os << "]";
  return os.str();
}

namespace {

void growth_strings(int n, std::vector<int>& cur, int max_label, std::vector<Blocks>& out) {
  int i = static_cast<int>(cur.size());
  if (i == n) {
    Blocks b(max_label + 1);
    for (int e = 0; e < n; ++e) b[cur[e]].push_back(e);
    out.push_back(std::move(b));
    return;
  }
  for (int l = 0; l <= max_label + 1; ++l) {
    cur.push_back(l);
    growth_strings(n, cur, std::max(max_label, l), out);
    cur.pop_back();
  }
}

std::vector<Blocks> set_partitions(int n) {
  std::vector<Blocks> out;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  std::vector<int> cur;
  growth_strings(n, cur, -1, out);
  return out;
}

}  // namespace

std::vector<Partition> all_partitions(int n) {
  std::vector<Partition> out;
  for (auto& b : set_partitions(n)) out.emplace_back(n, std::move(b));
  return out;
}

std::vector<SemiPartition> all_semipartitions(int n) {
  // partitions of [n+1]; the block holding the extra element is the uncovered set
  std::vector<SemiPartition> out;
  for (auto& b : set_partitions(n + 1)) {
    Blocks kept;
    for (auto& blk : b)
      if (std::find(blk.begin(), blk.end(), n) == blk.end()) kept.push_back(std::move(blk));
    out.emplace_back(n, std::move(kept));
  }
  return out;
}

namespace {

Blocks restrict_blocks(const Blocks& blocks, int n) {
  Blocks out;
  for (const auto& b : blocks) {
    std::vector<int> kept;
    for (int e : b)
      if (e < n) kept.push_back(e);
    if (!kept.empty()) out.push_back(std::move(kept));
  }
  return out;
}

}  // namespace

Partition restrict(const Partition& p, int n) {
  if (n > p.n || n < 0) throw std::invalid_argument("restrict: n exceeds ground set");
  return Partition(n, restrict_blocks(p.blocks, n));
}

SemiPartition restrict(const SemiPartition& s, int n) {
  if (n > s.n || n < 0) throw std::invalid_argument("restrict: n exceeds ground set");
  return SemiPartition(n, restrict_blocks(s.blocks, n));
}

Partition sample_uniform_partition_with_sizes(const IntegerMassPartition& sizes, Rng& rng) {
  int N = sizes.N;
  std::vector<int> labels(N);
  std::iota(labels.begin(), labels.end(), 0);
  std::shuffle(labels.begin(), labels.end(), rng);
  Blocks b;
  b.reserve(sizes.counts.size());
  int pos = 0;
  for (int c : sizes.counts) {
    b.emplace_back(labels.begin() + pos, labels.begin() + pos + c);
    pos += c;
  }
  return Partition(N, std::move(b));
}

namespace {

constexpr int kMaxKernelN = 10;
constexpr std::size_t kMaxColors = 12;

// Sum over injective maps from blocks to colors of prod_b weight(color, |b|).
double injective_assignment_sum(const std::vector<int>& sizes, int colors,
                                const std::function<double(int, int)>& weight) {
  int m = static_cast<int>(sizes.size());
  if (m == 0) return 1.0;
  if (m > colors) return 0.0;
  std::size_t full = (std::size_t{1} << m) - 1;
  std::vector<double> f(full + 1, 0.0);
  f[0] = 1.0;
  for (int c = 0; c < colors; ++c) {
    std::vector<double> g = f;
    for (std::size_t mask = 0; mask < full; ++mask) {
      if (f[mask] == 0.0) continue;
      for (int b = 0; b < m; ++b) {
        if (mask & (std::size_t{1} << b)) continue;
        double w = weight(c, sizes[b]);
        if (w != 0.0) g[mask | (std::size_t{1} << b)] += f[mask] * w;
      }
    }
    f = std::move(g);
  }
  return f[full];
}

double falling(double k, int s) {
  double r = 1.0;
  for (int i = 0; i < s; ++i) r *= k - i;
  return r;
}

double choose(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

void check_paintbox(const MassPartition& x, int n) {
  if (n > kMaxKernelN || x.w.size() > kMaxColors)
    throw std::invalid_argument("paintbox kernel: exact enumeration limited to n <= 10 and 12 colors");
}

}  // namespace

double paintbox_partition_prob(const MassPartition& x, const Partition& pi) {
  check_paintbox(x, pi.n);
  std::vector<int> big;
  int singles = 0;
  for (const auto& b : pi.blocks) {
    if (b.size() >= 2)
      big.push_back(static_cast<int>(b.size()));
    else
      ++singles;
  }
  double dust = std::max(0.0, x.dust());
  int colors = static_cast<int>(x.w.size());
  auto weight = [&](int c, int s) { return std::pow(x.w[c], s); };
  double total = 0.0;
  for (int j = 0; j <= singles; ++j) {
    std::vector<int> sizes = big;
    sizes.insert(sizes.end(), j, 1);
    double dust_part = std::pow(dust, singles - j);
    if (dust_part == 0.0) continue;
    total += choose(singles, j) * dust_part * injective_assignment_sum(sizes, colors, weight);
  }
  return total;
}

double paintbox_semipartition_prob(const MassPartition& x, const SemiPartition& sigma) {
  check_paintbox(x, sigma.n);
  std::vector<int> sizes;
  int covered = 0;
  for (const auto& b : sigma.blocks) {
    sizes.push_back(static_cast<int>(b.size()));
    covered += static_cast<int>(b.size());
  }
  double dust = std::max(0.0, x.dust());
  double dust_part = std::pow(dust, sigma.n - covered);
  if (dust_part == 0.0) return 0.0;
  auto weight = [&](int c, int s) { return std::pow(x.w[c], s); };
  return dust_part * injective_assignment_sum(sizes, static_cast<int>(x.w.size()), weight);
}

double urn_partition_prob(const IntegerMassPartition& x, int n, const Partition& pi) {
  if (pi.n != n) throw std::invalid_argument("urn_partition_prob: partition is not on [n]");
  if (n > x.N) throw std::invalid_argument("urn_partition_prob: n exceeds N");
  if (n > kMaxKernelN) throw std::invalid_argument("urn_partition_prob: exact enumeration limited to n <= 10");
  std::vector<int> sizes;
  for (const auto& b : pi.blocks) sizes.push_back(static_cast<int>(b.size()));
  auto weight = [&](int c, int s) { return falling(x.counts[c], s); };
  return injective_assignment_sum(sizes, static_cast<int>(x.counts.size()), weight) / falling(x.N, n);
}

double urn_semipartition_prob(const IntegerMassPartition& x, int n, const SemiPartition& sigma) {
  if (sigma.n != n) throw std::invalid_argument("urn_semipartition_prob: semi-partition is not on [n]");
  if (n > x.N) throw std::invalid_argument("urn_semipartition_prob: n exceeds N");
  if (n > kMaxKernelN) throw std::invalid_argument("urn_semipartition_prob: exact enumeration limited to n <= 10");
  std::vector<int> families;
  int dust_balls = 0;
  for (int c : x.counts) {
    if (c >= 2)
      families.push_back(c);
    else
      dust_balls += c;
  }
  std::vector<int> sizes;
  int covered = 0;
  for (const auto& b : sigma.blocks) {
    sizes.push_back(static_cast<int>(b.size()));
    covered += static_cast<int>(b.size());
  }
  double dust_part = falling(dust_balls, n - covered);
  if (dust_part == 0.0) return 0.0;
  auto weight = [&](int c, int s) { return falling(families[c], s); };
  return dust_part * injective_assignment_sum(sizes, static_cast<int>(families.size()), weight) / falling(x.N, n);
}

namespace {

// color per sample, -1 for dust
std::vector<int> paintbox_colors(const MassPartition& x, int n, Rng& rng) {
  std::vector<int> col(n, -1);
  for (int i = 0; i < n; ++i) {
    double u = uniform01(rng), acc = 0.0;
    for (std::size_t c = 0; c < x.w.size(); ++c) {
      acc += x.w[c];
      if (u < acc) {
        col[i] = static_cast<int>(c);
        break;
      }
    }
  }
  return col;
}

std::vector<int> urn_colors(const IntegerMassPartition& x, int n, Rng& rng) {
  if (n > x.N) throw std::invalid_argument("urn sampler: n exceeds N");
  std::vector<int> left = x.counts;
  int remaining = x.N;
  std::vector<int> col(n);
  for (int i = 0; i < n; ++i) {
    std::uniform_int_distribution<int> u(0, remaining - 1);
    int r = u(rng);
    std::size_t c = 0;
    while (r >= left[c]) r -= left[c++];
    col[i] = static_cast<int>(c);
    --left[c];
    --remaining;
  }
  return col;
}

Blocks group_by_color(const std::vector<int>& col, bool dust_as_singletons) {
  std::map<int, std::vector<int>> by;
  Blocks out;
  for (int i = 0; i < static_cast<int>(col.size()); ++i) {
    if (col[i] < 0) {
      if (dust_as_singletons) out.push_back({i});
    } else {
      by[col[i]].push_back(i);
    }
  }
  for (auto& [c, b] : by) out.push_back(std::move(b));
  return out;
}

}  // namespace

Partition sample_paintbox_partition(const MassPartition& x, int n, Rng& rng) {
  return Partition(n, group_by_color(paintbox_colors(x, n, rng), true));
}

SemiPartition sample_paintbox_semipartition(const MassPartition& x, int n, Rng& rng) {
  return SemiPartition(n, group_by_color(paintbox_colors(x, n, rng), false));
}

Partition sample_urn_partition(const IntegerMassPartition& x, int n, Rng& rng) {
  return Partition(n, group_by_color(urn_colors(x, n, rng), true));
}

SemiPartition sample_urn_semipartition(const IntegerMassPartition& x, int n, Rng& rng) {
  std::vector<int> col = urn_colors(x, n, rng);
  for (int& c : col)
    if (x.counts[c] < 2) c = -1;
  return SemiPartition(n, group_by_color(col, false));
}

DistanceMatrix apply_partition(const Partition& pi, const DistanceMatrix& rho) {
  if (pi.n != rho.n) throw std::invalid_argument("apply_partition: size mismatch");
  std::vector<int> idx = pi.block_index();
  DistanceMatrix out(rho.n);
  for (int i = 0; i < rho.n; ++i)
    for (int j = 0; j < rho.n; ++j) out(i, j) = rho(idx[i], idx[j]);
  return out;
}

MarkedDistanceMatrix apply_semipartition(const SemiPartition& sigma, const MarkedDistanceMatrix& rv) {
  if (sigma.n != rv.n) throw std::invalid_argument("apply_semipartition: size mismatch");
  std::vector<int> idx = sigma.index_map();
  std::vector<bool> cov = sigma.covered();
  MarkedDistanceMatrix out(rv.n);
  for (int i = 0; i < rv.n; ++i) {
    out.v[i] = cov[i] ? 0.0 : rv.v[idx[i]];
    for (int j = 0; j < rv.n; ++j) {
      if (i == j) continue;
      out.r(i, j) = (cov[i] ? rv.v[idx[i]] : 0.0) + rv.r(idx[i], idx[j]) + (cov[j] ? rv.v[idx[j]] : 0.0);
    }
  }
  return out;
}

bool is_single_doubleton(const Partition& pi) {
  int doubletons = 0;
  for (const auto& b : pi.blocks) {
    if (b.size() == 2)
      ++doubletons;
    else if (b.size() != 1)
      return false;
  }
  return doubletons == 1;
}

PartitionRates limit_rates_partitions(const LimitMeasure& xi, int n) {
  if (n > kMaxKernelN) throw std::invalid_argument("limit_rates_partitions: n <= 10");
  PartitionRates out{n, {}};
  for (const Partition& pi : all_partitions(n)) {
    if (pi.block_count() == n) continue;
    double rate = is_single_doubleton(pi) ? xi.kingman : 0.0;
    for (const Atom& a : xi.atoms) rate += a.w * paintbox_partition_prob(a.x, pi) / a.x.l2sq();
    out.rate.emplace(pi, rate);
  }
  return out;
}

SemiPartitionRates limit_rates_semipartitions(const LimitMeasure& xi, int n) {
  if (n > kMaxKernelN) throw std::invalid_argument("limit_rates_semipartitions: n <= 10");
  SemiPartitionRates out{n, {}, xi.kingman > 0.0};
  for (const SemiPartition& s : all_semipartitions(n)) {
    if (s.empty()) continue;
    double rate = 0.0;
    for (const Atom& a : xi.atoms) rate += a.w * paintbox_semipartition_prob(a.x, s) / a.x.l2sq();
    out.rate.emplace(s, rate);
  }
  return out;
}

}  // namespace cfv
