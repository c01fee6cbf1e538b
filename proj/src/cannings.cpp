#include "cfv/cannings.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace cfv {

namespace {

std::vector<int> random_permutation(int n, Rng& rng) {
  std::vector<int> p(n);
  std::iota(p.begin(), p.end(), 0);
  std::shuffle(p.begin(), p.end(), rng);
  return p;
}

// labels[i] = label in the initial state of individual i
TreeState expand_initial(int N, const TreeState& initial, const std::vector<int>* labels) {
  if (initial.n() == 1) {
    TreeState s{DistanceMatrix(N)};
    if (initial.marks) s.marks = std::vector<double>(N, (*initial.marks)[0]);
    return s;
  }
  if (initial.n() != N) throw std::invalid_argument("init: initial state must have 1 or N points");
  if (!labels) return initial;
  TreeState s{relabel(initial.rho, *labels)};
  if (initial.marks) {
    std::vector<double> v(N);
    for (int i = 0; i < N; ++i) v[i] = (*initial.marks)[(*labels)[i]];
    s.marks = std::move(v);
  }
  return s;
}

ChainState make_state(int N, const ReproductionLaw& law, TreeState start, const ChainOptions& opts, Rng rng) {
  ChainState s;
  s.N = N;
  s.law = law;
  s.cN = pairwise_coalescence_probability(law, N);
  s.unit = opts.generation_units ? 1.0 : s.cN;
  s.check_each_step = opts.check_each_step;
  s.rng = std::move(rng);
  if (start.marks) {
    MarkedDistanceMatrix rv = start.as_marked();
    if (auto v = validate(rv)) throw std::invalid_argument("init: invalid marked initial state: " + v->describe());
    s.rho = alpha(rv);
    s.marked = std::move(rv);
  } else {
    if (auto v = validate(start.rho)) throw std::invalid_argument("init: invalid initial state: " + v->describe());
    s.rho = std::move(start.rho);
    if (opts.track_marked) s.marked = beta(s.rho);
  }
  s.last_partition = Partition::singletons(N);
  s.last_parents.resize(N);
  std::iota(s.last_parents.begin(), s.last_parents.end(), 0);
  return s;
}

void check_state(const ChainState& s) {
  if (auto v = validate(s.rho))
    throw InvariantViolation("generation " + std::to_string(s.generation) + ": rho " + v->describe());
  if (s.marked) {
    if (auto v = validate(*s.marked))
      throw InvariantViolation("generation " + std::to_string(s.generation) + ": marked " + v->describe());
    DistanceMatrix a = alpha(*s.marked);
    for (std::size_t k = 0; k < a.d.size(); ++k)
      if (std::abs(a.d[k] - s.rho.d[k]) > kTreeTol)
        throw InvariantViolation("generation " + std::to_string(s.generation) + ": alpha(r,v) != rho");
  }
}

}  // namespace

ChainState init(int N, const ReproductionLaw& law, const TreeState& initial, const ChainOptions& opts,
                std::uint64_t seed) {
  Rng rng = substream(seed, 0);
  std::vector<int> labels = random_permutation(N, rng);
  return make_state(N, law, expand_initial(N, initial, &labels), opts, std::move(rng));
}

ChainState init_labeled(int N, const ReproductionLaw& law, const TreeState& initial, const ChainOptions& opts,
                        std::uint64_t seed) {
  return make_state(N, law, expand_initial(N, initial, nullptr), opts, substream(seed, 0));
}

void apply_generation(ChainState& s, const Partition& pi, const std::vector<int>& block_parent) {
  const int N = s.N;
  if (pi.n != N || static_cast<int>(block_parent.size()) != pi.block_count())
    throw std::invalid_argument("apply_generation: partition does not match the population");
  std::vector<int> block = pi.block_index();
  std::vector<int> parent(N);
  std::vector<char> in_family(N);
  for (int i = 0; i < N; ++i) {
    parent[i] = block_parent[block[i]];
    in_family[i] = pi.blocks[block[i]].size() >= 2;
  }
  const double u = s.unit;
  DistanceMatrix rho(N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) rho.set(i, j, (block[i] == block[j] ? 0.0 : s.rho(parent[i], parent[j])) + 2 * u);
  if (s.marked) {
    const MarkedDistanceMatrix& old = *s.marked;
    MarkedDistanceMatrix rv(N);
    for (int i = 0; i < N; ++i) rv.v[i] = in_family[i] ? u : old.v[parent[i]] + u;
    for (int i = 0; i < N; ++i)
      for (int j = i + 1; j < N; ++j) {
        if (block[i] == block[j]) continue;
        double val = (in_family[i] ? old.v[parent[i]] : 0.0) + old.r(parent[i], parent[j]) +
                     (in_family[j] ? old.v[parent[j]] : 0.0);
        rv.r.set(i, j, val);
      }
    s.marked = std::move(rv);
  }
  s.rho = std::move(rho);
  s.last_partition = pi;
  s.last_parents = std::move(parent);
  ++s.generation;
  if (s.check_each_step) check_state(s);
}

void step(ChainState& s) {
  IntegerMassPartition x = s.law.sample(s.N, s.rng);
  Partition pi = sample_uniform_partition_with_sizes(x, s.rng);
  int b = pi.block_count();
  std::vector<int> pool(s.N);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> block_parent(b);
  for (int k = 0; k < b; ++k) {
    std::uniform_int_distribution<int> pick(k, s.N - 1);
    std::swap(pool[k], pool[pick(s.rng)]);
    block_parent[k] = pool[k];
  }
  apply_generation(s, pi, block_parent);
}

std::int64_t generation_of(double t, double cN) {
  if (t < 0.0) throw std::invalid_argument("generation_of: negative time");
  return static_cast<std::int64_t>(std::floor(t / cN + 1e-9));
}

std::vector<ObserverRow> run(ChainState& s, std::int64_t generations, const std::vector<Observer>& observers) {
  if (generations < 0) throw std::invalid_argument("run: negative generation count");
  std::vector<ObserverRow> rows;
  const std::int64_t start = s.generation;
  auto notify = [&] {
    for (const Observer& o : observers)
      if (std::find(o.at.begin(), o.at.end(), s.generation - start) != o.at.end()) o.fn(s, rows);
  };
  notify();
  for (std::int64_t g = 0; g < generations; ++g) {
    step(s);
    notify();
  }
  return rows;
}

double backward_age_mark(const ReproductionLaw& law, int N, double t, Rng& rng) {
  double cN = pairwise_coalescence_probability(law, N);
  double bN = singleton_escape_probability(law, N);
  std::int64_t cap = generation_of(t, cN);
  if (cap == 0) return 0.0;
  if (bN <= 0.0) return cN * static_cast<double>(cap);
  // generations are iid, so the waiting time for membership in a non-singleton family is geometric
  std::int64_t T = geometric_trials(std::min(bN, 1.0), rng);
  return cN * static_cast<double>(std::min(T, cap));
}

double backward_age_mark_reference(const ReproductionLaw& law, int N, double t, Rng& rng) {
  double cN = pairwise_coalescence_probability(law, N);
  std::int64_t cap = generation_of(t, cN);
  for (std::int64_t g = 1; g <= cap; ++g) {
    IntegerMassPartition x = law.sample(N, rng);
    int colored = 0;
    for (int c : x.counts)
      if (c >= 2) colored += c;
    if (uniform01(rng) * N < colored) return cN * static_cast<double>(g);
  }
  return cN * static_cast<double>(cap);
}

namespace {

// Event law for reproduction laws with at most one non-singleton family.
struct OneFamilyEvents {
  double rate = 0.0;  // probability that a generation is not trivially all-singletons
  std::function<int(Rng&)> family_size;
};

OneFamilyEvents one_family_events(const ReproductionLaw& law, int N) {
  switch (law.family) {
    case LawFamily::moran: return {1.0, [](Rng&) { return 2; }};
    case LawFamily::sparse_paintbox: {
      IntegerMassPartition sizes = law.sparse_sizes(N);
      if (sizes.counts.size() > 1 && sizes.counts[1] >= 2)
        throw std::invalid_argument("backward_external_branch: sparse-paintbox law needs a single family");
      int k = sizes.counts[0];
      return {law.sparse_probability(N), [k](Rng&) { return k; }};
    }
    case LawFamily::example5: {
      double p_ord = 1.0 / N, p_pert = 1.0 / std::sqrt(static_cast<double>(N));
      double q = std::pow(static_cast<double>(N), -1.0 / 3.0);
      return {p_ord + p_pert, [=](Rng& rng) {
                double u = uniform01(rng) * (p_ord + p_pert);
                std::binomial_distribution<int> b(N, u < p_ord ? 0.5 : q);
                return b(rng);
              }};
    }
    case LawFamily::singletons: return {0.0, [](Rng&) { return 1; }};
    case LawFamily::wright_fisher: break;
  }
  throw std::invalid_argument("backward_external_branch: law has several non-singleton families");
}

}  // namespace

double backward_external_branch(const ReproductionLaw& law, int N, double t, Rng& rng) {
  double cN = pairwise_coalescence_probability(law, N);
  std::int64_t cap = generation_of(t, cN);
  OneFamilyEvents ev = one_family_events(law, N);
  if (ev.rate <= 0.0) return cN * static_cast<double>(cap);
  std::int64_t A = N;  // ancestral lineages of the whole population, including lineage 1
  std::int64_t g = 0;
  while (true) {
    g += geometric_trials(std::min(ev.rate, 1.0), rng);
    if (g > cap) return cN * static_cast<double>(cap);
    int K = ev.family_size(rng);
    if (K < 2) continue;
    if (uniform01(rng) * N < K) {
      // lineage 1 sits in the family; it merges if another lineage does too
      if (hypergeometric(N - 1, K - 1, A - 1, rng) >= 1) return cN * static_cast<double>(g);
    } else {
      std::int64_t h = hypergeometric(N - 1, K, A - 1, rng);
      if (h >= 2) A -= h - 1;
    }
  }
}

double forward_external_branch(const ReproductionLaw& law, int N, double t, Rng& rng) {
  ChainState s = init_labeled(N, law, TreeState::point_mass(), {}, 0);
  s.rng = Rng(rng());
  std::int64_t cap = generation_of(t, s.cN);
  for (std::int64_t g = 0; g < cap; ++g) step(s);
  return upsilon(s.rho)[0];
}

RestrictedPartitionLaw restricted_partition_law(const ReproductionLaw& law, int N, int n) {
  auto support = law.enumerate(N);
  if (!support) throw std::invalid_argument("restricted_partition_law: law is not enumerable at this N");
  RestrictedPartitionLaw out;
  out.n = n;
  for (const Partition& pi : all_partitions(n)) {
    if (pi.block_count() == n) continue;
    double p = 0.0;
    for (const auto& [w, x] : *support) p += w * urn_partition_prob(x, n, pi);
    if (p > 0.0) {
      out.partitions.push_back(pi);
      out.probs.push_back(p);
      out.nontrivial += p;
    }
  }
  return out;
}

DistanceMatrix backward_sample_distances(const ReproductionLaw& law, int N, int n, std::int64_t k,
                                         const TreeState& initial, Rng& rng) {
  double cN = pairwise_coalescence_probability(law, N);
  std::map<int, RestrictedPartitionLaw> tables;
  std::vector<std::vector<int>> active(n);
  for (int i = 0; i < n; ++i) active[i] = {i};
  DistanceMatrix d(n);
  std::int64_t g = 0;
  while (active.size() >= 2) {
    int a = static_cast<int>(active.size());
    auto it = tables.find(a);
    if (it == tables.end()) it = tables.emplace(a, restricted_partition_law(law, N, a)).first;
    const RestrictedPartitionLaw& tab = it->second;
    if (tab.nontrivial <= 0.0) break;
    g += geometric_trials(std::min(tab.nontrivial, 1.0), rng);
    if (g > k) break;
    double u = uniform01(rng) * tab.nontrivial, acc = 0.0;
    std::size_t pick = tab.probs.size() - 1;
    for (std::size_t q = 0; q < tab.probs.size(); ++q) {
      acc += tab.probs[q];
      if (u < acc) {
        pick = q;
        break;
      }
    }
    std::vector<std::vector<int>> next;
    for (const auto& blk : tab.partitions[pick].blocks) {
      std::vector<int> merged;
      for (int b : blk) {
        for (int leaf : active[b])
          for (int other : merged) d.set(leaf, other, 2 * cN * static_cast<double>(g));
        merged.insert(merged.end(), active[b].begin(), active[b].end());
      }
      next.push_back(std::move(merged));
    }
    active = std::move(next);
  }
  int a = static_cast<int>(active.size());
  std::vector<int> labels(a, 0);
  if (initial.n() > 1) {
    if (initial.n() < a) throw std::invalid_argument("backward_sample_distances: initial state too small");
    std::vector<int> perm = random_permutation(initial.n(), rng);
    std::copy(perm.begin(), perm.begin() + a, labels.begin());
  }
  for (int x = 0; x < a; ++x)
    for (int y = x + 1; y < a; ++y) {
      double base = 2 * cN * static_cast<double>(k) + initial.rho(labels[x], labels[y]);
      for (int i : active[x])
        for (int j : active[y]) d.set(i, j, base);
    }
  return d;
}

namespace {

struct OneStepDraw {
  std::vector<int> label;   // initial-state label of each parent-generation individual
  std::vector<int> parent;  // parents of the first n children
  std::vector<int> block;   // block index of the first n children
  std::vector<char> in_family;
};

OneStepDraw draw_one_step(const ReproductionLaw& law, int N, int n, const TreeState& initial, Rng& rng) {
  if (n > N) throw std::invalid_argument("one_step_sample: n exceeds N");
  if (initial.n() != 1 && initial.n() != N) throw std::invalid_argument("one_step_sample: initial must have 1 or N points");
  OneStepDraw d;
  if (initial.n() == 1)
    d.label.assign(N, 0);
  else
    d.label = random_permutation(N, rng);
  IntegerMassPartition x = law.sample(N, rng);
  Partition pi = sample_uniform_partition_with_sizes(x, rng);
  std::vector<int> blk = pi.block_index();
  std::vector<int> pool(N);
  std::iota(pool.begin(), pool.end(), 0);
  std::vector<int> block_parent(pi.block_count(), -1);
  int drawn = 0;
  d.parent.resize(n);
  d.block.resize(n);
  d.in_family.resize(n);
  for (int i = 0; i < n; ++i) {
    int b = blk[i];
    if (block_parent[b] < 0) {
      std::uniform_int_distribution<int> pick(drawn, N - 1);
      std::swap(pool[drawn], pool[pick(rng)]);
      block_parent[b] = pool[drawn++];
    }
    d.parent[i] = block_parent[b];
    d.block[i] = b;
    d.in_family[i] = pi.blocks[b].size() >= 2;
  }
  return d;
}

}  // namespace

std::pair<DistanceMatrix, DistanceMatrix> one_step_sample(const ReproductionLaw& law, int N, double cN, int n,
                                                          const TreeState& initial, Rng& rng) {
  if (initial.marked()) throw std::invalid_argument("one_step_sample: plain initial state expected");
  OneStepDraw d = draw_one_step(law, N, n, initial, rng);
  DistanceMatrix before(n), after(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      before.set(i, j, initial.rho(d.label[i], d.label[j]));
      double base = d.block[i] == d.block[j] ? 0.0 : initial.rho(d.label[d.parent[i]], d.label[d.parent[j]]);
      after.set(i, j, base + 2 * cN);
    }
  return {before, after};
}

std::pair<MarkedDistanceMatrix, MarkedDistanceMatrix> one_step_sample_marked(const ReproductionLaw& law, int N,
                                                                             double cN, int n,
                                                                             const TreeState& initial, Rng& rng) {
  MarkedDistanceMatrix init_rv = initial.marked() ? initial.as_marked() : beta(initial.rho);
  OneStepDraw d = draw_one_step(law, N, n, initial, rng);
  MarkedDistanceMatrix before(n), after(n);
  for (int i = 0; i < n; ++i) {
    int li = d.label[i], pi = d.label[d.parent[i]];
    before.v[i] = init_rv.v[li];
    after.v[i] = d.in_family[i] ? cN : init_rv.v[pi] + cN;
    for (int j = i + 1; j < n; ++j) {
      int lj = d.label[j], pj = d.label[d.parent[j]];
      before.r.set(i, j, init_rv.r(li, lj));
      if (d.block[i] == d.block[j]) continue;
      after.r.set(i, j, (d.in_family[i] ? init_rv.v[pi] : 0.0) + init_rv.r(pi, pj) + (d.in_family[j] ? init_rv.v[pj] : 0.0));
    }
  }
  return {before, after};
}

DistanceMatrix closed_form_distances(const DistanceMatrix& rho0, const std::vector<std::vector<int>>& parents,
                                     double unit) {
  int N = rho0.n;
  std::int64_t K = static_cast<std::int64_t>(parents.size());
  DistanceMatrix out(N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      int a = i, b = j;
      double d = -1.0;
      for (std::int64_t g = K - 1; g >= 0; --g) {
        a = parents[g][a];
        b = parents[g][b];
        if (a == b) {
          d = 2 * unit * static_cast<double>(K - g);
          break;
        }
      }
      if (d < 0.0) d = 2 * unit * static_cast<double>(K) + rho0(a, b);
      out.set(i, j, d);
    }
  return out;
}

}  // namespace cfv
