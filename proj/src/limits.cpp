#include "cfv/limits.hpp"

#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "cfv/cannings.hpp"
#include "cfv/stats.hpp"

namespace cfv {

Partition coalescent_event_partition(const MassPartition& x, int n, Rng& rng) {
  return sample_paintbox_partition(x, n, rng);
}

CoalescentSample sample_coalescent_tree(const LimitMeasure& xi, int n, double t, const TreeState* initial, Rng& rng) {
  if (t < 0.0) throw std::invalid_argument("sample_coalescent_tree: negative time");
  std::vector<std::vector<int>> blocks(n);
  for (int i = 0; i < n; ++i) blocks[i] = {i};
  std::vector<double> reset(n, -1.0);
  DistanceMatrix rho(n);
  std::vector<double> atom_rate;
  double atoms_total = 0.0;
  for (const Atom& a : xi.atoms) {
    atom_rate.push_back(a.w / a.x.l2sq());
    atoms_total += atom_rate.back();
  }
  CoalescentSample out;
  double s = 0.0;
  auto mark_reset = [&](const std::vector<int>& blk) {
    for (int leaf : blk)
      if (reset[leaf] < 0.0) reset[leaf] = s;
  };
  auto merge_into = [&](std::vector<int>& target, const std::vector<int>& source) {
    for (int i : source)
      for (int j : target) rho.set(i, j, 2 * s);
    target.insert(target.end(), source.begin(), source.end());
  };
  while (true) {
    double b = static_cast<double>(blocks.size());
    double king = xi.kingman * b * (b - 1) / 2;
    double rate = king + atoms_total;
    if (rate <= 0.0) break;
    std::exponential_distribution<double> wait(rate);
    s += wait(rng);
    if (s > t) break;
    ++out.events;
    if (uniform01(rng) * rate < king) {
      std::uniform_int_distribution<int> pick(0, static_cast<int>(blocks.size()) - 1);
      int p = pick(rng), q = pick(rng);
      while (q == p) q = pick(rng);
      mark_reset(blocks[p]);
      mark_reset(blocks[q]);
      merge_into(blocks[p], blocks[q]);
      blocks.erase(blocks.begin() + q);
      continue;
    }
    double u = uniform01(rng) * atoms_total, acc = 0.0;
    std::size_t k = atom_rate.size() - 1;
    for (std::size_t a = 0; a < atom_rate.size(); ++a) {
      acc += atom_rate[a];
      if (u < acc) {
        k = a;
        break;
      }
    }
    const MassPartition& x = xi.atoms[k].x;
    std::map<int, std::vector<std::size_t>> by_color;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi) {
      double w = uniform01(rng), c_acc = 0.0;
      for (std::size_t c = 0; c < x.w.size(); ++c) {
        c_acc += x.w[c];
        if (w < c_acc) {
          by_color[static_cast<int>(c)].push_back(bi);
          break;
        }
      }
    }
    if (by_color.empty()) continue;
    std::vector<bool> absorbed(blocks.size(), false);
    for (auto& [c, members] : by_color) {
      for (std::size_t bi : members) mark_reset(blocks[bi]);
      for (std::size_t m = 1; m < members.size(); ++m) {
        merge_into(blocks[members[0]], blocks[members[m]]);
        absorbed[members[m]] = true;
      }
    }
    std::vector<std::vector<int>> next;
    for (std::size_t bi = 0; bi < blocks.size(); ++bi)
      if (!absorbed[bi]) next.push_back(std::move(blocks[bi]));
    blocks = std::move(next);
  }
  // surviving lineages reach time 0
  std::size_t B = blocks.size();
  std::vector<int> labels(B, 0);
  MarkedDistanceMatrix init_rv;
  bool have_initial = initial && initial->n() > 0;
  if (have_initial) {
    init_rv = initial->marked() ? initial->as_marked() : MarkedDistanceMatrix(initial->rho, std::vector<double>(initial->n(), 0.0));
    std::uniform_int_distribution<int> pick(0, initial->n() - 1);
    for (int& l : labels) l = pick(rng);
  }
  std::vector<double> v(n);
  for (std::size_t x = 0; x < B; ++x)
    for (int leaf : blocks[x]) v[leaf] = reset[leaf] >= 0.0 ? reset[leaf] : t + (have_initial ? init_rv.v[labels[x]] : 0.0);
  for (std::size_t x = 0; x < B; ++x)
    for (std::size_t y = x + 1; y < B; ++y) {
      double base = 0.0;
      if (have_initial)
        base = init_rv.v[labels[x]] + init_rv.r(labels[x], labels[y]) + init_rv.v[labels[y]];
      for (int i : blocks[x])
        for (int j : blocks[y]) rho.set(i, j, 2 * t + base);
    }
  out.rv = MarkedDistanceMatrix(n);
  out.rv.v = v;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) out.rv.r.set(i, j, std::max(0.0, rho(i, j) - v[i] - v[j]));
  out.rho = std::move(rho);
  return out;
}

TestFunction TestFunction::constant_fn(int n, double c) {
  TestFunction f;
  f.n = n;
  f.constant = c;
  return f;
}

TestFunction TestFunction::exp_term(int n, std::vector<double> a, std::vector<double> b, double coef) {
  if (static_cast<int>(a.size()) != n * n || static_cast<int>(b.size()) != n)
    throw std::invalid_argument("TestFunction: coefficient sizes");
  for (double x : a)
    if (x < 0.0) throw std::invalid_argument("TestFunction: coefficients must be non-negative");
  for (double x : b)
    if (x < 0.0) throw std::invalid_argument("TestFunction: coefficients must be non-negative");
  TestFunction f;
  f.n = n;
  f.terms.push_back({coef, std::move(a), std::move(b)});
  return f;
}

TestFunction TestFunction::pair_exp(double a) {
  return exp_term(2, {0.0, a, a, 0.0}, {0.0, 0.0});
}

TestFunction TestFunction::mark_exp(int n, double b) {
  std::vector<double> bv(n, 0.0);
  bv[0] = b;
  return exp_term(n, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0), bv);
}

namespace {

double term_value(const ExpTerm& t, int n, const DistanceMatrix& d, const std::vector<double>* v) {
  double e = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) e += t.a[static_cast<std::size_t>(i) * n + j] * d(i, j);
  if (v)
    for (int i = 0; i < n; ++i) e += t.b[i] * (*v)[i];
  return t.coef * std::exp(-e);
}

void check_arity(const TestFunction& f, const DistanceMatrix& d) {
  if (d.n != f.n) throw std::invalid_argument("TestFunction: matrix size does not match arity");
}

}  // namespace

double TestFunction::operator()(const DistanceMatrix& d, const std::vector<double>* v) const {
  check_arity(*this, d);
  double s = constant;
  for (const ExpTerm& t : terms) s += term_value(t, n, d, v);
  return s;
}

double TestFunction::d_dist(const DistanceMatrix& d, const std::vector<double>* v, int i, int j) const {
  double s = 0.0;
  for (const ExpTerm& t : terms) s -= t.a[static_cast<std::size_t>(i) * n + j] * term_value(t, n, d, v);
  return s;
}

double TestFunction::d_mark(const DistanceMatrix& d, const std::vector<double>* v, int i) const {
  double s = 0.0;
  for (const ExpTerm& t : terms) s -= t.b[i] * term_value(t, n, d, v);
  return s;
}

double TestFunction::grow(const DistanceMatrix& d, const std::vector<double>* v) const {
  check_arity(*this, d);
  double s = 0.0;
  for (const ExpTerm& t : terms) {
    double asum = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j) asum += t.a[static_cast<std::size_t>(i) * n + j];
    s -= 2 * asum * term_value(t, n, d, v);
  }
  return s;
}

double TestFunction::mark_grow(const DistanceMatrix& d, const std::vector<double>& v) const {
  check_arity(*this, d);
  double s = 0.0;
  for (const ExpTerm& t : terms) {
    double bsum = std::accumulate(t.b.begin(), t.b.end(), 0.0);
    s -= bsum * term_value(t, n, d, &v);
  }
  return s;
}

TestFunction TestFunction::scaled(double s) const {
  TestFunction f = *this;
  f.constant *= s;
  for (ExpTerm& t : f.terms) t.coef *= s;
  return f;
}

TestFunction TestFunction::plus(const TestFunction& other) const {
  if (other.n != n) throw std::invalid_argument("TestFunction: arity mismatch");
  TestFunction f = *this;
  f.constant += other.constant;
  f.terms.insert(f.terms.end(), other.terms.begin(), other.terms.end());
  return f;
}

std::vector<WeightedMatrix> enumerate_with_replacement(const TreeState& chi, int n) {
  int m = chi.n();
  std::int64_t total = 1;
  for (int i = 0; i < n; ++i) total *= m;
  double w = 1.0 / static_cast<double>(total);
  std::vector<WeightedMatrix> out;
  out.reserve(static_cast<std::size_t>(total));
  std::vector<int> labels(n, 0);
  for (std::int64_t code = 0; code < total; ++code) {
    std::int64_t c = code;
    for (int i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(c % m);
      c /= m;
    }
    WeightedMatrix wm{w, relabel(chi.rho, labels), std::nullopt};
    if (chi.marks) {
      std::vector<double> v(n);
      for (int i = 0; i < n; ++i) v[i] = (*chi.marks)[labels[i]];
      wm.v = std::move(v);
    }
    out.push_back(std::move(wm));
  }
  return out;
}

namespace {

constexpr int kExactStatePoints = 8;
constexpr int kExactArity = 4;

double b_integrand(const PartitionRates& rates, const TestFunction& phi, const DistanceMatrix& rho) {
  DistanceMatrix d = rho.n == phi.n ? rho : restrict(rho, phi.n);
  double base = phi(d);
  double val = phi.grow(d);
  for (const auto& [pi, lambda] : rates.rate)
    if (lambda != 0.0) val += lambda * (phi(apply_partition(pi, d)) - base);
  return val;
}

double bhat_integrand(const SemiPartitionRates& rates, const TestFunction& phi, const MarkedDistanceMatrix& rv) {
  MarkedDistanceMatrix x = rv.n == phi.n ? rv : restrict(rv, phi.n);
  double base = phi(x.r, &x.v);
  double val = phi.mark_grow(x.r, x.v);
  for (const auto& [sigma, lambda] : rates.rate)
    if (lambda != 0.0) {
      MarkedDistanceMatrix y = apply_semipartition(sigma, x);
      val += lambda * (phi(y.r, &y.v) - base);
    }
  return val;
}

template <class F>
GeneratorValue integrate(const TreeState& chi, int n, int mc_samples, std::uint64_t seed, F&& integrand) {
  GeneratorValue g;
  if (chi.n() <= kExactStatePoints && n <= kExactArity && mc_samples <= 0) {
    for (const WeightedMatrix& wm : enumerate_with_replacement(chi, n)) g.value += wm.w * integrand(wm);
    return g;
  }
  int reps = mc_samples > 0 ? mc_samples : 10000;
  std::vector<double> vals(reps);
#pragma omp parallel for schedule(static)
  for (int r = 0; r < reps; ++r) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(r));
    SampledMatrix s = sample_distance_matrix(chi, n, true, rng);
    vals[r] = integrand(WeightedMatrix{1.0, std::move(s.d), std::move(s.v)});
  }
  Estimate e = mean_estimate(vals, 0.01);
  g.value = e.mean;
  g.se = e.se;
  g.exact = false;
  return g;
}

}  // namespace

GeneratorValue apply_generator_B(const LimitMeasure& xi, const TreeState& chi, const TestFunction& phi, int mc_samples,
                                 std::uint64_t seed) {
  PartitionRates rates = limit_rates_partitions(xi, phi.n);
  GeneratorValue g = integrate(chi, phi.n, mc_samples, seed,
                               [&](const WeightedMatrix& wm) { return b_integrand(rates, phi, wm.d); });
  g.dust_mismatch = classify_dust(xi) == DustClass::dust;
  return g;
}

GeneratorValue apply_generator_Bhat(const LimitMeasure& xi, const TreeState& chi, const TestFunction& phi,
                                    int mc_samples, std::uint64_t seed) {
  if (!chi.marked()) throw std::invalid_argument("apply_generator_Bhat: marked state expected");
  SemiPartitionRates rates = limit_rates_semipartitions(xi, phi.n);
  GeneratorValue g = integrate(chi, phi.n, mc_samples, seed, [&](const WeightedMatrix& wm) {
    return bhat_integrand(rates, phi, MarkedDistanceMatrix(wm.d, *wm.v));
  });
  g.dust_mismatch = xi.kingman > 0.0;
  return g;
}

GeneratorValue apply_generator_C(const LimitMeasure& xi, const std::vector<WeightedMatrix>& xi_state,
                                 const TestFunction& phi) {
  PartitionRates rates = limit_rates_partitions(xi, phi.n);
  GeneratorValue g;
  double total = 0.0;
  for (const WeightedMatrix& wm : xi_state) {
    g.value += wm.w * b_integrand(rates, phi, wm.d);
    total += wm.w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("apply_generator_C: weights must sum to 1");
  g.dust_mismatch = classify_dust(xi) == DustClass::dust;
  return g;
}

Estimate one_step_generator_estimate(const ReproductionLaw& law, int N, const TreeState& chi0, const TestFunction& phi,
                                     std::int64_t replicates, std::uint64_t seed, Exec exec, bool marked) {
  if (N < phi.n) throw std::invalid_argument("one_step_generator_estimate: N below test-function arity");
  if (replicates < 1) throw std::invalid_argument("one_step_generator_estimate: replicates must be positive");
  double cN = pairwise_coalescence_probability(law, N);
  std::vector<double> vals(static_cast<std::size_t>(replicates));
  bool par = exec == Exec::parallel;
#pragma omp parallel for schedule(static) if (par)
  for (std::int64_t r = 0; r < replicates; ++r) {
    Rng rng = substream(seed, static_cast<std::uint64_t>(r));
    if (marked) {
      auto [before, after] = one_step_sample_marked(law, N, cN, phi.n, chi0, rng);
      vals[r] = (phi(after.r, &after.v) - phi(before.r, &before.v)) / cN;
    } else {
      auto [before, after] = one_step_sample(law, N, cN, phi.n, chi0, rng);
      vals[r] = (phi(after) - phi(before)) / cN;
    }
  }
  return mean_estimate(vals, 0.01);
}

}  // namespace cfv
