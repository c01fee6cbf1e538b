// Runs every acceptance criterion and prints one PASS/FAIL line per criterion.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cfv/cannings.hpp"
#include "cfv/harness.hpp"
#include "cfv/limits.hpp"
#include "oracles.hpp"

using namespace cfv;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// all rows must pass; failing rows are listed
Outcome rows_outcome(const std::vector<ResultRow>& rows, const std::function<bool(const ResultRow&)>& keep = nullptr) {
  Outcome o;
  int used = 0;
  std::ostringstream os;
  for (const ResultRow& r : rows) {
    if (keep && !keep(r)) continue;
    ++used;
    if (!r.pass) {
      o.pass = false;
      char buf[64];
      std::snprintf(buf, sizeof buf, " est=%.6g ref=%.6g", r.estimate, r.reference);
      os << "\n    failed: " << r.experiment << " N=" << r.N << " " << r.tag << buf;
    }
  }
  if (used == 0) {
    o.pass = false;
    os << "\n    no rows";
  }
  o.detail = std::to_string(used) + " rows" + os.str();
  return o;
}

Outcome merge(Outcome a, const Outcome& b) {
  a.pass = a.pass && b.pass;
  a.detail += "; " + b.detail;
  return a;
}

Outcome check(bool ok, const std::string& what) { return {ok, what + (ok ? " ok" : " FAILED")}; }

bool has(const std::string& s, const std::string& part) { return s.find(part) != std::string::npos; }

Outcome criterion_rates() {
  // moran pair rate against an enumerated urn and the closed form 2 / (N (N-1))
  double worst = 0.0;
  for (int N = 4; N <= 512; ++N) {
    std::vector<int> counts(N - 1, 1);
    counts[0] = 2;
    IntegerMassPartition x(N, counts);
    double cN = 2.0 / (static_cast<double>(N) * (N - 1));
    double lib = urn_partition_prob(x, 2, Partition(2, {{0, 1}})) / pairwise_coalescence_probability(ReproductionLaw::moran(), N);
    worst = std::max(worst, std::abs(lib - 1.0));
    if (N <= 64) {
      double enumerated = oracle::urn_by_enumeration(x, 2).partition[Partition(2, {{0, 1}})];
      worst = std::max(worst, std::abs(enumerated / cN - 1.0));
    }
  }
  Outcome o = check(worst <= 1e-12, "moran rate exact");
  o = merge(o, rows_outcome(selftest(default_config("selftest")), [](const ResultRow& r) { return has(r.tag, "moran rate"); }));
  o = merge(o, rows_outcome(run_experiment(default_config("rates")), [](const ResultRow& r) { return r.tag == "pi=[[1,2],[3]]"; }));
  return o;
}

Outcome criterion_dust_rates() {
  ExperimentConfig c = default_config("rates");
  c.n = 1;
  return rows_outcome(run_experiment(c), [](const ResultRow& r) { return r.tag == "sigma=[[1]]"; });
}

Outcome criterion_experiment(const std::string& name) { return rows_outcome(run_experiment(default_config(name))); }

Outcome criterion_structure() {
  Outcome o;
  // alpha o beta exact on dyadic trees and on generation-unit chain states
  std::mt19937_64 g(11);
  bool exact = true;
  for (int trial = 0; trial < 2000; ++trial) {
    DistanceMatrix rho = oracle::random_ultrametric(2 + trial % 15, g, true);
    exact = exact && alpha(beta(rho)) == rho;
  }

  std::int64_t steps = 0, invalid = 0, mark_excess = 0, coupling = 0;
  std::uint64_t seed = 100;
  for (const ReproductionLaw& law : {ReproductionLaw::moran(), ReproductionLaw::wright_fisher(),
                                      ReproductionLaw::sparse_paintbox(MassPartition({0.5})), ReproductionLaw::example5()})
    for (int N : {8, 24}) {
      ChainOptions opts;
      opts.track_marked = true;
      opts.generation_units = true;
      ChainState s = init(N, law, TreeState(oracle::random_ultrametric(N, g, true)), opts, ++seed);
      for (int k = 0; k < 10000; ++k) {
        step(s);
        ++steps;
        if (validate(s.rho, 1e-9) || validate(*s.marked, 1e-9)) ++invalid;
        DistanceMatrix a = alpha(*s.marked);
        std::vector<double> ups = upsilon(a);
        for (int i = 0; i < N; ++i)
          if (s.marked->v[i] > ups[i] + 1e-9) ++mark_excess;
        for (std::size_t q = 0; q < a.d.size(); ++q)
          if (std::abs(a.d[q] - s.rho.d[q]) > 1e-9) {
            ++coupling;
            break;
          }
        if (k % 97 == 0) exact = exact && alpha(beta(s.rho)) == s.rho;
      }
    }
  o = check(exact, "alpha(beta) exact");
  o = merge(o, check(invalid == 0, "membership after " + std::to_string(steps) + " steps"));
  o = merge(o, check(mark_excess == 0, "v <= upsilon(alpha)"));
  o = merge(o, check(coupling == 0, "alpha(r,v) = rho"));
  return o;
}

Outcome criterion_oracles() {
  double worst = 0.0;
  for (const IntegerMassPartition& x : {IntegerMassPartition(6, {3, 2, 1}), IntegerMassPartition(6, {2, 2, 1, 1}),
                                        IntegerMassPartition(7, {4, 3}), IntegerMassPartition(6, {1, 1, 1, 1, 1, 1})})
    for (int n = 1; n <= 6; ++n) {
      oracle::KernelTable t = oracle::urn_by_enumeration(x, n);
      for (const Partition& pi : all_partitions(n)) worst = std::max(worst, std::abs(urn_partition_prob(x, n, pi) - t.partition[pi]));
      for (const SemiPartition& s : all_semipartitions(n))
        worst = std::max(worst, std::abs(urn_semipartition_prob(x, n, s) - t.semi[s]));
    }
  for (const MassPartition& x : {MassPartition({0.5}), MassPartition({0.5, 0.25}), MassPartition({0.4, 0.3, 0.3})})
    for (int n = 1; n <= 6; ++n) {
      oracle::KernelTable t = oracle::paintbox_by_enumeration(x, n);
      for (const Partition& pi : all_partitions(n))
        worst = std::max(worst, std::abs(paintbox_partition_prob(x, pi) - t.partition[pi]));
      for (const SemiPartition& s : all_semipartitions(n))
        worst = std::max(worst, std::abs(paintbox_semipartition_prob(x, s) - t.semi[s]));
    }
  Outcome o = check(worst <= 1e-12, "urn/paintbox kernels");

  std::mt19937_64 g(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto measure = [&](int k) {
    std::vector<Point> pts;
    std::vector<double> w;
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      pts.push_back({std::round(4 * u(g)) / 4, u(g)});
      w.push_back(0.05 + u(g));
      total += w.back();
    }
    for (double& x : w) x /= total;
    return EmpiricalMeasure(pts, w);
  };
  double pw = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    EmpiricalMeasure mu = measure(1 + trial % 8), nu = measure(1 + (trial / 8) % 8);
    pw = std::max(pw, std::abs(prohorov(mu, nu).value - oracle::prohorov_brute(mu, nu)));
  }
  o = merge(o, check(pw <= 1e-9, "prohorov vs brute force"));

  // ordered pairs with and without replacement from 5 points
  bool bound = true;
  for (int trial = 0; trial < 200; ++trial) {
    DistanceMatrix d = oracle::random_ultrametric(5, g);
    double a = 0.5 + u(g);
    TestFunction phi = TestFunction::pair_exp(a);
    auto f = [&](double dist) {
      DistanceMatrix m(2);
      m.set(0, 1, dist);
      return phi(m);
    };
    double with = 0.0, without = 0.0, lib = 0.0;
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) {
        with += f(d(i, j)) / 25.0;
        if (i != j) without += f(d(i, j)) / 20.0;
      }
    for (const WeightedMatrix& wm : enumerate_with_replacement(TreeState(d), 2)) lib += wm.w * phi(wm.d);
    bound = bound && std::abs(lib - with) <= 1e-12 && std::abs(with - without) <= 2.0 * 1.0 * 4 / 5;
  }
  o = merge(o, check(bound, "with/without replacement bound"));
  return merge(o, rows_outcome(selftest(default_config("selftest")), [](const ResultRow& r) {
                 return has(r.tag, "kernels") || has(r.tag, "prohorov") || has(r.tag, "replacement");
               }));
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  std::vector<Criterion> all = {
      {"rate convergence", criterion_rates},
      {"dust rates", criterion_dust_rates},
      {"generator convergence", [] { return criterion_experiment("generator"); }},
      {"external-branch limit", [] { return criterion_experiment("external-branch"); }},
      {"counterexample", [] { return criterion_experiment("counterexample"); }},
      {"step-coupling certificates", [] { return criterion_experiment("step-bounds"); }},
      {"structural invariants", criterion_structure},
      {"oracle equivalences", criterion_oracles},
      {"marginal agreement", [] { return criterion_experiment("marginals"); }},
  };
  int failed = 0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o = all[k].run();
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) ++failed;
    std::printf("criterion %zu %-28s %s (%.1fs) %s\n", k + 1, all[k].name, o.pass ? "PASS" : "FAIL", secs, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
