#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "cfv/cannings.hpp"
#include "cfv/harness.hpp"
#include "cfv/limits.hpp"
#include "cfv/metrics.hpp"
#include "cfv/partitions.hpp"
#include "cfv/replicate.hpp"
#include "cfv/stats.hpp"

namespace cfv {

ResultRow& settle(ResultRow& row) {
  row.abs_error = std::abs(row.estimate - row.reference);
  if (row.expected == "info")
    row.pass = true;
  else
    row.pass = row.agree == (row.expected == "agree");
  return row;
}

bool all_pass(const std::vector<ResultRow>& rows) {
  return std::all_of(rows.begin(), rows.end(), [](const ResultRow& r) { return r.pass; });
}

namespace {

double mark_of_state(const TreeState& s, int i) { return s.marks ? (*s.marks)[i] : 0.0; }

double tol(const ExperimentConfig& cfg, int N) { return cfg.tolerance_per_N ? cfg.tolerance / N : cfg.tolerance; }

std::string expect_for(const ExperimentConfig& cfg, const ReproductionLaw& law) {
  if (cfg.expect) return *cfg.expect;
  return law.family == LawFamily::example5 ? "disagree" : "agree";
}

std::uint64_t seed_for(const ExperimentConfig& cfg, std::uint64_t a, std::uint64_t b = 0) {
  return splitmix64(cfg.seed ^ splitmix64(a * 0x9E3779B97F4A7C15ULL + b));
}

ResultRow rejected(const std::string& experiment, int N, const std::string& why) {
  ResultRow r;
  r.experiment = experiment;
  r.N = N;
  r.tag = "rejected: " + why;
  r.agree = false;
  r.expected = "disagree";
  settle(r);
  return r;
}

ResultRow with_ci(ResultRow r, const Estimate& e) {
  r.estimate = e.mean;
  r.ci_low = e.ci_low;
  r.ci_high = e.ci_high;
  return r;
}

// Distribution function with a single jump to 1 at `top`.
struct CappedCdf {
  double rate;
  double top;
  double operator()(double x) const {
    if (x < 0.0) return 0.0;
    if (x >= top) return 1.0;
    return 1.0 - std::exp(-rate * x);
  }
  double left(double x) const {
    if (x <= 0.0) return 0.0;
    if (x > top) return 1.0;
    return 1.0 - std::exp(-rate * x);
  }
};

}  // namespace

std::vector<ResultRow> exp_rate_convergence(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  const std::string name = "rates";
  PartitionRates rates = limit_rates_partitions(cfg.xi, cfg.n);
  SemiPartitionRates srates = limit_rates_semipartitions(cfg.xi, cfg.n);
  std::string expected = expect_for(cfg, cfg.law);
  for (int N : cfg.N) {
    double cN;
    try {
      cN = pairwise_coalescence_probability(cfg.law, N);
    } catch (const std::domain_error& e) {
      rows.push_back(rejected(name, N, e.what()));
      continue;
    }
    auto support = cfg.law.enumerate(N);
    std::vector<IntegerMassPartition> draws;
    if (!support) {
      Rng rng = substream(seed_for(cfg, N), 0);
      for (std::int64_t r = 0; r < cfg.replicates; ++r) draws.push_back(cfg.law.sample(N, rng));
    }
    auto add = [&](const std::string& tag, double ref, auto&& prob) {
      ResultRow r;
      r.experiment = name;
      r.N = N;
      r.tag = tag;
      r.reference = ref;
      r.expected = expected;
      if (support) {
        double p = 0.0;
        for (const auto& [w, x] : *support) p += w * prob(x);
        r.estimate = p / cN;
        r.agree = std::abs(r.estimate - ref) <= tol(cfg, N);
      } else {
        std::vector<double> vals;
        for (const auto& x : draws) vals.push_back(prob(x) / cN);
        Estimate e = mean_estimate(vals, cfg.alpha);
        r = with_ci(r, e);
        r.agree = e.ci_low <= ref && ref <= e.ci_high;
      }
      rows.push_back(settle(r));
    };
    for (const Partition& pi : all_partitions(cfg.n)) {
      if (pi.block_count() == cfg.n) continue;
      auto it = rates.rate.find(pi);
      double ref = it == rates.rate.end() ? 0.0 : it->second;
      add("pi=" + to_string(pi.blocks), ref,
          [&](const IntegerMassPartition& x) { return urn_partition_prob(x, cfg.n, pi); });
    }
    if (!srates.atoms_only)
      for (const SemiPartition& sigma : all_semipartitions(cfg.n)) {
        if (sigma.empty()) continue;
        auto it = srates.rate.find(sigma);
        double ref = it == srates.rate.end() ? 0.0 : it->second;
        add("sigma=" + to_string(sigma.blocks), ref,
            [&](const IntegerMassPartition& x) { return urn_semipartition_prob(x, cfg.n, sigma); });
      }
  }
  return rows;
}

std::vector<ResultRow> exp_generator_convergence(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  const std::string name = "generator";
  TestFunction phi = TestFunction::pair_exp();
  GeneratorValue limit = apply_generator_B(cfg.xi, cfg.initial, phi, 0, seed_for(cfg, 1));
  std::vector<int> Ns = cfg.N;
  std::sort(Ns.begin(), Ns.end());
  for (std::size_t k = 0; k < Ns.size(); ++k) {
    int N = Ns[k];
    ResultRow r;
    r.experiment = name;
    r.N = N;
    r.tag = "phi=exp(-d12-d21)";
    r.reference = limit.value;
    r.expected = k + 1 == Ns.size() ? expect_for(cfg, cfg.law) : "info";
    try {
      Estimate e = one_step_generator_estimate(cfg.law, N, cfg.initial, phi, cfg.replicates, seed_for(cfg, N));
      r = with_ci(r, e);
      r.agree = e.ci_low <= limit.value && limit.value <= e.ci_high;
    } catch (const std::domain_error& e) {
      rows.push_back(rejected(name, N, e.what()));
      continue;
    }
    rows.push_back(settle(r));
  }
  return rows;
}

std::vector<ResultRow> exp_external_branch(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  const std::string name = "external-branch";
  DustIntegral lambda = dust_integral(cfg.xi);
  std::string expected = expect_for(cfg, cfg.law);
  for (int N : cfg.N) {
    double cN, bN;
    try {
      cN = pairwise_coalescence_probability(cfg.law, N);
      bN = singleton_escape_probability(cfg.law, N);
    } catch (const std::domain_error& e) {
      rows.push_back(rejected(name, N, e.what()));
      continue;
    }
    ResultRow ratio;
    ratio.experiment = name;
    ratio.N = N;
    ratio.tag = "bN/cN";
    ratio.estimate = bN / cN;
    ratio.reference = lambda.value;
    ratio.agree = !lambda.atoms_only && std::abs(ratio.estimate - ratio.reference) <= tol(cfg, N);
    ratio.expected = expected;
    rows.push_back(settle(ratio));

    for (double t : cfg.t) {
      double t_eff = cN * static_cast<double>(generation_of(t, cN));
      std::vector<double> pre = replicate(cfg.replicates, seed_for(cfg, N, 1), Exec::parallel,
                                          [&](Rng& rng) { return backward_age_mark(cfg.law, N, t, rng); });
      CappedCdf F{lambda.value, t_eff};
      ResultRow ks;
      ks.experiment = name;
      ks.N = N;
      ks.tag = "ks-exp t=" + std::to_string(t);
      ks.estimate = ks_distance(pre, F, [&](double x) { return F.left(x); }, {t_eff});
      ks.reference = dkw_band(cfg.replicates, cfg.alpha);
      ks.pvalue = ks_pvalue(ks.estimate, static_cast<double>(cfg.replicates));
      ks.agree = ks.estimate < ks.reference;
      ks.expected = expected;
      rows.push_back(settle(ks));

      std::vector<double> lim = replicate(cfg.replicates, seed_for(cfg, N, 2), Exec::parallel, [&](Rng& rng) {
        return sample_coalescent_tree(cfg.xi, 1, t_eff, nullptr, rng).rv.v[0];
      });
      TwoSampleKs two = ks_two_sample(pre, lim);
      ResultRow cs;
      cs.experiment = name;
      cs.N = N;
      cs.tag = "ks-coalescent t=" + std::to_string(t);
      cs.estimate = two.D;
      cs.pvalue = two.p;
      cs.reference = cfg.alpha;
      cs.agree = two.p > cfg.alpha;
      cs.expected = expected;
      rows.push_back(settle(cs));
    }
  }
  return rows;
}

std::vector<ResultRow> exp_counterexample(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  const std::string name = "counterexample";
  double t = cfg.t.front(), eps = cfg.epsilon;
  std::vector<int> Ns = cfg.N;
  std::sort(Ns.begin(), Ns.end());
  std::vector<double> est;
  double checked = -1.0;
  for (int N : Ns) {
    std::vector<double> v = replicate(cfg.replicates, seed_for(cfg, N), Exec::parallel,
                                      [&](Rng& rng) { return backward_external_branch(cfg.law, N, t, rng); });
    std::int64_t hits = std::count_if(v.begin(), v.end(), [&](double x) { return x > eps; });
    Estimate e = proportion_estimate(hits, cfg.replicates, cfg.alpha);
    ResultRow r;
    r.experiment = name;
    r.N = N;
    r.tag = "P(branch>eps) < 4eps";
    r.reference = 4 * eps;
    r = with_ci(r, e);
    r.agree = e.mean < 4 * eps;
    r.expected = N >= cfg.bound_from_N ? "agree" : "info";
    rows.push_back(settle(r));
    est.push_back(e.mean);
    if (checked < 0.0 && N >= cfg.bound_from_N) checked = e.mean;
  }
  if (checked < 0.0) checked = est.back();

  ResultRow trend;
  trend.experiment = name;
  trend.tag = "decreasing in N";
  trend.estimate = est.back() - est.front();
  trend.agree = true;
  for (std::size_t k = 1; k < est.size(); ++k)
    if (!(est[k] < est[k - 1])) trend.agree = false;
  rows.push_back(settle(trend));

  DustIntegral lambda = dust_integral(cfg.xi);
  std::vector<double> lim = replicate(cfg.replicates, seed_for(cfg, 0, 7), Exec::parallel, [&](Rng& rng) {
    return sample_coalescent_tree(cfg.xi, 1, t, nullptr, rng).rv.v[0];
  });
  std::int64_t hits = std::count_if(lim.begin(), lim.end(), [&](double x) { return x > eps; });
  Estimate le = proportion_estimate(hits, cfg.replicates, cfg.alpha);
  ResultRow limit;
  limit.experiment = name;
  limit.tag = "limit P(v>eps)";
  limit = with_ci(limit, le);
  limit.reference = eps < t ? std::exp(-lambda.value * eps) : 0.0;
  limit.agree = std::abs(le.mean - limit.reference) <= dkw_band(cfg.replicates, cfg.alpha);
  rows.push_back(settle(limit));

  ResultRow gap;
  gap.experiment = name;
  gap.tag = "limit minus prelimit > 0.3";
  gap.estimate = le.mean - checked;
  gap.reference = 0.3;
  gap.agree = gap.estimate > 0.3;
  rows.push_back(settle(gap));
  return rows;
}

std::vector<ResultRow> exp_step_bounds(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  const std::string name = "step-bounds";
  std::vector<ReproductionLaw> laws = cfg.laws.empty() ? std::vector<ReproductionLaw>{cfg.law} : cfg.laws;
  std::int64_t runs = static_cast<std::int64_t>(laws.size() * cfg.N.size());
  std::int64_t per_run = (cfg.steps + runs - 1) / runs;
  for (std::size_t li = 0; li < laws.size(); ++li) {
    const ReproductionLaw& law = laws[li];
    for (int N : cfg.N) {
      if (!law.supports(N)) {
        rows.push_back(rejected(name, N, law.name() + " unsupported"));
        continue;
      }
      ChainOptions opts;
      opts.generation_units = true;
      ChainState s = init(N, law, cfg.initial, opts, seed_for(cfg, li, N));
      std::int64_t bad_cert = 0, bad_twice = 0, bad_thrice = 0;
      double worst = 0.0;
      for (std::int64_t k = 0; k < per_run; ++k) {
        DistanceMatrix before = s.rho;
        step(s);
        std::vector<int> parents;
        for (const auto& blk : s.last_partition.blocks) parents.push_back(s.last_parents[blk.front()]);
        StepCertificate sc = step_coupling_certificate(before, s.rho, s.last_partition, parents, s.cN, s.cN);
        TreeState a(beta(before)), b(beta(s.rho));
        CertificateCheck chk = verify_certificate(sc.certificate, a, b, 1e-12);
        double gap = 0.0;
        for (auto [i, j] : sc.certificate.relation) gap = std::max(gap, std::abs(mark_of_state(a, i) - mark_of_state(b, j)));
        if (!(chk.ok && chk.distortion == 0.0 && gap <= 1.0 && sc.L == sc.blocks)) ++bad_cert;
        if (!(sc.certificate.level <= sc.bound + 1e-12 && N - sc.M <= 2 * (N - sc.L))) ++bad_twice;
        if (N - sc.M > 3 * (N - sc.L)) ++bad_thrice;
        worst = std::max(worst, sc.certificate.level / sc.bound);
      }
      std::string base = law.name() + " steps=" + std::to_string(per_run);
      auto push = [&](const std::string& tag, std::int64_t bad) {
        ResultRow r;
        r.experiment = name;
        r.N = N;
        r.tag = base + " " + tag;
        r.estimate = static_cast<double>(bad);
        r.reference = 0.0;
        r.abs_error = r.estimate;
        r.agree = bad == 0;
        rows.push_back(settle(r));
      };
      push("certificate verifies", bad_cert);
      push("N-#M <= 2(N-#L), level <= bound, worst level/bound=" + std::to_string(worst), bad_twice);
      push("N-#M <= 3(N-#L)", bad_thrice);
    }
  }
  return rows;
}

std::vector<ResultRow> exp_marginal_agreement(const ExperimentConfig& cfg) {
  std::vector<ResultRow> rows;
  const std::string name = "marginals";
  std::string expected = expect_for(cfg, cfg.law);
  for (int N : cfg.N) {
    double cN;
    try {
      cN = pairwise_coalescence_probability(cfg.law, N);
    } catch (const std::domain_error& e) {
      rows.push_back(rejected(name, N, e.what()));
      continue;
    }
    for (std::size_t ti = 0; ti < cfg.t.size(); ++ti) {
      double t = cfg.t[ti];
      std::int64_t k = generation_of(t, cN);
      double t_eff = cN * static_cast<double>(k);
      std::string at = " t=" + std::to_string(t);
      auto push_two = [&](const std::string& tag, const std::vector<double>& a, const std::vector<double>& b) {
        TwoSampleKs two = ks_two_sample(a, b);
        ResultRow r;
        r.experiment = name;
        r.N = N;
        r.tag = tag + at;
        r.estimate = two.D;
        r.pvalue = two.p;
        r.reference = cfg.alpha;
        r.agree = two.p > cfg.alpha;
        r.expected = expected;
        rows.push_back(settle(r));
      };
      if (cfg.law.family == LawFamily::example5) {
        auto pre = replicate(cfg.replicates, seed_for(cfg, N, 10 + ti), Exec::parallel,
                             [&](Rng& rng) { return backward_external_branch(cfg.law, N, t, rng); });
        auto lim = replicate(cfg.replicates, seed_for(cfg, N, 20 + ti), Exec::parallel, [&](Rng& rng) {
          return sample_coalescent_tree(cfg.xi, 1, t_eff, nullptr, rng).rv.v[0];
        });
        push_two("mark law", pre, lim);
        continue;
      }
      int n = std::max(2, cfg.n);
      std::vector<DistanceMatrix> pre(static_cast<std::size_t>(cfg.replicates));
      std::vector<DistanceMatrix> lim(static_cast<std::size_t>(cfg.replicates));
#pragma omp parallel for schedule(dynamic, 64)
      for (std::int64_t r = 0; r < cfg.replicates; ++r) {
        Rng a = substream(seed_for(cfg, N, 10 + ti), static_cast<std::uint64_t>(r));
        pre[r] = backward_sample_distances(cfg.law, N, n, k, cfg.initial, a);
        Rng b = substream(seed_for(cfg, N, 20 + ti), static_cast<std::uint64_t>(r));
        lim[r] = sample_coalescent_tree(cfg.xi, n, t_eff, &cfg.initial, b).rho;
      }
      std::vector<double> d_pre, d_lim, h_pre, h_lim;
      for (std::int64_t r = 0; r < cfg.replicates; ++r) {
        d_pre.push_back(pre[r](0, 1));
        d_lim.push_back(lim[r](0, 1));
        h_pre.push_back(*std::max_element(pre[r].d.begin(), pre[r].d.end()));
        h_lim.push_back(*std::max_element(lim[r].d.begin(), lim[r].d.end()));
      }
      bool closed_form = cfg.initial.n() == 1 && cfg.xi.atoms.empty() && cfg.xi.kingman > 0.0;
      if (closed_form) {
        CappedCdf F{cfg.xi.kingman / 2, 2 * t_eff};
        ResultRow r;
        r.experiment = name;
        r.N = N;
        r.tag = "pair distance vs closed form" + at;
        r.estimate = ks_distance(d_pre, F, [&](double x) { return F.left(x); }, {2 * t_eff});
        r.pvalue = ks_pvalue(r.estimate, static_cast<double>(cfg.replicates));
        r.reference = cfg.alpha;
        r.agree = *r.pvalue > cfg.alpha;
        r.expected = expected;
        rows.push_back(settle(r));
      }
      push_two("pair distance vs coalescent", d_pre, d_lim);
      if (n >= 3) push_two("sample height vs coalescent", h_pre, h_lim);
    }
  }
  return rows;
}

std::vector<ResultRow> run_experiment(const ExperimentConfig& cfg) {
  const std::string& e = cfg.experiment;
  if (e == "rates") return exp_rate_convergence(cfg);
  if (e == "generator") return exp_generator_convergence(cfg);
  if (e == "external-branch") return exp_external_branch(cfg);
  if (e == "counterexample") return exp_counterexample(cfg);
  if (e == "step-bounds") return exp_step_bounds(cfg);
  if (e == "marginals") return exp_marginal_agreement(cfg);
  if (e == "selftest") return selftest(cfg);
  throw std::invalid_argument("unknown experiment: " + e);
}

}  // namespace cfv
