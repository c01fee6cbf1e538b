#include "cfv/measures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <stdexcept>

namespace cfv {

MassPartition::MassPartition(std::vector<double> weights) : w(std::move(weights)) {
  for (double v : w)
    if (!(v >= 0.0) || v > 1.0) throw std::invalid_argument("MassPartition: weights must lie in [0,1]");
  std::sort(w.begin(), w.end(), std::greater<>());
  while (!w.empty() && w.back() == 0.0) w.pop_back();
  if (l1() > 1.0 + 1e-12) throw std::invalid_argument("MassPartition: |x|_1 > 1");
}

double MassPartition::l1() const { return std::accumulate(w.begin(), w.end(), 0.0); }

double MassPartition::l2sq() const {
  double s = 0.0;
  for (double v : w) s += v * v;
  return s;
}

IntegerMassPartition::IntegerMassPartition(int population_size, std::vector<int> family_sizes)
    : N(population_size), counts(std::move(family_sizes)) {
  if (N < 1) throw std::invalid_argument("IntegerMassPartition: N must be positive");
  std::sort(counts.begin(), counts.end(), std::greater<>());
  while (!counts.empty() && counts.back() == 0) counts.pop_back();
  if (!counts.empty() && counts.back() < 0) throw std::invalid_argument("IntegerMassPartition: negative count");
  if (std::accumulate(counts.begin(), counts.end(), 0) != N)
    throw std::invalid_argument("IntegerMassPartition: counts must sum to N");
}

IntegerMassPartition IntegerMassPartition::singletons(int N) {
  return IntegerMassPartition(N, std::vector<int>(N, 1));
}

MassPartition IntegerMassPartition::frequencies() const {
  std::vector<double> w;
  w.reserve(counts.size());
  for (int c : counts) w.push_back(static_cast<double>(c) / N);
  return MassPartition(std::move(w));
}

LimitMeasure::LimitMeasure(double kingman_weight, std::vector<Atom> atom_list)
    : kingman(kingman_weight), atoms(std::move(atom_list)) {
  if (kingman < 0.0) throw std::invalid_argument("LimitMeasure: negative Kingman weight");
  double total = kingman;
  for (const Atom& a : atoms) {
    if (!(a.w > 0.0)) throw std::invalid_argument("LimitMeasure: atom weights must be positive");
    if (a.x.w.empty()) throw std::invalid_argument("LimitMeasure: atom needs x(1) > 0");
    total += a.w;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("LimitMeasure: total mass must be 1");
}

LimitMeasure LimitMeasure::kingman_only() { return LimitMeasure(1.0, {}); }

LimitMeasure LimitMeasure::point(const MassPartition& x) { return LimitMeasure(0.0, {Atom{1.0, x}}); }

// For finite-atomic measures the dust integral is always finite, so only the
// Kingman atom can make the measure dust-free.
DustClass classify_dust(const LimitMeasure& xi) {
  return xi.kingman > 0.0 ? DustClass::dust_free : DustClass::dust;
}

DustIntegral dust_integral(const LimitMeasure& xi) {
  double s = 0.0;
  for (const Atom& a : xi.atoms) s += a.w * a.x.l1() / a.x.l2sq();
  return {s, xi.kingman > 0.0};
}

ReproductionLaw ReproductionLaw::moran() { return {}; }

ReproductionLaw ReproductionLaw::wright_fisher() {
  ReproductionLaw l;
  l.family = LawFamily::wright_fisher;
  return l;
}

ReproductionLaw ReproductionLaw::sparse_paintbox(const MassPartition& x, double p_scale, double p_exponent) {
  if (x.w.empty()) throw std::invalid_argument("sparse_paintbox: x must be non-zero");
  ReproductionLaw l;
  l.family = LawFamily::sparse_paintbox;
  l.x = x;
  l.p_scale = p_scale;
  l.p_exponent = p_exponent;
  return l;
}

ReproductionLaw ReproductionLaw::example5() {
  ReproductionLaw l;
  l.family = LawFamily::example5;
  return l;
}

ReproductionLaw ReproductionLaw::singletons() {
  ReproductionLaw l;
  l.family = LawFamily::singletons;
  return l;
}

std::string ReproductionLaw::name() const {
  switch (family) {
    case LawFamily::moran: return "moran";
    case LawFamily::wright_fisher: return "wright-fisher";
    case LawFamily::sparse_paintbox: return "sparse-paintbox";
    case LawFamily::example5: return "example5";
    case LawFamily::singletons: return "singletons";
  }
  return "unknown";
}

bool ReproductionLaw::supports(int N) const {
  switch (family) {
    case LawFamily::moran: return N >= 2;
    case LawFamily::wright_fisher: return N >= 1;
    case LawFamily::sparse_paintbox: return N >= 1;
    case LawFamily::example5: return N >= 3;  // N^-1 + N^-1/2 <= 1
    case LawFamily::singletons: return N >= 1;
  }
  return false;
}

double ReproductionLaw::sparse_probability(int N) const {
  return std::min(1.0, p_scale * std::pow(static_cast<double>(N), -p_exponent));
}

IntegerMassPartition ReproductionLaw::sparse_sizes(int N) const {
  std::vector<int> counts;
  int used = 0;
  for (double v : x.w) {
    int c = static_cast<int>(std::floor(N * v + 1e-9));
    if (c <= 0) break;
    counts.push_back(c);
    used += c;
  }
  counts.insert(counts.end(), N - used, 1);
  return IntegerMassPartition(N, std::move(counts));
}

namespace {

void require_supported(const ReproductionLaw& law, int N) {
  if (!law.supports(N)) throw std::domain_error(law.name() + ": unsupported population size " + std::to_string(N));
}

IntegerMassPartition one_large_family(int N, int k) {
  if (k <= 1) return IntegerMassPartition::singletons(N);
  std::vector<int> counts{k};
  counts.insert(counts.end(), N - k, 1);
  return IntegerMassPartition(N, std::move(counts));
}

double binomial_pmf(int n, int k, double p) {
  if (p <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (p >= 1.0) return k == n ? 1.0 : 0.0;
  double lg = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
  return std::exp(lg + k * std::log(p) + (n - k) * std::log1p(-p));
}

void integer_partitions(int remaining, int max_part, std::vector<int>& cur, std::vector<std::vector<int>>& out) {
  if (remaining == 0) {
    out.push_back(cur);
    return;
  }
  for (int p = std::min(remaining, max_part); p >= 1; --p) {
    cur.push_back(p);
    integer_partitions(remaining - p, p, cur, out);
    cur.pop_back();
  }
}

LawSupport wright_fisher_support(int N) {
  std::vector<std::vector<int>> parts;
  std::vector<int> cur;
  integer_partitions(N, N, cur, parts);
  LawSupport out;
  double log_nfact = std::lgamma(N + 1.0);
  for (auto& p : parts) {
    // offspring vectors with this multiset of non-zero counts, among N^N equally likely
    double lg = 2 * log_nfact - std::lgamma(N - static_cast<double>(p.size()) + 1.0);
    for (int c : p) lg -= std::lgamma(c + 1.0);
    for (std::size_t i = 0; i < p.size();) {
      std::size_t j = i;
      while (j < p.size() && p[j] == p[i]) ++j;
      lg -= std::lgamma(static_cast<double>(j - i) + 1.0);
      i = j;
    }
    lg -= N * std::log(static_cast<double>(N));
    out.emplace_back(std::exp(lg), IntegerMassPartition(N, p));
  }
  return out;
}

}  // namespace

IntegerMassPartition ReproductionLaw::sample(int N, Rng& rng) const {
  require_supported(*this, N);
  switch (family) {
    case LawFamily::moran: return one_large_family(N, 2);
    case LawFamily::wright_fisher: {
      std::vector<int> counts(N, 0);
      std::uniform_int_distribution<int> parent(0, N - 1);
      for (int i = 0; i < N; ++i) ++counts[parent(rng)];
      return IntegerMassPartition(N, std::move(counts));
    }
    case LawFamily::sparse_paintbox:
      return uniform01(rng) < sparse_probability(N) ? sparse_sizes(N) : IntegerMassPartition::singletons(N);
    case LawFamily::example5: {
      double u = uniform01(rng);
      double p_ord = 1.0 / N, p_pert = 1.0 / std::sqrt(static_cast<double>(N));
      if (u < p_ord) {
        std::binomial_distribution<int> b(N, 0.5);
        return one_large_family(N, b(rng));
      }
      if (u < p_ord + p_pert) {
        std::binomial_distribution<int> b(N, std::pow(static_cast<double>(N), -1.0 / 3.0));
        return one_large_family(N, b(rng));
      }
      return IntegerMassPartition::singletons(N);
    }
    case LawFamily::singletons: return IntegerMassPartition::singletons(N);
  }
  throw std::logic_error("unknown law family");
}

std::optional<LawSupport> ReproductionLaw::enumerate(int N) const {
  require_supported(*this, N);
  switch (family) {
    case LawFamily::moran: return LawSupport{{1.0, one_large_family(N, 2)}};
    case LawFamily::wright_fisher:
      if (N > 12) return std::nullopt;
      return wright_fisher_support(N);
    case LawFamily::sparse_paintbox: {
      double p = sparse_probability(N);
      LawSupport s{{p, sparse_sizes(N)}};
      if (p < 1.0) s.emplace_back(1.0 - p, IntegerMassPartition::singletons(N));
      return s;
    }
    case LawFamily::example5: {
      double p_ord = 1.0 / N, p_pert = 1.0 / std::sqrt(static_cast<double>(N));
      double q = std::pow(static_cast<double>(N), -1.0 / 3.0);
      LawSupport s;
      double collapsed = 1.0 - p_ord - p_pert;
      for (int k = 0; k <= N; ++k) {
        double pk = p_ord * binomial_pmf(N, k, 0.5) + p_pert * binomial_pmf(N, k, q);
        if (k <= 1)
          collapsed += pk;
        else if (pk > 0.0)
          s.emplace_back(pk, one_large_family(N, k));
      }
      s.emplace_back(collapsed, IntegerMassPartition::singletons(N));
      return s;
    }
    case LawFamily::singletons: return LawSupport{{1.0, IntegerMassPartition::singletons(N)}};
  }
  return std::nullopt;
}

double coalescence_from_support(const LawSupport& support, int N) {
  double s = 0.0;
  for (const auto& [p, imp] : support) {
    double inner = 0.0;
    for (int c : imp.counts) inner += static_cast<double>(c) * (c - 1);
    s += p * inner / (static_cast<double>(N) * (N - 1));
  }
  return s;
}

double escape_from_support(const LawSupport& support, int N) {
  double s = 0.0;
  for (const auto& [p, imp] : support) {
    int inner = 0;
    for (int c : imp.counts)
      if (c >= 2) inner += c;
    s += p * inner / static_cast<double>(N);
  }
  return s;
}

std::optional<double> closed_form_coalescence(const ReproductionLaw& law, int N) {
  require_supported(law, N);
  double n = N;
  switch (law.family) {
    case LawFamily::moran: return 2.0 / (n * (n - 1));
    case LawFamily::wright_fisher: return 1.0 / n;
    case LawFamily::sparse_paintbox: {
      double inner = 0.0;
      for (int c : law.sparse_sizes(N).counts) inner += static_cast<double>(c) * (c - 1);
      return law.sparse_probability(N) * inner / (n * (n - 1));
    }
    case LawFamily::example5: return 0.25 / n + std::pow(n, -7.0 / 6.0);
    case LawFamily::singletons: return 0.0;
  }
  return std::nullopt;
}

std::optional<double> closed_form_escape(const ReproductionLaw& law, int N) {
  require_supported(law, N);
  double n = N;
  switch (law.family) {
    case LawFamily::moran: return 2.0 / n;
    case LawFamily::wright_fisher: return 1.0 - std::pow(1.0 - 1.0 / n, n - 1);
    case LawFamily::sparse_paintbox: {
      int inner = 0;
      for (int c : law.sparse_sizes(N).counts)
        if (c >= 2) inner += c;
      return law.sparse_probability(N) * inner / n;
    }
    case LawFamily::example5: {
      double q = std::pow(n, -1.0 / 3.0);
      return (0.5 / n) * (1.0 - std::pow(0.5, n - 1)) + std::pow(n, -0.5) * q * (1.0 - std::pow(1.0 - q, n - 1));
    }
    case LawFamily::singletons: return 0.0;
  }
  return std::nullopt;
}

double pairwise_coalescence_probability(const ReproductionLaw& law, int N) {
  require_supported(law, N);
  if (N < 2) throw std::domain_error("pairwise_coalescence_probability: N must be at least 2");
  auto closed = closed_form_coalescence(law, N);
  double c = closed ? *closed : coalescence_from_support(*law.enumerate(N), N);
  if (!(c > 0.0)) throw std::domain_error(law.name() + ": c_N = 0");
  return std::min(c, 1.0);
}

double singleton_escape_probability(const ReproductionLaw& law, int N) {
  require_supported(law, N);
  auto closed = closed_form_escape(law, N);
  return closed ? *closed : escape_from_support(*law.enumerate(N), N);
}

}  // namespace cfv
