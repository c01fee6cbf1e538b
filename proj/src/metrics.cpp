#include "cfv/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/push_relabel_max_flow.hpp>

namespace cfv {

double euclidean(const Point& a, const Point& b) {
  if (a.size() != b.size()) throw std::invalid_argument("euclidean: dimension mismatch");
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(s);
}

EmpiricalMeasure::EmpiricalMeasure(std::vector<Point> pts, std::vector<double> w)
    : points(std::move(pts)), weights(std::move(w)) {
  if (points.size() != weights.size() || points.empty())
    throw std::invalid_argument("EmpiricalMeasure: need matching non-empty points and weights");
  double total = 0.0;
  for (double x : weights) {
    if (!(x > 0.0)) throw std::invalid_argument("EmpiricalMeasure: weights must be positive");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("EmpiricalMeasure: weights must sum to 1");
}

EmpiricalMeasure EmpiricalMeasure::dirac(const Point& p) { return EmpiricalMeasure({p}, {1.0}); }

EmpiricalMeasure EmpiricalMeasure::uniform(std::vector<Point> pts) {
  std::size_t n = pts.size();
  return EmpiricalMeasure(std::move(pts), std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

EmpiricalMeasure EmpiricalMeasure::on_line(const std::vector<double>& xs, const std::vector<double>& w) {
  std::vector<Point> pts;
  for (double x : xs) pts.push_back({x});
  return EmpiricalMeasure(std::move(pts), w);
}

namespace {

constexpr std::int64_t kMassUnits = 1'000'000'000'000;

// Integer masses summing exactly to kMassUnits (largest remainder rounding).
std::vector<std::int64_t> integer_masses(const std::vector<double>& w) {
  double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<std::int64_t> m(w.size());
  std::vector<std::pair<double, std::size_t>> rem;
  std::int64_t used = 0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    double x = w[k] / total * static_cast<double>(kMassUnits);
    m[k] = static_cast<std::int64_t>(std::floor(x));
    used += m[k];
    rem.emplace_back(x - std::floor(x), k);
  }
  std::sort(rem.begin(), rem.end(), [](auto& a, auto& b) { return a.first > b.first || (a.first == b.first && a.second < b.second); });
  for (std::size_t k = 0; used < kMassUnits; ++k, ++used) ++m[rem[k % rem.size()].second];
  return m;
}

using Traits = boost::adjacency_list_traits<boost::vecS, boost::vecS, boost::directedS>;
using FlowGraph = boost::adjacency_list<
    boost::vecS, boost::vecS, boost::directedS, boost::no_property,
    boost::property<boost::edge_capacity_t, std::int64_t,
                    boost::property<boost::edge_residual_capacity_t, std::int64_t,
                                    boost::property<boost::edge_reverse_t, Traits::edge_descriptor>>>>;

class Transport {
 public:
  Transport(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const PointDistance& dist)
      : a_(integer_masses(mu.weights)), b_(integer_masses(nu.weights)) {
    dist_.resize(a_.size() * b_.size());
    for (std::size_t i = 0; i < a_.size(); ++i)
      for (std::size_t j = 0; j < b_.size(); ++j) dist_[i * b_.size() + j] = dist(mu.points[i], nu.points[j]);
  }

  std::vector<double> distinct_distances() const {
    std::vector<double> d = dist_;
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
  }

  // exact maximal mass on pairs with distance <= eps, in mass units
  std::int64_t flow(double eps) const {
    std::size_t na = a_.size(), nb = b_.size();
    FlowGraph g(na + nb + 2);
    auto cap = boost::get(boost::edge_capacity, g);
    auto rev = boost::get(boost::edge_reverse, g);
    auto add = [&](std::size_t u, std::size_t v, std::int64_t c) {
      auto e = boost::add_edge(u, v, g).first;
      auto r = boost::add_edge(v, u, g).first;
      cap[e] = c;
      cap[r] = 0;
      rev[e] = r;
      rev[r] = e;
    };
    std::size_t s = na + nb, t = na + nb + 1;
    for (std::size_t i = 0; i < na; ++i) add(s, i, a_[i]);
    for (std::size_t j = 0; j < nb; ++j) add(na + j, t, b_[j]);
    for (std::size_t i = 0; i < na; ++i)
      for (std::size_t j = 0; j < nb; ++j)
        if (dist_[i * nb + j] <= eps) add(i, na + j, kMassUnits);
    return boost::push_relabel_max_flow(g, s, t);
  }

  // lower bound on the maximal mass: fill pairs in order of increasing distance
  std::int64_t greedy(double eps) const {
    std::size_t nb = b_.size();
    std::vector<std::size_t> order(dist_.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return dist_[x] < dist_[y]; });
    std::vector<std::int64_t> a = a_, b = b_;
    std::int64_t moved = 0;
    for (std::size_t k : order) {
      if (dist_[k] > eps) break;
      std::size_t i = k / nb, j = k % nb;
      std::int64_t m = std::min(a[i], b[j]);
      a[i] -= m;
      b[j] -= m;
      moved += m;
    }
    return moved;
  }

  std::size_t size_a() const { return a_.size(); }
  std::size_t size_b() const { return b_.size(); }

 private:
  std::vector<std::int64_t> a_, b_;
  std::vector<double> dist_;
};

double unmatched(std::int64_t moved) {
  return static_cast<double>(kMassUnits - moved) / static_cast<double>(kMassUnits);
}

}  // namespace

double max_coupled_mass(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const PointDistance& dist, double eps) {
  Transport tr(mu, nu, dist);
  return static_cast<double>(tr.flow(eps)) / static_cast<double>(kMassUnits);
}

ProhorovResult prohorov(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const PointDistance& dist) {
  Transport tr(mu, nu, dist);
  ProhorovResult res;
  res.exact = tr.size_a() <= 64 && tr.size_b() <= 64;
  std::vector<double> D = tr.distinct_distances();
  auto gap = [&](std::size_t k) { return unmatched(res.exact ? tr.flow(D[k]) : tr.greedy(D[k])); };
  // smallest k with gap(k) <= D[k]; gap is non-increasing and D increasing
  std::size_t lo = 0, hi = D.size() - 1;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (gap(mid) <= D[mid])
      hi = mid;
    else
      lo = mid + 1;
  }
  double value = D[lo];
  if (lo > 0) value = std::min(value, gap(lo - 1));
  res.value = std::min(value, 1.0);
  return res;
}

double distortion(const std::vector<std::pair<int, int>>& relation, const DistanceMatrix& a, const DistanceMatrix& b) {
  double dis = 0.0;
  for (auto [i, j] : relation)
    for (auto [k, l] : relation) dis = std::max(dis, std::abs(a(i, k) - b(j, l)));
  return dis;
}

namespace {

double mark_of(const TreeState& s, int i) { return s.marks ? (*s.marks)[i] : 0.0; }

}  // namespace

CertificateCheck verify_certificate(const RelationCertificate& cert, const TreeState& a, const TreeState& b,
                                    double tol) {
  CertificateCheck out;
  int na = a.n(), nb = b.n();
  auto fail = [&](const char* kind) {
    out.ok = false;
    if (out.violation.empty()) out.violation = kind;
  };
  for (auto [i, j] : cert.relation)
    if (i < 0 || i >= na || j < 0 || j >= nb) {
      fail("index");
      return out;
    }
  for (const auto& e : cert.coupling)
    if (e.i < 0 || e.i >= na || e.j < 0 || e.j >= nb || e.mass < -tol) {
      fail("index");
      return out;
    }

  out.distortion = distortion(cert.relation, a.rho, b.rho) * cert.scale;
  if (out.distortion / 2 > cert.level + tol) fail("distortion");

  std::vector<double> row(na, 0.0), col(nb, 0.0);
  for (const auto& e : cert.coupling) {
    row[e.i] += e.mass;
    col[e.j] += e.mass;
  }
  for (double x : row)
    if (std::abs(x - 1.0 / na) > tol) fail("marginal");
  for (double x : col)
    if (std::abs(x - 1.0 / nb) > tol) fail("marginal");

  std::vector<std::pair<int, int>> rel = cert.relation;
  std::sort(rel.begin(), rel.end());
  for (const auto& e : cert.coupling) {
    bool in_rel = std::binary_search(rel.begin(), rel.end(), std::make_pair(e.i, e.j));
    bool close = std::abs(mark_of(a, e.i) - mark_of(b, e.j)) * cert.scale <= cert.level + tol;
    if (!(in_rel && close)) out.off_mass += e.mass;
  }
  if (out.off_mass > cert.level + tol) fail("mass");
  return out;
}

namespace {

// smallest c with #{gaps > c} / n <= c
double mass_level(std::vector<double> gaps) {
  std::sort(gaps.begin(), gaps.end(), std::greater<>());
  double n = static_cast<double>(gaps.size());
  double best = 1.0;
  for (std::size_t k = 0; k <= gaps.size(); ++k) {
    double g = k < gaps.size() ? gaps[k] : 0.0;
    best = std::min(best, std::max(g, static_cast<double>(k) / n));
  }
  return best;
}

RelationCertificate bijection_certificate(const std::vector<int>& perm, double level) {
  RelationCertificate cert;
  double n = static_cast<double>(perm.size());
  for (std::size_t i = 0; i < perm.size(); ++i) {
    cert.relation.emplace_back(static_cast<int>(i), perm[i]);
    cert.coupling.push_back({static_cast<int>(i), perm[i], 1.0 / n});
  }
  cert.level = level;
  return cert;
}

double bijection_level(const TreeState& a, const TreeState& b, const std::vector<int>& perm) {
  int n = a.n();
  double dis = 0.0;
  std::vector<double> gaps(n);
  for (int i = 0; i < n; ++i) {
    gaps[i] = std::abs(mark_of(a, i) - mark_of(b, perm[i]));
    for (int j = i + 1; j < n; ++j) dis = std::max(dis, std::abs(a.rho(i, j) - b.rho(perm[i], perm[j])));
  }
  return std::min(1.0, std::max(dis / 2, mass_level(gaps)));
}

}  // namespace

MgpResult mgp_upper(const TreeState& a, const TreeState& b, MgpStrategy strategy, int samples, std::uint64_t seed) {
  if (a.n() != b.n()) throw std::invalid_argument("mgp_upper: bijection mode needs equal sizes");
  int n = a.n();
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::vector<int> best = perm;
  double best_level = bijection_level(a, b, perm);
  if (strategy == MgpStrategy::exact_permutations) {
    if (n > 8) throw std::invalid_argument("mgp_upper: exact mode needs n <= 8");
    while (std::next_permutation(perm.begin(), perm.end())) {
      double c = bijection_level(a, b, perm);
      if (c < best_level) {
        best_level = c;
        best = perm;
      }
    }
  } else {
    Rng rng = substream(seed, 0);
    for (int s = 0; s < samples; ++s) {
      std::shuffle(perm.begin(), perm.end(), rng);
      double c = bijection_level(a, b, perm);
      if (c < best_level) {
        best_level = c;
        best = perm;
      }
    }
  }
  return {best_level, bijection_certificate(best, best_level)};
}

RelationCertificate mark_truncation_certificate(const MarkedDistanceMatrix& rv, double c) {
  RelationCertificate cert;
  double n = static_cast<double>(rv.n);
  for (int i = 0; i < rv.n; ++i) {
    if (rv.v[i] <= c) cert.relation.emplace_back(i, i);
    cert.coupling.push_back({i, i, 1.0 / n});
  }
  cert.level = c;
  return cert;
}

StepCertificate step_coupling_certificate(const DistanceMatrix& rho_k, const DistanceMatrix& rho_k1,
                                          const Partition& pi, const std::vector<int>& parents, double cN,
                                          double scale) {
  int N = rho_k.n;
  if (rho_k1.n != N || pi.n != N || static_cast<int>(parents.size()) != pi.block_count())
    throw std::invalid_argument("step_coupling_certificate: inconsistent inputs");
  StepCertificate out;
  out.N = N;
  out.cN = cN;
  out.blocks = pi.block_count();

  std::vector<int> offspring(N, 0), child(N, -1);
  for (int b = 0; b < pi.block_count(); ++b) {
    int p = parents[b];
    if (p < 0 || p >= N || offspring[p] > 0) throw std::invalid_argument("step_coupling_certificate: bad parents");
    offspring[p] = static_cast<int>(pi.blocks[b].size());
    child[p] = pi.blocks[b].front();
  }
  out.L = static_cast<int>(std::count_if(offspring.begin(), offspring.end(), [](int k) { return k > 0; }));

  std::vector<int> M;
  for (int i = 0; i < N; ++i) {
    if (offspring[i] != 1) continue;
    double best = std::numeric_limits<double>::infinity();
    for (int j = 0; j < N; ++j)
      if (j != i) best = std::min(best, rho_k(i, j));
    bool meets = false;
    for (int j = 0; j < N && !meets; ++j)
      if (j != i && rho_k(i, j) == best && offspring[j] > 0) meets = true;
    if (meets) M.push_back(i);
  }
  out.M = static_cast<int>(M.size());

  RelationCertificate& cert = out.certificate;
  cert.scale = scale;
  std::vector<bool> used_src(N, false), used_dst(N, false);
  double w = 1.0 / N;
  for (int i : M) {
    cert.relation.emplace_back(i, child[i]);
    cert.coupling.push_back({i, child[i], w});
    used_src[i] = true;
    used_dst[child[i]] = true;
  }
  int j = 0;
  for (int i = 0; i < N; ++i) {
    if (used_src[i]) continue;
    while (used_dst[j]) ++j;
    cert.coupling.push_back({i, j, w});
    used_dst[j] = true;
  }
  cert.level = std::min(1.0, static_cast<double>(N - out.M) / N + cN);
  out.bound = 2.0 * (N - out.blocks) / N + cN;
  return out;
}

double marked_matrix_distance(const MarkedDistanceMatrix& a, const MarkedDistanceMatrix& b) {
  if (a.n != b.n) throw std::invalid_argument("marked_matrix_distance: size mismatch");
  double d = 0.0, running = 0.0, cap = 1.0;
  for (int n = 1; n <= a.n; ++n) {
    int i = n - 1;
    running = std::max(running, std::abs(a.v[i] - b.v[i]));
    for (int j = 0; j < i; ++j) running = std::max(running, std::abs(a.r(i, j) - b.r(i, j)));
    cap /= 2;
    d = std::max(d, std::min(running, cap));
  }
  return d;
}

}  // namespace cfv
