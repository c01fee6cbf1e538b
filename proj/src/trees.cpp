#include "cfv/trees.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace cfv {

MarkedDistanceMatrix::MarkedDistanceMatrix(DistanceMatrix rr, std::vector<double> vv)
    : n(rr.n), r(std::move(rr)), v(std::move(vv)) {
  if (static_cast<int>(v.size()) != n) throw std::invalid_argument("MarkedDistanceMatrix: mark vector size mismatch");
}

MarkedDistanceMatrix TreeState::as_marked() const {
  if (!marks) throw std::logic_error("TreeState: state is not marked");
  return MarkedDistanceMatrix(rho, *marks);
}

TreeState TreeState::point_mass() { return TreeState(DistanceMatrix(1)); }

std::string Violation::describe() const {
  std::ostringstream os;
  os << kind << " at (" << i + 1 << "," << j + 1;
  if (k >= 0) os << "," << k + 1;
  os << "): " << lhs << " > " << rhs;
  return os.str();
}

namespace {

std::optional<Violation> check_basic(const DistanceMatrix& m, double tol) {
  if (static_cast<int>(m.d.size()) != m.n * m.n) return Violation{"shape", -1, -1, -1, 0, 0};
  for (int i = 0; i < m.n; ++i) {
    if (std::abs(m(i, i)) > tol) return Violation{"diagonal", i, i, -1, std::abs(m(i, i)), 0.0};
    for (int j = i + 1; j < m.n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > tol) return Violation{"symmetry", i, j, -1, m(i, j), m(j, i)};
      if (m(i, j) < -tol || !std::isfinite(m(i, j))) return Violation{"negative", i, j, -1, 0.0, m(i, j)};
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<Violation> validate(const DistanceMatrix& rho, double tol) {
  if (auto v = check_basic(rho, tol)) return v;
  int n = rho.n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        double rhs = std::max(rho(i, k), rho(k, j));
        if (rho(i, j) > rhs + tol) return Violation{"ultrametric", i, j, k, rho(i, j), rhs};
      }
  return std::nullopt;
}

std::optional<Violation> validate(const MarkedDistanceMatrix& rv, double tol) {
  if (rv.r.n != rv.n || static_cast<int>(rv.v.size()) != rv.n) return Violation{"shape", -1, -1, -1, 0, 0};
  if (auto v = check_basic(rv.r, tol)) return v;
  for (int i = 0; i < rv.n; ++i)
    if (rv.v[i] < -tol || !std::isfinite(rv.v[i])) return Violation{"mark", i, i, -1, 0.0, rv.v[i]};
  int n = rv.n;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        if (k == i || k == j) continue;
        double rhs = rv.r(i, k) + rv.r(k, j);
        if (rv.r(i, j) > rhs + tol) return Violation{"triangle", i, j, k, rv.r(i, j), rhs};
      }
  if (auto v = validate(alpha(rv), tol)) {
    v->kind = "alpha-" + v->kind;
    return v;
  }
  return std::nullopt;
}

DistanceMatrix alpha(const MarkedDistanceMatrix& rv) {
  DistanceMatrix out(rv.n);
  for (int i = 0; i < rv.n; ++i)
    for (int j = 0; j < rv.n; ++j)
      if (i != j) out(i, j) = rv.v[i] + rv.r(i, j) + rv.v[j];
  return out;
}

std::vector<double> upsilon(const DistanceMatrix& rho) {
  std::vector<double> v(rho.n, 0.0);
  if (rho.n < 2) return v;
  for (int i = 0; i < rho.n; ++i) {
    double m = std::numeric_limits<double>::infinity();
    for (int j = 0; j < rho.n; ++j)
      if (j != i) m = std::min(m, rho(i, j));
    v[i] = 0.5 * m;
  }
  return v;
}

MarkedDistanceMatrix beta(const DistanceMatrix& rho) {
  if (rho.n == 1) return MarkedDistanceMatrix(rho, {0.0});
  std::vector<double> v = upsilon(rho);
  DistanceMatrix r(rho.n);
  for (int i = 0; i < rho.n; ++i)
    for (int j = 0; j < rho.n; ++j)
      if (i != j) r(i, j) = rho(i, j) - v[i] - v[j];
  return MarkedDistanceMatrix(std::move(r), std::move(v));
}

MarkedDistanceMatrix beta0(const DistanceMatrix& rho) {
  return MarkedDistanceMatrix(rho, std::vector<double>(rho.n, 0.0));
}

DistanceMatrix restrict(const DistanceMatrix& rho, int n) {
  if (n > rho.n || n < 0) throw std::invalid_argument("restrict: n exceeds matrix size");
  DistanceMatrix out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = rho(i, j);
  return out;
}

MarkedDistanceMatrix restrict(const MarkedDistanceMatrix& rv, int n) {
  return MarkedDistanceMatrix(restrict(rv.r, n), std::vector<double>(rv.v.begin(), rv.v.begin() + n));
}

std::vector<double> upsilon_restricted(const DistanceMatrix& rho, int l, int n) {
  if (l < 2 || n > l || l > rho.n || n < 0) throw std::invalid_argument("upsilon_restricted: need n <= l <= size, l >= 2");
  std::vector<double> v = upsilon(restrict(rho, l));
  v.resize(n);
  return v;
}

DistanceMatrix relabel(const DistanceMatrix& rho, const std::vector<int>& labels) {
  int m = static_cast<int>(labels.size());
  DistanceMatrix out(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) out(i, j) = rho(labels[i], labels[j]);
  return out;
}

MarkedDistanceMatrix relabel(const MarkedDistanceMatrix& rv, const std::vector<int>& labels) {
  std::vector<double> v(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) v[i] = rv.v[labels[i]];
  return MarkedDistanceMatrix(relabel(rv.r, labels), std::move(v));
}

SampledMatrix sample_distance_matrix(const TreeState& chi, int m, bool replacement, Rng& rng) {
  int n = chi.n();
  if (m < 0 || (!replacement && m > n)) throw std::invalid_argument("sample_distance_matrix: m > n without replacement");
  std::vector<int> labels(m);
  if (replacement) {
    std::uniform_int_distribution<int> u(0, n - 1);
    for (int& l : labels) l = u(rng);
  } else {
    std::vector<int> pool(n);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < m; ++i) {
      std::uniform_int_distribution<int> u(i, n - 1);
      std::swap(pool[i], pool[u(rng)]);
      labels[i] = pool[i];
    }
  }
  SampledMatrix out{relabel(chi.rho, labels), std::nullopt, labels};
  if (chi.marks) {
    std::vector<double> v(m);
    for (int i = 0; i < m; ++i) v[i] = (*chi.marks)[labels[i]];
    out.v = std::move(v);
  }
  return out;
}

bool isomorphic(const TreeState& a, const TreeState& b, double tol) {
  int n = a.n();
  if (n != b.n() || a.marked() != b.marked()) return false;
  if (n > 10) throw std::invalid_argument("isomorphic: size limit is 10");
  std::vector<int> perm(n, -1);
  std::vector<bool> used(n, false);
  std::function<bool(int)> extend = [&](int i) -> bool {
    if (i == n) return true;
    for (int c = 0; c < n; ++c) {
      if (used[c]) continue;
      if (a.marks && std::abs((*a.marks)[i] - (*b.marks)[c]) > tol) continue;
      bool ok = true;
      for (int j = 0; j < i && ok; ++j) ok = std::abs(a.rho(i, j) - b.rho(c, perm[j])) <= tol;
      if (!ok) continue;
      used[c] = true;
      perm[i] = c;
      if (extend(i + 1)) return true;
      used[c] = false;
    }
    return false;
  };
  return extend(0);
}

}  // namespace cfv
