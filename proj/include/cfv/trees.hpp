#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cfv/rng.hpp"

namespace cfv {

inline constexpr double kTreeTol = 1e-9;

// Symmetric n x n matrix, row-major, zero diagonal. Distances are twice the time
// to the most recent common ancestor.
struct DistanceMatrix {
  int n = 0;
  std::vector<double> d;

  DistanceMatrix() = default;
  explicit DistanceMatrix(int size) : n(size), d(static_cast<std::size_t>(size) * size, 0.0) {}

  double& operator()(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
  void set(int i, int j, double value) {
    (*this)(i, j) = value;
    (*this)(j, i) = value;
  }
  bool operator==(const DistanceMatrix&) const = default;
};

// Decomposed pair (r, v): r between branch start points, v external marks in time units.
struct MarkedDistanceMatrix {
  int n = 0;
  DistanceMatrix r;
  std::vector<double> v;

  MarkedDistanceMatrix() = default;
  explicit MarkedDistanceMatrix(int size) : n(size), r(size), v(size, 0.0) {}
  MarkedDistanceMatrix(DistanceMatrix rr, std::vector<double> vv);
  bool operator==(const MarkedDistanceMatrix&) const = default;
};

// Labeled finite tree with the uniform measure on its labels.
struct TreeState {
  DistanceMatrix rho;
  std::optional<std::vector<double>> marks;  // present for marked states; rho then holds r

  TreeState() = default;
  explicit TreeState(DistanceMatrix d) : rho(std::move(d)) {}
  explicit TreeState(const MarkedDistanceMatrix& rv) : rho(rv.r), marks(rv.v) {}

  int n() const { return rho.n; }
  bool marked() const { return marks.has_value(); }
  MarkedDistanceMatrix as_marked() const;
  static TreeState point_mass();
};

struct Violation {
  std::string kind;
  int i = -1, j = -1, k = -1;
  double lhs = 0.0, rhs = 0.0;
  std::string describe() const;
};

std::optional<Violation> validate(const DistanceMatrix& rho, double tol = kTreeTol);
std::optional<Violation> validate(const MarkedDistanceMatrix& rv, double tol = kTreeTol);

DistanceMatrix alpha(const MarkedDistanceMatrix& rv);
MarkedDistanceMatrix beta(const DistanceMatrix& rho);
std::vector<double> upsilon(const DistanceMatrix& rho);
// first n external-branch lengths of the subtree spanned by the first l leaves
std::vector<double> upsilon_restricted(const DistanceMatrix& rho, int l, int n);
// marks replaced by zero
MarkedDistanceMatrix beta0(const DistanceMatrix& rho);

DistanceMatrix restrict(const DistanceMatrix& rho, int n);
MarkedDistanceMatrix restrict(const MarkedDistanceMatrix& rv, int n);
DistanceMatrix relabel(const DistanceMatrix& rho, const std::vector<int>& labels);
MarkedDistanceMatrix relabel(const MarkedDistanceMatrix& rv, const std::vector<int>& labels);

struct SampledMatrix {
  DistanceMatrix d;
  std::optional<std::vector<double>> v;
  std::vector<int> labels;
};

SampledMatrix sample_distance_matrix(const TreeState& chi, int m, bool replacement, Rng& rng);

bool isomorphic(const TreeState& a, const TreeState& b, double tol = kTreeTol);

}  // namespace cfv
