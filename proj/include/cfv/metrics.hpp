#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "cfv/partitions.hpp"
#include "cfv/trees.hpp"

namespace cfv {

using Point = std::vector<double>;
using PointDistance = std::function<double(const Point&, const Point&)>;

double euclidean(const Point& a, const Point& b);

struct EmpiricalMeasure {
  std::vector<Point> points;
  std::vector<double> weights;

  EmpiricalMeasure() = default;
  EmpiricalMeasure(std::vector<Point> pts, std::vector<double> w);
  static EmpiricalMeasure dirac(const Point& p);
  static EmpiricalMeasure uniform(std::vector<Point> pts);
  static EmpiricalMeasure on_line(const std::vector<double>& xs, const std::vector<double>& w);
};

// Largest mass a coupling can put on pairs at distance <= eps.
double max_coupled_mass(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const PointDistance& dist, double eps);

struct ProhorovResult {
  double value = 0.0;
  bool exact = true;  // false: greedy upper bound for large supports
};

ProhorovResult prohorov(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, const PointDistance& dist = euclidean);

struct CouplingEntry {
  int i;
  int j;
  double mass;
};

// Relation between the labels of two marked finite spaces, a coupling of their
// uniform measures, and the level c it certifies. Matrix entries and marks are
// multiplied by `scale` before comparison with c.
struct RelationCertificate {
  std::vector<std::pair<int, int>> relation;
  std::vector<CouplingEntry> coupling;
  double level = 1.0;
  double scale = 1.0;
};

struct CertificateCheck {
  bool ok = true;
  std::string violation;  // "distortion", "marginal", "mass", "index"
  double distortion = 0.0;
  double off_mass = 0.0;
};

CertificateCheck verify_certificate(const RelationCertificate& cert, const TreeState& a, const TreeState& b,
                                    double tol = 1e-12);

double distortion(const std::vector<std::pair<int, int>>& relation, const DistanceMatrix& a, const DistanceMatrix& b);

enum class MgpStrategy { exact_permutations, sampled };

struct MgpResult {
  double value = 1.0;
  RelationCertificate certificate;
};

// Upper bound on the marked Gromov-Prohorov distance over bijection-induced relations.
MgpResult mgp_upper(const TreeState& a, const TreeState& b, MgpStrategy strategy = MgpStrategy::exact_permutations,
                    int samples = 1000, std::uint64_t seed = 0);

// Relation {(i,i) : v(i) <= c} with the diagonal coupling, comparing (r, v) with beta0(alpha(r, v)).
RelationCertificate mark_truncation_certificate(const MarkedDistanceMatrix& rv, double c);

struct StepCertificate {
  RelationCertificate certificate;
  int N = 0;
  int L = 0;       // parents with offspring
  int M = 0;       // single-offspring parents whose minimal clade meets L
  int blocks = 0;  // #pi
  double cN = 0.0;
  double bound = 0.0;  // 2 N^-1 (N - #pi) + cN
};

// Coupling between beta(rho_k) and beta(rho_k1) across one generation.
StepCertificate step_coupling_certificate(const DistanceMatrix& rho_k, const DistanceMatrix& rho_k1,
                                          const Partition& pi, const std::vector<int>& parents, double cN,
                                          double scale);

// max_n ( max-norm distance of the first n rows/marks  min  2^-n )
double marked_matrix_distance(const MarkedDistanceMatrix& a, const MarkedDistanceMatrix& b);

}  // namespace cfv
