#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cfv/rng.hpp"

namespace cfv {

// Point of the simplex: non-increasing weights with sum at most 1, zeros dropped.
struct MassPartition {
  std::vector<double> w;

  MassPartition() = default;
  explicit MassPartition(std::vector<double> weights);

  double l1() const;
  double l2sq() const;
  double dust() const { return 1.0 - l1(); }
  bool operator==(const MassPartition&) const = default;
};

// Family sizes of one generation, sorted non-increasing, summing to N.
struct IntegerMassPartition {
  int N = 0;
  std::vector<int> counts;

  IntegerMassPartition() = default;
  IntegerMassPartition(int population_size, std::vector<int> family_sizes);

  static IntegerMassPartition singletons(int N);
  MassPartition frequencies() const;
  bool operator==(const IntegerMassPartition&) const = default;
};

struct Atom {
  double w;
  MassPartition x;
};

// Finite-atomic measure on the simplex plus a Kingman atom at zero.
struct LimitMeasure {
  double kingman = 0.0;
  std::vector<Atom> atoms;

  LimitMeasure() = default;
  LimitMeasure(double kingman_weight, std::vector<Atom> atom_list);

  static LimitMeasure kingman_only();
  static LimitMeasure point(const MassPartition& x);
};

enum class DustClass { dust_free, dust };

DustClass classify_dust(const LimitMeasure& xi);

struct DustIntegral {
  double value;
  // true when a0 > 0, so the value is the integral over the atom part only
  bool atoms_only;
};

DustIntegral dust_integral(const LimitMeasure& xi);

using LawSupport = std::vector<std::pair<double, IntegerMassPartition>>;

enum class LawFamily { moran, wright_fisher, sparse_paintbox, example5, singletons };

// Per-generation reproduction law Xi^N, parameterised by the population size.
struct ReproductionLaw {
  LawFamily family = LawFamily::moran;
  // sparse_paintbox: with probability min(1, p_scale * N^-p_exponent) the family
  // sizes are floor(N x(i)) padded with singletons
  MassPartition x;
  double p_scale = 1.0;
  double p_exponent = 1.0;

  static ReproductionLaw moran();
  static ReproductionLaw wright_fisher();
  static ReproductionLaw sparse_paintbox(const MassPartition& x, double p_scale = 1.0, double p_exponent = 1.0);
  static ReproductionLaw example5();
  static ReproductionLaw singletons();

  std::string name() const;
  bool supports(int N) const;
  IntegerMassPartition sample(int N, Rng& rng) const;
  // Exact support, when it is small enough to list.
  std::optional<LawSupport> enumerate(int N) const;

  double sparse_probability(int N) const;
  IntegerMassPartition sparse_sizes(int N) const;
};

// Sum over the support of sum_i x(i)(N x(i) - 1)/(N - 1).
double coalescence_from_support(const LawSupport& support, int N);
double escape_from_support(const LawSupport& support, int N);

// Registered closed forms; nullopt when the family has none.
std::optional<double> closed_form_coalescence(const ReproductionLaw& law, int N);
std::optional<double> closed_form_escape(const ReproductionLaw& law, int N);

// c_N. Throws std::domain_error when c_N = 0 or N is unsupported.
double pairwise_coalescence_probability(const ReproductionLaw& law, int N);
// b_N
double singleton_escape_probability(const ReproductionLaw& law, int N);

}  // namespace cfv
