#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>
#include <toml.hpp>

#include "cfv/harness.hpp"
#include "cfv/serialize.hpp"

namespace cfv {

using nlohmann::json;

ReproductionLaw law_from_name(const std::string& name) {
  if (name == "moran") return ReproductionLaw::moran();
  if (name == "wright-fisher" || name == "wright_fisher") return ReproductionLaw::wright_fisher();
  if (name == "sparse-paintbox" || name == "sparse_paintbox") return ReproductionLaw::sparse_paintbox(MassPartition({0.5}));
  if (name == "example5") return ReproductionLaw::example5();
  if (name == "singletons") return ReproductionLaw::singletons();
  throw std::invalid_argument("unknown law family: " + name);
}

LimitMeasure default_limit(const ReproductionLaw& law) {
  switch (law.family) {
    case LawFamily::sparse_paintbox: return LimitMeasure::point(law.x);
    case LawFamily::example5: return LimitMeasure::point(MassPartition({0.5}));
    default: return LimitMeasure::kingman_only();
  }
}

namespace {

ReproductionLaw parse_law(const json& j) {
  if (j.is_string()) return law_from_name(j.get<std::string>());
  ReproductionLaw law = law_from_name(j.at("family").get<std::string>());
  if (law.family == LawFamily::sparse_paintbox) {
    if (j.contains("x")) law.x = MassPartition(j["x"].get<std::vector<double>>());
    law.p_scale = j.value("p_scale", 1.0);
    law.p_exponent = j.value("p_exponent", 1.0);
  }
  return law;
}

LimitMeasure parse_xi(const json& j) {
  std::vector<Atom> atoms;
  if (j.contains("atoms"))
    for (const json& a : j["atoms"]) atoms.push_back({a.at("w").get<double>(), MassPartition(a.at("x").get<std::vector<double>>())});
  return LimitMeasure(j.value("kingman", 0.0), std::move(atoms));
}

template <class T>
std::vector<T> scalar_or_list(const json& j) {
  if (j.is_array()) return j.get<std::vector<T>>();
  return {j.get<T>()};
}

ExperimentConfig from_json(const json& j, const std::string& experiment) {
  ExperimentConfig cfg = default_config(j.value("experiment", experiment));
  if (j.contains("law")) {
    cfg.law = parse_law(j["law"]);
    cfg.xi = default_limit(cfg.law);
  }
  if (j.contains("xi")) cfg.xi = parse_xi(j["xi"]);
  if (j.contains("laws")) {
    cfg.laws.clear();
    for (const json& l : j["laws"]) cfg.laws.push_back(parse_law(l));
  } else if (j.contains("law")) {
    cfg.laws = {cfg.law};
  }
  if (j.contains("N")) cfg.N = scalar_or_list<int>(j["N"]);
  if (j.contains("t")) cfg.t = scalar_or_list<double>(j["t"]);
  cfg.n = j.value("n", cfg.n);
  cfg.replicates = j.value("replicates", cfg.replicates);
  cfg.seed = j.value("seed", cfg.seed);
  cfg.epsilon = j.value("epsilon", cfg.epsilon);
  cfg.alpha = j.value("alpha", cfg.alpha);
  cfg.tolerance = j.value("tolerance", cfg.tolerance);
  if (j.contains("tolerance_scaling")) {
    std::string s = j["tolerance_scaling"].get<std::string>();
    if (s != "absolute" && s != "inverse_N") throw std::invalid_argument("tolerance_scaling must be absolute or inverse_N");
    cfg.tolerance_per_N = s == "inverse_N";
  }
  cfg.steps = j.value("steps", cfg.steps);
  cfg.bound_from_N = j.value("bound_from_N", cfg.bound_from_N);
  if (j.contains("expect")) {
    std::string e = j["expect"].get<std::string>();
    if (e != "agree" && e != "disagree") throw std::invalid_argument("expect must be agree or disagree");
    cfg.expect = e;
  }
  if (j.contains("initial")) cfg.initial = tree_state_from_json(j["initial"].dump());
  cfg.out = j.value("out", cfg.out);
  if (cfg.replicates < 1) throw std::invalid_argument("replicates must be at least 1");
  if (cfg.N.empty()) throw std::invalid_argument("N must list at least one population size");
  if (cfg.n < 1) throw std::invalid_argument("n must be positive");
  return cfg;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text, const std::string& experiment) {
  try {
    return from_json(json::parse(text), experiment);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
}

ExperimentConfig parse_config_toml(const std::string& text, const std::string& experiment) {
  toml::table tbl;
  try {
    tbl = toml::parse(text);
  } catch (const toml::parse_error& e) {
    throw std::invalid_argument(std::string("config: ") + std::string(e.description()));
  }
  std::ostringstream os;
  os << toml::json_formatter{tbl};
  return parse_config_json(os.str(), experiment);
}

ExperimentConfig load_config(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return parse_config_json(buf.str(), experiment);
  return parse_config_toml(buf.str(), experiment);
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  c.experiment = experiment;
  if (experiment == "rates") {
    c.law = ReproductionLaw::sparse_paintbox(MassPartition({0.5}));
    c.N = {64, 256, 1024};
    c.n = 3;
    c.tolerance = 10.0;
    c.tolerance_per_N = true;
  } else if (experiment == "generator") {
    c.law = ReproductionLaw::moran();
    c.N = {32, 128};
    c.replicates = 100000;
  } else if (experiment == "external-branch") {
    c.law = ReproductionLaw::sparse_paintbox(MassPartition({0.5}));
    c.N = {4096};
    c.t = {2.0};
    c.n = 1;
    c.replicates = 100000;
    c.tolerance = 10.0;
    c.tolerance_per_N = true;
  } else if (experiment == "counterexample") {
    c.law = ReproductionLaw::example5();
    c.N = {1 << 10, 1 << 12, 1 << 14};
    c.replicates = 10000;
    c.n = 1;
  } else if (experiment == "step-bounds") {
    c.laws = {ReproductionLaw::moran(), ReproductionLaw::wright_fisher(),
              ReproductionLaw::sparse_paintbox(MassPartition({0.5})), ReproductionLaw::example5()};
    c.law = c.laws.front();
    c.N = {8, 32};
  } else if (experiment == "marginals") {
    c.law = ReproductionLaw::moran();
    c.N = {512};
    c.t = {0.5, 1.0};
  } else if (experiment == "selftest") {
    c.law = ReproductionLaw::moran();
  } else {
    throw std::invalid_argument("unknown experiment: " + experiment);
  }
  c.xi = default_limit(c.law);
  return c;
}

}  // namespace cfv
