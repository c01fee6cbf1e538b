#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "cfv/cannings.hpp"
#include "cfv/harness.hpp"

namespace {

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::int64_t> replicates;
  std::string out;
  std::string format = "csv";
};

int run(const std::string& experiment, const Options& o) {
  cfv::ExperimentConfig cfg = o.config.empty() ? cfv::default_config(experiment) : cfv::load_config(o.config, experiment);
  if (cfg.experiment != experiment)
    throw std::invalid_argument("config is for experiment " + cfg.experiment + ", not " + experiment);
  if (o.seed) cfg.seed = *o.seed;
  if (o.replicates) {
    if (*o.replicates < 1) throw CLI::ValidationError("--replicates", "must be at least 1");
    cfg.replicates = *o.replicates;
  }
  std::string out = o.out.empty() ? cfg.out : o.out;
  std::vector<cfv::ResultRow> rows = cfv::run_experiment(cfg);
  auto emit = [&](std::ostream& os) {
    if (o.format == "json")
      cfv::write_json(os, rows);
    else
      cfv::write_csv(os, rows);
  };
  if (out.empty()) {
    emit(std::cout);
  } else {
    std::filesystem::create_directories(out);
    std::ofstream f(std::filesystem::path(out) / (experiment + "." + o.format));
    emit(f);
  }
  for (const auto& r : rows)
    if (!r.pass) std::cerr << "FAIL " << r.experiment << " N=" << r.N << " " << r.tag << '\n';
  return cfv::all_pass(rows) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cannings model and Xi-Fleming-Viot verification harness"};
  app.require_subcommand(1);
  Options o;
  std::map<CLI::App*, std::string> names;
  for (const char* name : {"rates", "generator", "external-branch", "counterexample", "step-bounds", "marginals", "selftest"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", o.config, "TOML or JSON experiment config")->check(CLI::ExistingFile);
    sub->add_option("--seed", o.seed, "master seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--replicates", o.replicates, "replicate count");
    sub->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    names[sub] = name;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  std::string experiment;
  for (auto& [sub, name] : names)
    if (sub->parsed()) experiment = name;
  try {
    return run(experiment, o);
  } catch (const cfv::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 1;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  }
}
