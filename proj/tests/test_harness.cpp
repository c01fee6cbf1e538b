#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "cfv/harness.hpp"
#include "cfv/serialize.hpp"
#include "oracles.hpp"

using namespace cfv;

namespace {

std::string csv(const std::vector<ResultRow>& rows) {
  std::ostringstream os;
  write_csv(os, rows);
  return os.str();
}

}  // namespace

TEST(Config, TomlOverridesDefaults) {
  ExperimentConfig c = parse_config_toml(R"(
experiment = "rates"
N = [16, 32]
n = 2
seed = 9
tolerance = 0.5
tolerance_scaling = "absolute"
law = { family = "sparse-paintbox", x = [0.25, 0.25], p_scale = 2.0, p_exponent = 0.5 }
)");
  EXPECT_EQ(c.experiment, "rates");
  EXPECT_EQ(c.N, (std::vector<int>{16, 32}));
  EXPECT_EQ(c.n, 2);
  EXPECT_EQ(c.seed, 9u);
  EXPECT_FALSE(c.tolerance_per_N);
  EXPECT_EQ(c.law.family, LawFamily::sparse_paintbox);
  EXPECT_EQ(c.law.x.w, (std::vector<double>{0.25, 0.25}));
  EXPECT_EQ(c.law.p_scale, 2.0);
  EXPECT_EQ(c.law.p_exponent, 0.5);
  EXPECT_EQ(c.xi.atoms.size(), 1u);
  EXPECT_EQ(c.replicates, default_config("rates").replicates);
}

TEST(Config, JsonMatchesToml) {
  ExperimentConfig a = parse_config_json(R"({"experiment": "generator", "N": 8, "replicates": 50, "law": "wright-fisher",
                                            "xi": {"kingman": 1.0}, "expect": "disagree"})");
  ExperimentConfig b = parse_config_toml(R"(
experiment = "generator"
N = 8
replicates = 50
law = "wright-fisher"
xi = { kingman = 1.0 }
expect = "disagree"
)");
  for (const ExperimentConfig* c : {&a, &b}) {
    EXPECT_EQ(c->experiment, "generator");
    EXPECT_EQ(c->N, std::vector<int>{8});
    EXPECT_EQ(c->replicates, 50);
    EXPECT_EQ(c->law.family, LawFamily::wright_fisher);
    EXPECT_EQ(c->xi.kingman, 1.0);
    EXPECT_EQ(c->expect, std::optional<std::string>("disagree"));
  }
}

TEST(Config, InitialStateAndFiles) {
  std::mt19937_64 g(1);
  MarkedDistanceMatrix rv = oracle::random_marked(4, g);
  std::string text = R"({"experiment": "marginals", "initial": )" + to_json(rv) + "}";
  ExperimentConfig c = parse_config_json(text);
  ASSERT_TRUE(c.initial.marked());
  EXPECT_EQ(c.initial.as_marked(), rv);

  auto dir = std::filesystem::temp_directory_path() / "cfv_harness_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "c.json") << text;
  std::ofstream(dir / "c.toml") << "experiment = \"selftest\"\nseed = 3\n";
  EXPECT_EQ(load_config((dir / "c.json").string()).experiment, "marginals");
  EXPECT_EQ(load_config((dir / "c.toml").string()).seed, 3u);
  EXPECT_THROW(load_config((dir / "missing.toml").string()), std::invalid_argument);
  std::filesystem::remove_all(dir);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(parse_config_toml("N = ["), std::invalid_argument);
  EXPECT_THROW(parse_config_json("{\"N\": "), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"replicates": 0})"), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"N": []})"), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"n": 0})"), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"expect": "maybe"})"), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"tolerance_scaling": "log"})"), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"law": "lambda"})"), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"experiment": "nope"})"), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"N": "many"})"), std::invalid_argument);
  EXPECT_THROW(parse_config_json(R"({"initial": {"n": 2, "d": [0, 1]}})"), std::invalid_argument);
}

TEST(Config, ToleranceScaling) {
  EXPECT_TRUE(default_config("rates").tolerance_per_N);
  EXPECT_TRUE(parse_config_json(R"({"tolerance_scaling": "inverse_N"})", "generator").tolerance_per_N);
  EXPECT_FALSE(parse_config_json(R"({"tolerance_scaling": "absolute"})").tolerance_per_N);
}

TEST(Config, LawNames) {
  EXPECT_EQ(law_from_name("moran").family, LawFamily::moran);
  EXPECT_EQ(law_from_name("wright_fisher").family, LawFamily::wright_fisher);
  EXPECT_EQ(law_from_name("sparse-paintbox").x.w, std::vector<double>{0.5});
  EXPECT_EQ(law_from_name("example5").family, LawFamily::example5);
  EXPECT_EQ(law_from_name("singletons").family, LawFamily::singletons);
  EXPECT_THROW(law_from_name("beta"), std::invalid_argument);
  EXPECT_EQ(default_limit(ReproductionLaw::moran()).kingman, 1.0);
  EXPECT_EQ(default_limit(ReproductionLaw::example5()).atoms.front().x.w, std::vector<double>{0.5});
}

TEST(Rows, Settle) {
  ResultRow r;
  r.estimate = 1.5;
  r.reference = 1.0;
  r.agree = false;
  EXPECT_FALSE(settle(r).pass);
  EXPECT_EQ(r.abs_error, 0.5);
  r.expected = "disagree";
  EXPECT_TRUE(settle(r).pass);
  r.agree = true;
  EXPECT_FALSE(settle(r).pass);
  r.expected = "info";
  EXPECT_TRUE(settle(r).pass);
  EXPECT_TRUE(all_pass({}));
  ResultRow bad;
  bad.pass = false;
  EXPECT_FALSE(all_pass({r, bad}));
}

TEST(Rows, CsvAndJson) {
  ResultRow r;
  r.experiment = "rates";
  r.N = 4;
  r.tag = "pi=[[1,2],[3]]";
  r.estimate = 0.25;
  r.pvalue = 0.5;
  settle(r);
  std::string text = csv({r});
  EXPECT_EQ(text,
            "experiment,N,tag,estimate,reference,abs_error,ci_low,ci_high,pvalue,agree,expected,pass\n"
            "rates,4,\"pi=[[1,2],[3]]\",0.25,0,0.25,,,0.5,true,agree,true\n");
  r.tag = "say \"hi\"";
  EXPECT_NE(csv({r}).find("\"say \"\"hi\"\"\""), std::string::npos);
  std::ostringstream os;
  write_json(os, {r});
  nlohmann::json j = nlohmann::json::parse(os.str());
  ASSERT_EQ(j.size(), 1u);
  EXPECT_EQ(j[0]["tag"], "say \"hi\"");
  EXPECT_TRUE(j[0]["ci_low"].is_null());
  EXPECT_EQ(j[0]["pvalue"], 0.5);
  EXPECT_EQ(j[0]["pass"], true);
}

TEST(Serialize, RoundTrips) {
  std::mt19937_64 g(2);
  MarkedDistanceMatrix rv = oracle::random_marked(5, g);
  EXPECT_EQ(tree_state_from_json(to_json(rv)).as_marked(), rv);
  DistanceMatrix d = oracle::random_ultrametric(5, g);
  TreeState plain = tree_state_from_json(to_json(d));
  EXPECT_FALSE(plain.marked());
  EXPECT_EQ(plain.rho, d);
  EXPECT_EQ(to_json(Blocks{{3, 1}, {0}}), "[[1],[2,4]]");

  RelationCertificate cert = mark_truncation_certificate(rv, 0.5);
  cert.scale = 0.25;
  RelationCertificate back = certificate_from_json(to_json(cert));
  EXPECT_EQ(back.relation, cert.relation);
  ASSERT_EQ(back.coupling.size(), cert.coupling.size());
  for (std::size_t k = 0; k < cert.coupling.size(); ++k) {
    EXPECT_EQ(back.coupling[k].i, cert.coupling[k].i);
    EXPECT_EQ(back.coupling[k].j, cert.coupling[k].j);
    EXPECT_EQ(back.coupling[k].mass, cert.coupling[k].mass);
  }
  EXPECT_EQ(back.level, cert.level);
  EXPECT_EQ(back.scale, cert.scale);
  nlohmann::json j = nlohmann::json::parse(to_json(cert));
  EXPECT_GE(j["coupling"][0]["i"].get<int>(), 1);
}

TEST(Experiments, SelftestPasses) {
  std::vector<ResultRow> rows = run_experiment(default_config("selftest"));
  ASSERT_FALSE(rows.empty());
  for (const ResultRow& r : rows) EXPECT_TRUE(r.pass) << r.tag;
}

TEST(Experiments, DeterministicOutput) {
  ExperimentConfig c = default_config("rates");
  c.N = {16, 32};
  std::string a = csv(run_experiment(c)), b = csv(run_experiment(c));
  EXPECT_EQ(a, b);
  ExperimentConfig g = default_config("external-branch");
  g.N = {64};
  g.replicates = 500;
  EXPECT_EQ(csv(run_experiment(g)), csv(run_experiment(g)));
  ExperimentConfig h = g;
  h.seed = 2;
  EXPECT_NE(csv(run_experiment(g)), csv(run_experiment(h)));
}

TEST(Experiments, DispatchByName) {
  ExperimentConfig c = default_config("rates");
  c.N = {16};
  for (const ResultRow& r : run_experiment(c)) EXPECT_EQ(r.experiment, "rates");
  c.experiment = "bogus";
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
}

TEST(Experiments, StepBoundsRowShape) {
  ExperimentConfig c = default_config("step-bounds");
  c.N = {8};
  c.steps = 200;
  std::vector<ResultRow> rows = run_experiment(c);
  ASSERT_EQ(rows.size(), 3 * c.laws.size());
  for (std::size_t k = 0; k < rows.size(); k += 3) {
    EXPECT_NE(rows[k].tag.find("certificate verifies"), std::string::npos);
    EXPECT_NE(rows[k + 1].tag.find("2(N-#L)"), std::string::npos);
    EXPECT_NE(rows[k + 2].tag.find("3(N-#L)"), std::string::npos);
    EXPECT_TRUE(rows[k].pass) << rows[k].tag;
    EXPECT_TRUE(rows[k + 2].pass) << rows[k + 2].tag;
    for (std::size_t q = k; q < k + 3; ++q) {
      EXPECT_EQ(rows[q].reference, 0.0);
      EXPECT_EQ(rows[q].agree, rows[q].estimate == 0.0);
    }
  }
}
