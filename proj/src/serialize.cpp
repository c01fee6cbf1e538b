#include "cfv/serialize.hpp"

#include <cstdio>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace cfv {

using nlohmann::json;

namespace {

json matrix_json(const DistanceMatrix& d) { return json{{"n", d.n}, {"d", d.d}}; }

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string to_json(const DistanceMatrix& d) { return matrix_json(d).dump(); }

std::string to_json(const MarkedDistanceMatrix& rv) {
  json j = matrix_json(rv.r);
  j["v"] = rv.v;
  return j.dump();
}

std::string to_json(const TreeState& s) { return s.marked() ? to_json(s.as_marked()) : to_json(s.rho); }

TreeState tree_state_from_json(const std::string& text) {
  json j = json::parse(text);
  int n = j.at("n").get<int>();
  DistanceMatrix m(n);
  m.d = j.at("d").get<std::vector<double>>();
  if (static_cast<int>(m.d.size()) != n * n) throw std::invalid_argument("tree state: d must hold n*n entries");
  if (j.contains("v")) return TreeState(MarkedDistanceMatrix(m, j["v"].get<std::vector<double>>()));
  return TreeState(m);
}

std::string to_json(const Blocks& blocks) {
  json j = json::array();
  for (const auto& b : canonical_blocks(blocks)) {
    json blk = json::array();
    for (int i : b) blk.push_back(i + 1);
    j.push_back(blk);
  }
  return j.dump();
}

std::string to_json(const RelationCertificate& cert) {
  json rel = json::array(), cpl = json::array();
  for (auto [i, j] : cert.relation) rel.push_back({i + 1, j + 1});
  for (const auto& e : cert.coupling) cpl.push_back({{"i", e.i + 1}, {"j", e.j + 1}, {"mass", e.mass}});
  return json{{"relation", rel}, {"coupling", cpl}, {"level", cert.level}, {"scale", cert.scale}}.dump();
}

RelationCertificate certificate_from_json(const std::string& text) {
  json j = json::parse(text);
  RelationCertificate cert;
  for (const json& p : j.at("relation")) cert.relation.emplace_back(p.at(0).get<int>() - 1, p.at(1).get<int>() - 1);
  for (const json& e : j.at("coupling"))
    cert.coupling.push_back({e.at("i").get<int>() - 1, e.at("j").get<int>() - 1, e.at("mass").get<double>()});
  cert.level = j.at("level").get<double>();
  cert.scale = j.value("scale", 1.0);
  return cert;
}

void write_matrix_csv(std::ostream& os, const DistanceMatrix& d) {
  for (int i = 0; i < d.n; ++i) {
    for (int j = 0; j < d.n; ++j) os << (j ? "," : "") << num(d(i, j));
    os << '\n';
  }
}

void write_observer_csv(std::ostream& os, const std::vector<ObserverRow>& rows) {
  os << "generation,t,observable,value\n";
  for (const ObserverRow& r : rows) os << r.generation << ',' << num(r.t) << ',' << r.observable << ',' << num(r.value) << '\n';
}

}  // namespace cfv
