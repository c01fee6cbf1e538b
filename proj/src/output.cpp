#include <cstdio>
#include <ostream>
#include <string>

#include <json.hpp>

#include "cfv/harness.hpp"

namespace cfv {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string opt(const std::optional<double>& x) { return x ? num(*x) : ""; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << "experiment,N,tag,estimate,reference,abs_error,ci_low,ci_high,pvalue,agree,expected,pass\n";
  for (const ResultRow& r : rows)
    os << csv_field(r.experiment) << ',' << r.N << ',' << csv_field(r.tag) << ',' << num(r.estimate) << ','
       << num(r.reference) << ',' << num(r.abs_error) << ',' << opt(r.ci_low) << ',' << opt(r.ci_high) << ','
       << opt(r.pvalue) << ',' << (r.agree ? "true" : "false") << ',' << r.expected << ','
       << (r.pass ? "true" : "false") << '\n';
}

void write_json(std::ostream& os, const std::vector<ResultRow>& rows) {
  nlohmann::json arr = nlohmann::json::array();
  auto o = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  for (const ResultRow& r : rows)
    arr.push_back({{"experiment", r.experiment},
                   {"N", r.N},
                   {"tag", r.tag},
                   {"estimate", r.estimate},
                   {"reference", r.reference},
                   {"abs_error", r.abs_error},
                   {"ci_low", o(r.ci_low)},
                   {"ci_high", o(r.ci_high)},
                   {"pvalue", o(r.pvalue)},
                   {"agree", r.agree},
                   {"expected", r.expected},
                   {"pass", r.pass}});
  os << arr.dump(2) << '\n';
}

}  // namespace cfv
