#include "indsum/report.hpp"

#include <ostream>

#include <json.hpp>

namespace indsum {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::Informational: return "informational";
  }
  return "informational";
}

std::string to_json_line(const ValidationReport& r) {
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["statistic"] = r.statistic;
  j["model"] = r.model;
  j["t"] = r.t;
  j["samples"] = r.samples;
  j["estimate"] = r.estimate;
  j["target"] = r.target;
  j["stderr"] = r.stderr_;
  j["tolerance"] = r.tolerance;
  j["verdict"] = to_string(r.verdict);
  return j.dump();
}

void write_json_lines(std::ostream& os, const std::vector<ValidationReport>& reports) {
  for (const auto& r : reports) os << to_json_line(r) << '\n';
}

}  // namespace indsum
