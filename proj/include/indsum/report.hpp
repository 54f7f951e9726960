#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace indsum {

inline constexpr int kSchemaVersion = 1;

enum class Verdict { Pass, Fail, Informational };

const char* to_string(Verdict v);

struct ValidationReport {
  std::string statistic;
  std::string model;
  double t = 0.0;
  std::uint64_t samples = 0;
  double estimate = 0.0;
  double target = 0.0;
  double stderr_ = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Informational;
};

// One JSON object per line.
std::string to_json_line(const ValidationReport& r);
void write_json_lines(std::ostream& os, const std::vector<ValidationReport>& reports);

}  // namespace indsum
