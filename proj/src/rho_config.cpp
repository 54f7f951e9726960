#include <cstdlib>
#include <map>
#include <sstream>
#include <string>

#include "indsum/errors.hpp"
#include "indsum/karlin.hpp"

namespace indsum::karlin {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double number(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw DomainError("rho spec: missing '" + key + "'");
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') throw DomainError("rho spec: '" + key + "' is not a number");
  return v;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

RhoSpec parse_rho_spec(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw DomainError("rho spec line " + std::to_string(lineno) + ": expected key = value");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  const auto it = kv.find("variant");
  if (it == kv.end()) throw DomainError("rho spec: missing 'variant'");
  const std::string& v = it->second;
  std::size_t expected = 2;
  RhoSpec spec;
  if (v == "powerlaw") {
    spec.variant = PowerLaw{number(kv, "alpha")};
  } else if (v == "borderline") {
    spec.variant = BorderlinePower{number(kv, "log_exponent")};
  } else if (v == "dehaan_poly") {
    spec.variant = DeHaanPoly{number(kv, "beta")};
  } else if (v == "dehaan_stretched") {
    spec.variant = DeHaanStretched{number(kv, "sigma"), number(kv, "lambda")};
    expected = 3;
  } else if (v == "explicit") {
    const auto p = kv.find("probabilities");
    if (p == kv.end()) throw DomainError("rho spec: missing 'probabilities'");
    Explicit e;
    std::istringstream ps(p->second);
    std::string item;
    while (std::getline(ps, item, ',')) {
      item = trim(item);
      char* end = nullptr;
      const double x = std::strtod(item.c_str(), &end);
      if (item.empty() || *end != '\0') throw DomainError("rho spec: bad probability '" + item + "'");
      e.probabilities.push_back(x);
    }
    spec.variant = std::move(e);
  } else {
    throw DomainError("rho spec: unknown variant '" + v + "'");
  }
  if (kv.size() != expected) throw DomainError("rho spec: unexpected keys for variant '" + v + "'");
  validate(spec);
  return spec;
}

std::string format_rho_spec(const RhoSpec& spec) {
  std::ostringstream os;
  os << "variant = " << variant_name(spec) << '\n';
  if (const auto* p = std::get_if<PowerLaw>(&spec.variant)) os << "alpha = " << fmt(p->alpha) << '\n';
  if (const auto* p = std::get_if<BorderlinePower>(&spec.variant)) os << "log_exponent = " << fmt(p->log_exponent) << '\n';
  if (const auto* p = std::get_if<DeHaanPoly>(&spec.variant)) os << "beta = " << fmt(p->beta) << '\n';
  if (const auto* p = std::get_if<DeHaanStretched>(&spec.variant))
    os << "sigma = " << fmt(p->sigma) << '\n' << "lambda = " << fmt(p->lambda) << '\n';
  if (const auto* p = std::get_if<Explicit>(&spec.variant)) {
    os << "probabilities = ";
    for (std::size_t i = 0; i < p->probabilities.size(); ++i) os << (i ? ", " : "") << fmt(p->probabilities[i]);
    os << '\n';
  }
  return os.str();
}

}  // namespace indsum::karlin
