#include "indsum/cli.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "indsum/core.hpp"
#include "indsum/errors.hpp"
#include "indsum/ginibre.hpp"
#include "indsum/karlin.hpp"
#include "indsum/montecarlo.hpp"
#include "indsum/report.hpp"

namespace indsum::cli {

namespace {

using json = nlohmann::ordered_json;

struct RunConfig {
  std::string model = "ginibre";
  std::string variant;
  double alpha = 0.5;
  double log_exponent = 2.0;
  double beta = 1.0;
  double sigma = 1.0;
  double lambda = 0.5;
  std::string config_path;
  unsigned j = 1;
  std::vector<double> t;
  bool constants = false;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::uint64_t n = 100000;
  std::vector<double> theta;
  std::vector<double> p;
  double gamma = 0.1;
  double kappa = 0.5;
  double varrho = 0.5;
  std::uint64_t n_max = 50;
  std::uint64_t paths = 1;
  std::string format = "json";
  std::string out_path;
  std::string sidecar_path;
  Accuracy acc;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::unique_ptr<IndicatorModel> make_model(const RunConfig& c) {
  if (c.model == "ginibre") return std::make_unique<ginibre::GinibreModel>();
  if (c.model != "karlin") throw ConfigError("--model must be ginibre or karlin");
  karlin::RhoSpec spec;
  if (!c.config_path.empty()) {
    std::ifstream in(c.config_path);
    if (!in) throw ConfigError("cannot read config file " + c.config_path);
    std::stringstream ss;
    ss << in.rdbuf();
    spec = karlin::parse_rho_spec(ss.str());
  } else if (c.variant == "powerlaw") {
    spec.variant = karlin::PowerLaw{c.alpha};
  } else if (c.variant == "borderline") {
    spec.variant = karlin::BorderlinePower{c.log_exponent};
  } else if (c.variant == "dehaan_poly") {
    spec.variant = karlin::DeHaanPoly{c.beta};
  } else if (c.variant == "dehaan_stretched") {
    spec.variant = karlin::DeHaanStretched{c.sigma, c.lambda};
  } else {
    throw ConfigError("--variant must be powerlaw, borderline, dehaan_poly or dehaan_stretched (or use --config)");
  }
  return std::make_unique<karlin::KarlinModel>(spec, c.j);
}

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw ConfigError("cannot open output file " + path);
    }
    os_ = path.empty() ? &fallback : &file_;
  }
  std::ostream& stream() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

json constants_json(const karlin::ConstantSet& c) {
  json j;
  j["mean_constant"] = c.mean_constant;
  j["mean_scale"] = c.mean_scale;
  j["variance_constant"] = c.variance_constant;
  j["variance_scale"] = c.variance_scale;
  j["kstar_constant"] = c.kstar_constant;
  j["kstar_scale"] = c.kstar_scale;
  j["lil_constant"] = c.lil_constant;
  j["lil_regime"] = karlin::to_string(c.regime);
  j["upper_bound_only"] = c.upper_bound_only;
  return j;
}

int cmd_stats(const RunConfig& c, std::ostream& out) {
  if (c.t.empty() && !c.constants) throw ConfigError("stats needs at least one --t (or --constants)");
  if (c.format != "json" && c.format != "csv") throw ConfigError("--format must be json or csv");
  const auto model = make_model(c);
  const auto* km = dynamic_cast<const karlin::KarlinModel*>(model.get());
  std::optional<karlin::ConstantSet> cs;
  if (km && (c.constants || !c.t.empty())) {
    try {
      cs = karlin::asymptotic_constants(km->boxes().spec(), km->j());
    } catch (const DomainError&) {
      if (c.constants) throw;
    }
  }

  std::vector<json> points;
  for (double t : c.t) {
    if (!(t >= 0.0)) throw ConfigError("--t must be >= 0");
    json p;
    p["t"] = t;
    p["mean_b"] = mean_b(*model, t, c.acc, c.workers);
    p["var_a"] = var_a(*model, t, c.acc, c.workers);
    if (!km) {
      p["mean_closed_form"] = t;
      p["var_exact"] = ginibre::var_exact(t);
      if (t > 0.0) {
        p["var_asymptotic"] = ginibre::var_asymptotic(t);
        p["var_two_term"] = ginibre::var_two_term(t);
        p["var_ratio_asymptotic"] = ginibre::var_exact(t) / ginibre::var_asymptotic(t);
      }
    } else {
      p["mean_kstar"] = karlin::mean_Kj_star(*km, t, c.acc, c.workers);
      if (t > 1.0) p["rho_hat"] = karlin::rho_eval(km->boxes(), t);
      if (cs && t > 1.0) {
        const double sm = karlin::growth_scale(km->boxes(), cs->mean_scale, t);
        const double sv = karlin::growth_scale(km->boxes(), cs->variance_scale, t);
        if (sm > 0.0) p["mean_ratio"] = p["mean_b"].get<double>() / sm;
        if (sv > 0.0) p["var_ratio"] = p["var_a"].get<double>() / sv;
      }
    }
    points.push_back(std::move(p));
  }

  if (c.format == "csv") {
    std::vector<std::string> cols;
    for (const auto& p : points)
      for (const auto& [k, v] : p.items())
        if (std::find(cols.begin(), cols.end(), k) == cols.end()) cols.push_back(k);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (const auto& p : points) {
      for (std::size_t i = 0; i < cols.size(); ++i) {
        out << (i ? "," : "");
        if (p.contains(cols[i])) out << p[cols[i]].dump();
      }
      out << '\n';
    }
    return kOk;
  }
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = "stats";
  j["model"] = model->id();
  j["mu"] = model->mu();
  j["q"] = model->q();
  j["points"] = points;
  if (cs) j["constants"] = constants_json(*cs);
  if (!km) {
    j["constants"] = {{"lil_constant", mc::lil_constants(*model).theorem_constant}, {"lil_regime", "log"}};
  }
  out << j.dump(2) << '\n';
  return kOk;
}

std::uint64_t require_seed(const RunConfig& c) {
  if (!c.seed) throw ConfigError("stochastic command needs --seed (or INDSUM_SEED)");
  return *c.seed;
}

int cmd_validate(const std::string& suite, const RunConfig& c, std::ostream& out) {
  const std::uint64_t seed = require_seed(c);
  if (c.t.size() != 1) throw ConfigError("validate needs exactly one --t");
  const auto model = make_model(c);
  const double t = c.t.front();
  mc::McConfig mcfg;
  mcfg.seed = seed;
  mcfg.workers = c.workers;
  mcfg.acc = c.acc;

  std::vector<ValidationReport> reports;
  if (suite == "clt") {
    reports.push_back(mc::clt_report(*model, t, c.n, mcfg));
  } else if (suite == "expmoment" || suite == "absmoment") {
    const bool is_exp = suite == "expmoment";
    const auto& params = is_exp ? c.theta : c.p;
    if (params.empty()) throw ConfigError(is_exp ? "expmoment needs --theta" : "absmoment needs --p");
    for (double v : params) {
      if (is_exp && !(std::fabs(v) <= 2.0)) throw ConfigError("--theta must satisfy |theta| <= 2");
      if (!is_exp && !(v > 0.0 && v <= 6.0)) throw ConfigError("--p must be in (0, 6]");
    }
    if (c.n < 100000) throw ConfigError("moment suites need --n >= 100000");
    const double b = model_mean(*model, t, c.acc, c.workers);
    const double a = model_variance(*model, t, c.acc, c.workers);
    const auto z = mc::standardize(sample_counts(*model, t, c.n, seed, mcfg.eps, c.workers), b, a);
    for (double v : params)
      reports.push_back(is_exp ? mc::exp_moment_report(model->id(), t, v, z, a)
                               : mc::abs_moment_report(model->id(), t, v, z));
  } else if (suite == "bounds") {
    if (c.theta.empty()) throw ConfigError("bounds needs --theta");
    if (c.n < 10000) throw ConfigError("bounds needs --n >= 10000");
    const double b = model_mean(*model, t, c.acc, c.workers);
    const double a = model_variance(*model, t, c.acc, c.workers);
    const auto xs = sample_counts(*model, t, c.n, seed, mcfg.eps, c.workers);
    for (double v : c.theta) reports.push_back(exp_moment_bound_check(model->id(), t, v, xs, b, a).report);
  } else {
    throw ConfigError("unknown validate suite '" + suite + "'");
  }
  write_json_lines(out, reports);
  for (const auto& r : reports)
    if (r.verdict == Verdict::Fail) return kValidationFailure;
  return kOk;
}

int cmd_lil_trace(const RunConfig& c, std::ostream& out) {
  const std::uint64_t seed = require_seed(c);
  if (c.n_max < 1) throw ConfigError("--n-max must be >= 1");
  if (c.paths < 1) throw ConfigError("--paths must be >= 1");
  if (!(c.gamma > 0.0)) throw ConfigError("--gamma must be > 0");
  const auto model = make_model(c);
  mc::McConfig mcfg;
  mcfg.seed = seed;
  mcfg.workers = c.workers;
  mcfg.acc = c.acc;
  const auto traces = mc::lil_trace_ensemble(*model, c.gamma, c.n_max, c.paths, mcfg);
  for (const auto& tr : traces)
    for (std::size_t i = 1; i < tr.running_max.size(); ++i)
      if (!(tr.running_max[i] >= tr.running_max[i - 1])) throw NumericalError("lil-trace: running max decreased");

  Output csv(c.out_path, out);
  mc::write_trace_csv(csv.stream(), traces.front());
  const std::string sidecar = mc::trace_sidecar_json(*model, traces, c.n_max);
  std::string side_path = c.sidecar_path;
  if (side_path.empty() && !c.out_path.empty()) side_path = c.out_path + ".json";
  if (side_path.empty()) {
    out << sidecar << '\n';
  } else {
    std::ofstream s(side_path);
    if (!s) throw ConfigError("cannot open sidecar file " + side_path);
    s << sidecar << '\n';
  }
  return kOk;
}

int cmd_grid(const std::string& kind, const RunConfig& c, std::ostream& out) {
  const auto model = make_model(c);
  const auto g = kind == "upper" ? upper_grid(*model, c.kappa, c.varrho, c.n_max, c.acc)
                                 : lower_grid(*model, c.gamma, c.n_max, c.acc);
  out << "n,level,time,at_lower_horizon\n";
  char buf[128];
  for (std::size_t i = 0; i < g.levels.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%d\n", i + 1, g.levels[i], g.times[i],
                  g.at_lower_horizon[i] ? 1 : 0);
    out << buf;
  }
  return kOk;
}

void add_model_options(CLI::App* app, RunConfig& c) {
  app->add_option("--model", c.model, "ginibre or karlin");
  app->add_option("--variant", c.variant, "powerlaw, borderline, dehaan_poly, dehaan_stretched");
  app->add_option("--alpha", c.alpha);
  app->add_option("--log-exponent", c.log_exponent);
  app->add_option("--beta", c.beta);
  app->add_option("--sigma", c.sigma);
  app->add_option("--lambda", c.lambda);
  app->add_option("--config", c.config_path, "box family as a key = value file");
  app->add_option("--j", c.j, "occupancy threshold")->check(CLI::PositiveNumber);
  app->add_option("--workers", c.workers)->check(CLI::NonNegativeNumber);
  app->add_option("--abs-tol", c.acc.abs_tol);
  app->add_option("--max-terms", c.acc.max_terms);
}

void add_seed_option(CLI::App* app, RunConfig& c) {
  app->add_option_function<std::uint64_t>("--seed", [&c](const std::uint64_t& s) { c.seed = s; });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  if (const char* s = std::getenv("INDSUM_SEED")) {
    try {
      c.seed = std::stoull(s);
    } catch (const std::exception&) {
      err << "error: INDSUM_SEED is not an unsigned integer\n";
      return kConfigError;
    }
  }
  if (const char* w = std::getenv("INDSUM_WORKERS")) {
    try {
      c.workers = std::stoi(w);
    } catch (const std::exception&) {
      err << "error: INDSUM_WORKERS is not an integer\n";
      return kConfigError;
    }
  }

  CLI::App app{"Sums of independent indicators: Ginibre and Karlin evaluators and Monte Carlo checks"};
  app.require_subcommand(1);

  auto* stats = app.add_subcommand("stats", "exact b(t), a(t), closed forms and constants");
  add_model_options(stats, c);
  stats->add_option("--t", c.t, "time point (repeatable)");
  stats->add_flag("--constants", c.constants, "include asymptotic constants");
  stats->add_option("--format", c.format, "json or csv");
  stats->add_option("--out", c.out_path);

  auto* validate = app.add_subcommand("validate", "Monte Carlo validation suites");
  std::string suite;
  validate->add_option("suite", suite, "clt | expmoment | absmoment | bounds")->required();
  add_model_options(validate, c);
  add_seed_option(validate, c);
  validate->add_option("--t", c.t);
  validate->add_option("--n", c.n, "replicates");
  validate->add_option("--theta", c.theta);
  validate->add_option("--p", c.p);
  validate->add_option("--out", c.out_path);

  auto* lil = app.add_subcommand("lil-trace", "LIL trace along the lower checkpoint grid");
  add_model_options(lil, c);
  add_seed_option(lil, c);
  lil->add_option("--gamma", c.gamma);
  lil->add_option("--n-max", c.n_max);
  lil->add_option("--paths", c.paths);
  lil->add_option("--out", c.out_path, "CSV path");
  lil->add_option("--sidecar", c.sidecar_path, "JSON sidecar path (default: <out>.json)");

  auto* grid = app.add_subcommand("grid", "checkpoint grids");
  std::string kind;
  grid->add_option("kind", kind, "upper | lower")->required()->check(CLI::IsMember({"upper", "lower"}));
  add_model_options(grid, c);
  grid->add_option("--kappa", c.kappa);
  grid->add_option("--varrho", c.varrho);
  grid->add_option("--gamma", c.gamma);
  grid->add_option("--n-max", c.n_max);
  grid->add_option("--out", c.out_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    c.acc.validate();
    if (stats->parsed()) {
      Output o(c.out_path, out);
      return cmd_stats(c, o.stream());
    }
    if (validate->parsed()) {
      Output o(c.out_path, out);
      return cmd_validate(suite, c, o.stream());
    }
    if (lil->parsed()) return cmd_lil_trace(c, out);
    if (grid->parsed()) {
      Output o(c.out_path, out);
      return cmd_grid(kind, c, o.stream());
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const PreconditionError& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  }
  return kConfigError;
}

}  // namespace indsum::cli
