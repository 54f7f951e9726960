#include "indsum/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "indsum/errors.hpp"
#include "indsum/ginibre.hpp"
#include "indsum/karlin.hpp"
#include "indsum/parallel.hpp"
#include "indsum/specfun.hpp"

namespace indsum::mc {

namespace {

std::string label(const char* name, const char* key, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s(%s=%g)", name, key, v);
  return buf;
}

struct MeanErr {
  double mean;
  double stderr_;
};

// Fixed-order pairwise summation.
double pairwise(const double* x, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise(x, h) + pairwise(x + h, n - h);
}

MeanErr mean_stderr(const std::vector<double>& x) {
  const double n = static_cast<double>(x.size());
  const double m = pairwise(x.data(), x.size()) / n;
  std::vector<double> d(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - m) * (x[i] - m);
  const double var = x.size() > 1 ? pairwise(d.data(), d.size()) / (n - 1.0) : 0.0;
  return {m, std::sqrt(var / n)};
}

struct Moments {
  double b;
  double a;
};

Moments moments_of(const IndicatorModel& model, double t, const McConfig& cfg) {
  return {model_mean(model, t, cfg.acc, cfg.workers), model_variance(model, t, cfg.acc, cfg.workers)};
}

}  // namespace

double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf) {
  if (sorted.empty()) throw PreconditionError("ks_statistic: no samples");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

double ks_critical_value(double level, std::uint64_t n) {
  if (!(level > 0.0 && level < 1.0)) throw DomainError("ks_critical_value: level must be in (0,1)");
  const double c = std::sqrt(-0.5 * std::log(0.5 * level));
  const double rn = std::sqrt(static_cast<double>(n));
  return c / (rn + 0.12 + 0.11 / rn);
}

double abs_normal_moment(double p) {
  return std::exp(0.5 * p * std::numbers::ln2 + specfun::log_gamma(0.5 * (p + 1.0))) / std::sqrt(std::numbers::pi);
}

std::vector<double> standardize(const std::vector<std::int64_t>& samples, double b, double a) {
  if (!(a > 0.0)) throw PreconditionError("standardize: variance must be > 0");
  const double s = std::sqrt(a);
  std::vector<double> z(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) z[i] = (static_cast<double>(samples[i]) - b) / s;
  return z;
}

ValidationReport clt_report(const std::string& model_id, double t, const std::vector<std::int64_t>& samples,
                            double b, double a) {
  if (!(a >= 25.0)) throw PreconditionError("clt_report: needs Var X(t) >= 25");
  if (samples.size() < 10000) throw PreconditionError("clt_report: needs >= 1e4 samples");
  auto z = standardize(samples, b, a);
  std::sort(z.begin(), z.end());
  ValidationReport r;
  r.statistic = "clt_ks";
  r.model = model_id;
  r.t = t;
  r.samples = z.size();
  r.estimate = ks_statistic(z, specfun::normal_cdf);
  r.target = 0.0;
  r.stderr_ = 1.0 / std::sqrt(static_cast<double>(z.size()));
  r.tolerance = ks_critical_value(0.001, z.size()) + 1.0 / std::sqrt(a);
  r.verdict = r.estimate < r.tolerance ? Verdict::Pass : Verdict::Fail;
  return r;
}

ValidationReport clt_report(const IndicatorModel& model, double t, std::uint64_t n_samples, const McConfig& cfg) {
  const auto m = moments_of(model, t, cfg);
  if (!(m.a >= 25.0)) throw PreconditionError("clt_report: needs Var X(t) >= 25");
  if (n_samples < 10000) throw PreconditionError("clt_report: needs >= 1e4 samples");
  return clt_report(model.id(), t, sample_counts(model, t, n_samples, cfg.seed, cfg.eps, cfg.workers), m.b, m.a);
}

ValidationReport exp_moment_report(const std::string& model_id, double t, double theta, const std::vector<double>& z,
                                   double a) {
  if (!(std::fabs(theta) <= 2.0)) throw PreconditionError("exp_moment_report: |theta| must be <= 2");
  if (z.size() < 100000) throw PreconditionError("exp_moment_report: needs >= 1e5 samples");
  std::vector<double> e(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) e[i] = std::exp(theta * z[i]);
  const auto ms = mean_stderr(e);
  ValidationReport r;
  r.statistic = label("exp_moment", "theta", theta);
  r.model = model_id;
  r.t = t;
  r.samples = z.size();
  r.estimate = ms.mean;
  r.target = std::exp(0.5 * theta * theta);
  r.stderr_ = ms.stderr_;
  r.tolerance = 5.0 * ms.stderr_ + std::pow(std::fabs(theta), 3) / std::sqrt(a);
  r.verdict = std::fabs(r.estimate - r.target) <= r.tolerance ? Verdict::Pass : Verdict::Fail;
  return r;
}

ValidationReport exp_moment_report(const IndicatorModel& model, double t, double theta, std::uint64_t n_samples,
                                   const McConfig& cfg) {
  if (!(std::fabs(theta) <= 2.0)) throw PreconditionError("exp_moment_report: |theta| must be <= 2");
  if (n_samples < 100000) throw PreconditionError("exp_moment_report: needs >= 1e5 samples");
  const auto m = moments_of(model, t, cfg);
  const auto z = standardize(sample_counts(model, t, n_samples, cfg.seed, cfg.eps, cfg.workers), m.b, m.a);
  return exp_moment_report(model.id(), t, theta, z, m.a);
}

ValidationReport abs_moment_report(const std::string& model_id, double t, double p, const std::vector<double>& z) {
  if (!(p > 0.0 && p <= 6.0)) throw PreconditionError("abs_moment_report: p must be in (0, 6]");
  if (z.size() < 100000) throw PreconditionError("abs_moment_report: needs >= 1e5 samples");
  std::vector<double> e(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) e[i] = std::pow(std::fabs(z[i]), p);
  const auto ms = mean_stderr(e);
  ValidationReport r;
  r.statistic = label("abs_moment", "p", p);
  r.model = model_id;
  r.t = t;
  r.samples = z.size();
  r.estimate = ms.mean;
  r.target = abs_normal_moment(p);
  r.stderr_ = ms.stderr_;
  r.tolerance = 5.0 * ms.stderr_;
  r.verdict = std::fabs(r.estimate - r.target) <= r.tolerance ? Verdict::Pass : Verdict::Fail;
  return r;
}

ValidationReport abs_moment_report(const IndicatorModel& model, double t, double p, std::uint64_t n_samples,
                                   const McConfig& cfg) {
  if (!(p > 0.0 && p <= 6.0)) throw PreconditionError("abs_moment_report: p must be in (0, 6]");
  if (n_samples < 100000) throw PreconditionError("abs_moment_report: needs >= 1e5 samples");
  const auto m = moments_of(model, t, cfg);
  const auto z = standardize(sample_counts(model, t, n_samples, cfg.seed, cfg.eps, cfg.workers), m.b, m.a);
  return abs_moment_report(model.id(), t, p, z);
}

LilConstants lil_constants(const IndicatorModel& model) {
  if (dynamic_cast<const ginibre::GinibreModel*>(&model)) return {std::pow(std::numbers::pi, -0.25), "log", false};
  if (const auto* k = dynamic_cast<const karlin::KarlinModel*>(&model)) {
    const auto c = karlin::asymptotic_constants(k->boxes().spec(), k->j());
    return {c.lil_constant, karlin::to_string(c.regime), c.upper_bound_only};
  }
  return {1.0, model.mu() > 1.0 ? "log" : "loglog", false};
}

double lil_normalizer(double mu, double q, double a) {
  if (mu > 1.0) return std::sqrt(2.0 * (mu - 1.0) * a * std::log(a));
  return std::sqrt(2.0 * (q + 1.0) * a * std::log(std::log(a)));
}

LilTrace lil_trace(const IndicatorModel& model, double gamma, Index n_max, std::uint64_t seed, std::uint64_t path,
                   const McConfig& cfg) {
  if (n_max < 1) throw DomainError("lil_trace: n_max must be >= 1");
  const auto grid = lower_grid(model, gamma, n_max, cfg.acc);
  const double mu = model.mu();
  const double q = model.q();

  LilTrace tr;
  tr.model = model.id();
  tr.gamma = gamma;
  tr.mu = mu;
  tr.q = q;
  tr.regime = mu > 1.0 ? "log" : "loglog";

  std::vector<double> times;
  std::vector<Index> ns;
  std::vector<double> bs;
  std::vector<double> norms;
  for (Index i = 0; i < grid.times.size(); ++i) {
    const double tau = grid.times[i];
    if (grid.at_lower_horizon[i]) continue;
    if (!times.empty() && !(tau > times.back())) continue;
    const double a = model_variance(model, tau, cfg.acc);
    if (!(a > 1.0)) continue;
    const double logf = mu > 1.0 ? std::log(a) : std::log(std::log(a));
    if (!(logf >= kLilWarmup)) continue;
    times.push_back(tau);
    ns.push_back(i + 1);
    bs.push_back(model_mean(model, tau, cfg.acc));
    norms.push_back(lil_normalizer(mu, q, a));
  }
  if (times.empty()) throw HorizonError("lil_trace: no checkpoint past the warm-up within n_max");

  RandomStream rng(seed, path);
  const auto ps = sample_path(model, make_path_plan(model, times, cfg.eps, cfg.acc), rng);
  tr.seed = ps.seed;
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double v = (static_cast<double>(ps.counts[i]) - bs[i]) / norms[i];
    hi = std::max(hi, v);
    lo = std::min(lo, v);
    tr.n.push_back(ns[i]);
    tr.tau.push_back(times[i]);
    tr.value.push_back(v);
    tr.running_max.push_back(hi);
    tr.running_min.push_back(lo);
  }
  return tr;
}

std::vector<LilTrace> lil_trace_ensemble(const IndicatorModel& model, double gamma, Index n_max, std::uint64_t paths,
                                         const McConfig& cfg) {
  std::vector<LilTrace> out(paths);
  if (paths == 0) return out;
  out[0] = lil_trace(model, gamma, n_max, cfg.seed, 0, cfg);
  const int w = parallel::resolve_workers(cfg.workers);
  // the grid is deterministic; the first trace is computed up front so that
  // errors surface before the parallel region
#pragma omp parallel for schedule(dynamic, 1) num_threads(w) if (w > 1)
  for (std::int64_t p = 1; p < static_cast<std::int64_t>(paths); ++p)
    out[p] = lil_trace(model, gamma, n_max, cfg.seed, static_cast<std::uint64_t>(p), cfg);
  return out;
}

void write_trace_csv(std::ostream& os, const LilTrace& trace) {
  char buf[160];
  os << "n,tau_n,value,running_max\n";
  for (std::size_t i = 0; i < trace.n.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%llu,%.17g,%.17g,%.17g\n", static_cast<unsigned long long>(trace.n[i]),
                  trace.tau[i], trace.value[i], trace.running_max[i]);
    os << buf;
  }
}

std::string trace_sidecar_json(const IndicatorModel& model, const std::vector<LilTrace>& traces, Index n_max) {
  const auto c = lil_constants(model);
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["model"] = model.id();
  j["mu"] = model.mu();
  j["q"] = model.q();
  j["regime"] = c.regime;
  j["theorem_constant"] = c.theorem_constant;
  j["normalized_constant"] = 1.0;
  j["upper_bound_only"] = c.upper_bound_only;
  j["n_max"] = n_max;
  if (!traces.empty()) {
    j["gamma"] = traces.front().gamma;
    j["seed"] = traces.front().seed.seed;
  }
  j["verdict"] = to_string(Verdict::Informational);
  auto arr = nlohmann::ordered_json::array();
  for (const auto& t : traces) {
    nlohmann::ordered_json p;
    p["stream"] = t.seed.stream;
    p["checkpoints"] = t.n.size();
    p["final_tau"] = t.tau.empty() ? 0.0 : t.tau.back();
    p["running_max"] = t.running_max.empty() ? 0.0 : t.running_max.back();
    p["running_min"] = t.running_min.empty() ? 0.0 : t.running_min.back();
    arr.push_back(p);
  }
  j["paths"] = arr;
  return j.dump(2);
}

}  // namespace indsum::mc
