#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "indsum/core.hpp"
#include "indsum/report.hpp"

namespace indsum::mc {

struct McConfig {
  std::uint64_t seed = 0;
  int workers = 1;
  double eps = 1e-6;  // per-point truncation bias of the path sampler
  Accuracy acc{};
};

// sup |F_n - cdf| for ascending samples.
double ks_statistic(const std::vector<double>& sorted, const std::function<double(double)>& cdf);
// Asymptotic Kolmogorov critical value with Stephens' finite-n correction.
double ks_critical_value(double level, std::uint64_t n);

// E|N(0,1)|^p
double abs_normal_moment(double p);

// (x - b) / sqrt(a) for each sample.
std::vector<double> standardize(const std::vector<std::int64_t>& samples, double b, double a);

ValidationReport clt_report(const std::string& model_id, double t, const std::vector<std::int64_t>& samples,
                            double b, double a);
ValidationReport clt_report(const IndicatorModel& model, double t, std::uint64_t n_samples, const McConfig& cfg);

ValidationReport exp_moment_report(const std::string& model_id, double t, double theta,
                                   const std::vector<double>& z, double a);
ValidationReport exp_moment_report(const IndicatorModel& model, double t, double theta, std::uint64_t n_samples,
                                   const McConfig& cfg);

ValidationReport abs_moment_report(const std::string& model_id, double t, double p, const std::vector<double>& z);
ValidationReport abs_moment_report(const IndicatorModel& model, double t, double p, std::uint64_t n_samples,
                                   const McConfig& cfg);

struct LilConstants {
  double theorem_constant;  // limsup in the model's natural normalization
  std::string regime;       // "log" or "loglog"
  bool upper_bound_only;
};
LilConstants lil_constants(const IndicatorModel& model);

// sqrt(2 (q+1) a log log a) for mu = 1, sqrt(2 (mu-1) a log a) for mu > 1
double lil_normalizer(double mu, double q, double a);
// Checkpoints whose log factor is below this are skipped as warm-up.
inline constexpr double kLilWarmup = 0.5;

struct LilTrace {
  std::string model;
  double gamma = 0.0;
  double mu = 1.0;
  double q = 0.0;
  std::string regime;
  SeedRecord seed;
  std::vector<Index> n;
  std::vector<double> tau;
  std::vector<double> value;
  std::vector<double> running_max;
  std::vector<double> running_min;
};

LilTrace lil_trace(const IndicatorModel& model, double gamma, Index n_max, std::uint64_t seed,
                   std::uint64_t path = 0, const McConfig& cfg = {});
std::vector<LilTrace> lil_trace_ensemble(const IndicatorModel& model, double gamma, Index n_max,
                                         std::uint64_t paths, const McConfig& cfg);

// columns: n,tau_n,value,running_max
void write_trace_csv(std::ostream& os, const LilTrace& trace);
std::string trace_sidecar_json(const IndicatorModel& model, const std::vector<LilTrace>& traces, Index n_max);

}  // namespace indsum::mc
