#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "indsum/accuracy.hpp"
#include "indsum/report.hpp"
#include "indsum/rng.hpp"

namespace indsum {

using Index = std::uint64_t;

enum class Moment { Mean, Variance };

// X(t) = sum_k 1{A_k(t)} with independent events, A_k(s) inside A_k(t) for
// s <= t. Indices start at 1.
class IndicatorModel {
 public:
  virtual ~IndicatorModel() = default;

  virtual std::string id() const = 0;

  virtual double prob(Index k, double t) const = 0;
  virtual double complement(Index k, double t) const { return 1.0 - prob(k, t); }

  // K with sum_{k>K} prob(k,t) < eps.
  virtual Index truncation_index(double t, double eps) const = 0;
  // k0 with sum_{k<=k0} complement(k,t) < eps. The default scans upwards.
  virtual Index saturation_index(double t, double eps) const;
  // Beyond this index prob(k, t) is nonincreasing in k and the sampler may
  // switch to thinning.
  virtual Index dense_sampling_limit(double t, double eps) const { return truncation_index(t, eps); }

  // Draws T_k = inf{t : A_k(t) occurs}.
  virtual double sample_activation(Index k, RandomStream& rng) const = 0;

  virtual double mu() const = 0;
  virtual double q() const { return 0.0; }

  // Moment series are summed directly over (saturation, series_cutoff] and
  // tail_sum supplies the remainder beyond the cutoff.
  virtual Index series_cutoff(double t, const Accuracy& acc) const {
    return truncation_index(t, 0.5 * acc.abs_tol);
  }
  virtual double tail_sum(Moment, Index /*from*/, double /*t*/, const Accuracy&) const { return 0.0; }

  virtual std::optional<double> closed_form_mean(double) const { return std::nullopt; }
  virtual std::optional<double> closed_form_variance(double) const { return std::nullopt; }
};

// Finitely many indicators with fixed activation times; prob is 0 or 1.
class FixedTimesModel final : public IndicatorModel {
 public:
  explicit FixedTimesModel(std::vector<double> times, double mu = 1.0);
  std::string id() const override { return "fixed_times"; }
  double prob(Index k, double t) const override;
  Index truncation_index(double, double) const override { return times_.size(); }
  double sample_activation(Index k, RandomStream&) const override { return times_.at(k - 1); }
  double mu() const override { return mu_; }

 private:
  std::vector<double> times_;
  double mu_;
};

// b(t) = E X(t) and a(t) = Var X(t).
double mean_b(const IndicatorModel& model, double t, const Accuracy& acc = {}, int workers = 1);
double var_a(const IndicatorModel& model, double t, const Accuracy& acc = {}, int workers = 1);
// Single-threaded reference kernels with the same summation order.
double mean_b_serial(const IndicatorModel& model, double t, const Accuracy& acc = {});
double var_a_serial(const IndicatorModel& model, double t, const Accuracy& acc = {});

// b and a, preferring closed forms when the model has them.
double model_mean(const IndicatorModel& model, double t, const Accuracy& acc = {}, int workers = 1);
double model_variance(const IndicatorModel& model, double t, const Accuracy& acc = {}, int workers = 1);

struct PathSample {
  std::vector<double> grid;
  std::vector<std::int64_t> counts;
  SeedRecord seed;
};

// Sampling plan shared by all replicates on the same grid.
struct PathPlan {
  std::vector<double> grid;
  Index saturated = 0;  // indices <= saturated are counted as on at grid[0]
  Index dense_end = 0;  // (saturated, dense_end] sampled one by one
  Index cutoff = 0;     // (dense_end, cutoff] sampled by thinning
};

PathPlan make_path_plan(const IndicatorModel& model, std::vector<double> grid, double eps,
                        const Accuracy& acc = {});
PathSample sample_path(const IndicatorModel& model, const PathPlan& plan, RandomStream& rng);
PathSample sample_path(const IndicatorModel& model, const std::vector<double>& grid, double eps,
                       RandomStream& rng);

// X(t) for replicates 0..n-1, replicate r drawn from stream (seed, r).
std::vector<std::int64_t> sample_counts(const IndicatorModel& model, double t, std::uint64_t n,
                                        std::uint64_t seed, double eps = 1e-6, int workers = 1);
std::vector<std::int64_t> sample_counts_serial(const IndicatorModel& model, double t,
                                               std::uint64_t n, std::uint64_t seed,
                                               double eps = 1e-6);

struct BoundCheck {
  ValidationReport report;
  // Empirical E exp(theta X*) / exp(theta^2 e^|theta| a / 2)
  double centered_ratio = 0.0;
  double centered_stderr = 0.0;
  bool centered_pass = false;
  // Empirical E exp(theta X) / exp((e^theta - 1) b)
  double raw_ratio = 0.0;
  double raw_stderr = 0.0;
  bool raw_pass = false;
};

BoundCheck exp_moment_bound_check(const IndicatorModel& model, double t, double theta,
                                  std::uint64_t n_samples, std::uint64_t seed, int workers = 1,
                                  const Accuracy& acc = {});
// Same check on precomputed samples of X(t).
BoundCheck exp_moment_bound_check(const std::string& model_id, double t, double theta,
                                  const std::vector<std::int64_t>& samples, double b, double a);

enum class GridKind { Upper, Lower };

struct CheckpointGrid {
  GridKind kind = GridKind::Upper;
  double kappa = 0.0;
  double varrho = 0.0;
  double gamma = 0.0;
  std::vector<double> levels;
  std::vector<double> times;
  std::vector<bool> at_lower_horizon;
};

struct GridOptions {
  double rel_tol = 1e-9;
  double lower_horizon = 1e-12;
  double upper_horizon = 1e300;
};

// v_n and w_n level sequences.
std::vector<double> upper_levels(double mu, double q, double kappa, double varrho, Index n_max);
std::vector<double> lower_levels(double mu, double q, double gamma, Index n_max);

CheckpointGrid upper_grid(const IndicatorModel& model, double kappa, double varrho, Index n_max,
                          const Accuracy& acc = {}, const GridOptions& opts = {});
CheckpointGrid lower_grid(const IndicatorModel& model, double gamma, Index n_max,
                          const Accuracy& acc = {}, const GridOptions& opts = {});

}  // namespace indsum
