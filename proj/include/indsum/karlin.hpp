#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "indsum/core.hpp"

namespace indsum::karlin {

// rho(t) ~ t^alpha (Z-rescaled), alpha in (0,1): p_k = k^{-1/alpha} / Z
struct PowerLaw {
  double alpha;
};
// alpha = 1 with L(t) = c (log t)^{-log_exponent}: p_k = c / (k log^b (k+2))
struct BorderlinePower {
  double log_exponent;
};
// de Haan class, ell(t) ~ (log t)^beta: 1/p_k = Z exp(((beta+1) k)^{1/(beta+1)})
struct DeHaanPoly {
  double beta;
};
// de Haan class, ell(t) ~ exp(sigma (log t)^lambda): 1/p_k = Z exp(u_k) with
// (sigma lambda)^{-1} exp(sigma u^lambda) u^{1-lambda} = k
struct DeHaanStretched {
  double sigma;
  double lambda;
};
// Finitely many boxes, probabilities given directly.
struct Explicit {
  std::vector<double> probabilities;
};

using RhoVariant = std::variant<PowerLaw, BorderlinePower, DeHaanPoly, DeHaanStretched, Explicit>;

struct RhoSpec {
  RhoVariant variant;
};

std::string variant_name(const RhoSpec& spec);
void validate(const RhoSpec& spec);

// "variant = powerlaw\nalpha = 0.5\n" style text, '#' starts a comment.
RhoSpec parse_rho_spec(const std::string& text);
std::string format_rho_spec(const RhoSpec& spec);

// Box probabilities p_1 > p_2 > ... realizing a RhoSpec.
class BoxDistribution {
 public:
  explicit BoxDistribution(RhoSpec spec, Index horizon = Index{1'000'000'000'000'000});

  const RhoSpec& spec() const { return spec_; }
  bool finite() const { return !explicit_.empty(); }
  Index size() const { return finite() ? explicit_.size() : horizon_; }
  Index horizon() const { return horizon_; }

  double p(Index k) const;
  double log_p(double x) const;
  // Real-variable extension used by the tail integrals, x >= 1.
  double p_at(double x) const;
  double inv_p(Index k) const;
  double log_z() const { return log_z_; }
  double z() const;
  double z_error() const { return z_error_; }

  // Smallest k with p_k < p_cut (size()+1 when there is none).
  Index first_below(double p_cut) const;
  // #{k : 1/p_k <= t}
  Index count_inv_below(double t) const;

  // sum_{k >= from} g(p_k) for g vanishing at 0: direct terms then an
  // Euler-Maclaurin tail. err receives an estimate of the tail error.
  double sum_from(Index from, const std::function<double(double)>& g, double* err = nullptr) const;
  // int_{x0}^inf g(p_at(x)) dx
  double integral_from(double x0, const std::function<double(double)>& g, double* err = nullptr) const;

  // u with phi(u) = x for the stretched family.
  static double stretched_u(double x, double sigma, double lambda);
  static double stretched_u_log(double log_x, double sigma, double lambda);

 private:
  double log_raw(double x) const;
  double log_raw_x_at_log(double s) const;

  RhoSpec spec_;
  Index horizon_;
  std::vector<double> explicit_;
  double log_z_ = 0.0;
  double z_error_ = 0.0;
};

std::vector<double> build_pk(const RhoSpec& spec, Index k_max);
Index rho_eval(const BoxDistribution& boxes, double t);
Index rho_eval(const RhoSpec& spec, double t);

class KarlinModel final : public IndicatorModel {
 public:
  KarlinModel(std::shared_ptr<const BoxDistribution> boxes, unsigned j);
  KarlinModel(RhoSpec spec, unsigned j);

  const BoxDistribution& boxes() const { return *boxes_; }
  unsigned j() const { return j_; }

  std::string id() const override;
  double prob(Index k, double t) const override;
  double complement(Index k, double t) const override;
  Index truncation_index(double t, double eps) const override;
  Index saturation_index(double t, double eps) const override;
  Index dense_sampling_limit(double t, double eps) const override;
  double sample_activation(Index k, RandomStream& rng) const override;
  double mu() const override;
  double q() const override;
  Index series_cutoff(double t, const Accuracy& acc) const override;
  double tail_sum(Moment m, Index from, double t, const Accuracy& acc) const override;

 private:
  std::shared_ptr<const BoxDistribution> boxes_;
  unsigned j_;
};

// sum_k g(p_k): direct over k < K0 (K0 = first index with p_k scale < 1e-2,
// at least 256) and Euler-Maclaurin beyond.
double box_series(const BoxDistribution& boxes, const std::function<double(double)>& g,
                  double scale, const Accuracy& acc, int workers = 1);
double box_series_serial(const BoxDistribution& boxes, const std::function<double(double)>& g,
                         double scale, const Accuracy& acc);
Index box_series_cutoff(const BoxDistribution& boxes, double scale);

double mean_Kj(const KarlinModel& model, double t, const Accuracy& acc = {}, int workers = 1);
double var_Kj(const KarlinModel& model, double t, const Accuracy& acc = {}, int workers = 1);
double mean_Kj_star(const KarlinModel& model, double t, const Accuracy& acc = {}, int workers = 1);
// Same box family, threshold j, without building a model.
double mean_K(const BoxDistribution& boxes, unsigned j, double t, const Accuracy& acc = {}, int workers = 1);
// sum_{i<j} E K_{i+j}(2t) C(i+j-1,i) / 2^{i+j-1} - E K_j(t)
double var_Kj_via_means(const KarlinModel& model, double t, const Accuracy& acc = {}, int workers = 1);

// c_j(alpha)
double c_j(unsigned j, double alpha);
double c_j_lower_bound(unsigned j, double alpha);

enum class LilRegime { Log, LogLog };
const char* to_string(LilRegime r);

struct ConstantSet {
  double mean_constant = 0.0;
  std::string mean_scale;      // "rho", "t_hat_L"
  double variance_constant = 0.0;
  std::string variance_scale;  // "rho", "ell", "t_hat_L"
  double kstar_constant = 0.0;
  std::string kstar_scale;
  double lil_constant = 0.0;
  LilRegime regime = LilRegime::LogLog;
  bool upper_bound_only = false;
};
ConstantSet asymptotic_constants(const RhoSpec& spec, unsigned j);

// ell(t) = t rho'(t) for the de Haan families (realized, Z-rescaled).
double ell_hat(const BoxDistribution& boxes, double t);
// L_hat(t) = int_t^inf y^{-1} L(y) dy, alpha = 1 family only.
double hat_L(const RhoSpec& spec, double t);
// L(t) for the alpha = 1 family.
double L_of(const RhoSpec& spec, double t);
// Normalizer named by a ConstantSet scale field.
double growth_scale(const BoxDistribution& boxes, const std::string& scale, double t);

// Deterministic scheme with n balls.
struct BinomialSplit {
  double p;  // P{Bin(n,p) >= j}
  double q;  // P{Bin(n,p) < j}
};
BinomialSplit binomial_split(unsigned j, std::uint64_t n, double p);

double det_mean(const KarlinModel& model, std::uint64_t n, const Accuracy& acc = {}, int workers = 1);

struct DetVariance {
  double value = 0.0;
  double diagonal = 0.0;
  double cross = 0.0;
  Index window = 0;           // cross terms summed exactly over boxes <= window
  double omitted_bound = 0.0; // certified bound on the omitted cross terms
};
DetVariance det_var(const KarlinModel& model, std::uint64_t n, const Accuracy& acc = {},
                    Index pair_cap = 20000, int workers = 1);
// Exact cross sum 2 sum_{i<k<=window} Cov(1_{A_i}, 1_{A_k}).
double det_cross_sum(const KarlinModel& model, std::uint64_t n, Index window, int workers = 1);
double det_cross_sum_serial(const KarlinModel& model, std::uint64_t n, Index window);

struct Occupancy {
  std::vector<std::pair<Index, std::uint64_t>> nonempty;  // (box, count), boxes <= k_cap
  std::uint64_t overflow = 0;                             // balls beyond k_cap
  std::uint64_t count(Index k) const;
  std::uint64_t total() const;
  std::uint64_t kj(unsigned j) const;
  std::uint64_t kj_star(unsigned j) const;
};

class DetSampler {
 public:
  DetSampler(const BoxDistribution& boxes, Index k_cap);
  Occupancy sample(std::uint64_t n, RandomStream& rng) const;
  Index k_cap() const { return k_cap_; }

 private:
  Index k_cap_;
  std::vector<double> p_;     // p_1..p_kcap
  std::vector<double> tail_;  // tail_[k-1] = sum_{i>=k} p_i, k = 1..kcap+1
};

Occupancy det_sample(const KarlinModel& model, std::uint64_t n, Index k_cap, RandomStream& rng);

enum class ExoticVerdict { TendsToZero, BoundedAway, Inconclusive };
const char* to_string(ExoticVerdict v);

struct ExoticProbe {
  std::vector<std::uint64_t> n;
  std::vector<double> ratio;  // L_hat(exp((n+1)^{1+g})) / L_hat(exp(n^{1+g}))
  ExoticVerdict verdict = ExoticVerdict::Inconclusive;
};
ExoticProbe exotic_condition_probe(const RhoSpec& spec, double gamma, std::uint64_t n_first,
                                   std::uint64_t n_last);
// Same probe for a user-supplied log L_hat as a function of u = log t.
ExoticProbe exotic_condition_probe(const std::function<double(double)>& log_hat_L_of_log_t,
                                   double gamma, std::uint64_t n_first, std::uint64_t n_last);

}  // namespace indsum::karlin
