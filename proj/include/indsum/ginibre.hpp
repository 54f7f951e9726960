#pragma once

#include <cstdint>
#include <vector>

#include "indsum/core.hpp"

namespace indsum::ginibre {

// Radial count of the Ginibre process: N(t) = sum_k 1{Gamma_k <= t} with
// independent Gamma_k ~ Gamma(k, 1).
class GinibreModel final : public IndicatorModel {
 public:
  std::string id() const override { return "ginibre"; }
  double prob(Index k, double t) const override;
  double complement(Index k, double t) const override;
  Index truncation_index(double t, double eps) const override;
  Index saturation_index(double t, double eps) const override;
  double sample_activation(Index k, RandomStream& rng) const override;
  double mu() const override { return 2.0; }
  std::optional<double> closed_form_mean(double t) const override { return t; }
  std::optional<double> closed_form_variance(double t) const override;
};

// t e^{-2t} (I_0(2t) + I_1(2t))
double var_exact(double t);
double var_asymptotic(double t);  // sqrt(t / pi)
double var_two_term(double t);    // sqrt(t / pi) - 1 / (16 sqrt(pi t))

struct WindowBounds {
  Index first;  // c + 1
  Index last;   // d
};
// c = floor(t - x sqrt t) - 1, d = floor(t + x sqrt t)
WindowBounds window_bounds(double t, double x);
double window_variance(double t, double x);
// sum_{k=first}^{last} P(1-P); zero for an empty range.
double window_variance_range(double t, Index first, Index last);

double window_fraction_f(double x);
double window_fraction_df(double x);  // 2 sqrt(pi) Phi(-x) Phi(x)

struct WindowRoot {
  double x;
  bool capped;  // root lies beyond the bracket end 8
};
WindowRoot solve_window_x(double varsigma);

// Index of the first n (1-based) whose window overlaps the next one, 0 if
// none: windows are [c(tau_n)+1, d(tau_n)].
Index first_window_overlap(const std::vector<double>& taus, double x);

struct LilEnvelope {
  double center;
  double scale;
  double constant;
};
LilEnvelope lil_envelope_ginibre(double t);

class DiscreteBessel {
 public:
  DiscreteBessel(double nu, double t);

  double nu() const { return nu_; }
  double t() const { return t_; }

  double log_pmf(std::uint64_t n) const;
  double pmf(std::uint64_t n) const;
  double mgf(double p) const;

  struct Moments {
    double mean;
    double variance;
  };
  Moments moments() const;
  // I_{nu+1}(t) / I_nu(t)
  double bessel_ratio() const;

  std::uint64_t sample(RandomStream& rng) const;
  const std::vector<double>& cdf_table() const { return cdf_; }

 private:
  double nu_;
  double t_;
  double log_i_;  // log I_nu(t)
  std::vector<double> cdf_;
};

}  // namespace indsum::ginibre
