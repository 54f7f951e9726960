#pragma once

#include <cstdint>

namespace indsum::specfun {

double log_gamma(double x);

// Regularized incomplete gamma P(k,t) and Q(k,t) = 1 - P(k,t). Both tails
// are computed directly so that neither loses relative precision.
struct GammaPQ {
  double p;
  double q;
};
GammaPQ reg_inc_gamma(double k, double t);
double reg_inc_gamma_lower(double k, double t);
double reg_inc_gamma_upper(double k, double t);

// log(e^-lambda lambda^x / Gamma(x+1)) for real x >= 0, with the
// saddle-point deviance form that stays accurate for large x and lambda.
double log_poisson_pmf(double x, double lambda);

// e^-lambda sum_{i<j} lambda^i / i!
double poisson_pmf_prefix(std::uint64_t j, double lambda);
// P{Poisson(lambda) >= j}
double poisson_tail(std::uint64_t j, double lambda);

// e^-t I_nu(t), nu > -1, t >= 0.
double bessel_i_scaled(double nu, double t);

double normal_cdf(double x);

// p(1-p) given both p and q = 1-p, taken from the smaller side.
inline double bernoulli_variance(double p, double q) {
  return p < q ? p * (1.0 - p) : q * (1.0 - q);
}

// log C(n, i) for small i, exact-ish via a running product.
double log_binomial_small(double n, std::uint64_t i);

namespace detail {
double bessel_i_scaled_series(double nu, double t);
// Returns a negative value when the expansion does not reach full precision.
double bessel_i_scaled_asymptotic(double nu, double t);
double stirlerr(double x);
double bd0(double x, double np);
}  // namespace detail

}  // namespace indsum::specfun
