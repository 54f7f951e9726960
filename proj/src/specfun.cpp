#include "indsum/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "indsum/errors.hpp"

namespace indsum::specfun {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = 1e-300;
constexpr long kMaxIter = 50'000'000;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: x must be > 0");
  int sign = 0;
  return ::lgamma_r(x, &sign);
}

namespace detail {

// log(x!) - log(sqrt(2 pi x) (x/e)^x)
double stirlerr(double x) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (x <= 15.0) {
    int sign = 0;
    return ::lgamma_r(x + 1.0, &sign) - (x + 0.5) * std::log(x) + x - kLogSqrt2Pi;
  }
  const double xx = x * x;
  if (x > 500.0) return (s0 - s1 / xx) / x;
  if (x > 80.0) return (s0 - (s1 - s2 / xx) / xx) / x;
  if (x > 35.0) return (s0 - (s1 - (s2 - s3 / xx) / xx) / xx) / x;
  return (s0 - (s1 - (s2 - (s3 - s4 / xx) / xx) / xx) / xx) / x;
}

// x log(x/np) + np - x, without cancellation when x ~ np.
double bd0(double x, double np) {
  if (std::fabs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2.0 * x * v;
    const double v2 = v * v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v2;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

}  // namespace detail

double log_poisson_pmf(double x, double lambda) {
  if (lambda == 0.0) return x == 0.0 ? 0.0 : -std::numeric_limits<double>::infinity();
  if (x == 0.0) return -lambda;
  return -detail::stirlerr(x) - detail::bd0(x, lambda) - 0.5 * std::log(2.0 * std::numbers::pi * x);
}

GammaPQ reg_inc_gamma(double k, double t) {
  if (!(k > 0.0)) throw DomainError("reg_inc_gamma: k must be > 0");
  if (!(t >= 0.0)) throw DomainError("reg_inc_gamma: t must be >= 0");
  if (t == 0.0) return {0.0, 1.0};
  if (std::isinf(t)) return {1.0, 0.0};

  // e^-t t^k / Gamma(k+1)
  const double front = std::exp(log_poisson_pmf(k, t));
  if (t < k + 1.0) {
    double sum = 1.0;
    double term = 1.0;
    for (long n = 1; n < kMaxIter; ++n) {
      term *= t / (k + n);
      sum += term;
      if (term < sum * kEps * 0.25) {
        const double p = front * sum;
        return {p, 1.0 - p};
      }
    }
    throw TruncationError("reg_inc_gamma: series did not converge");
  }

  // Lentz continued fraction for Q.
  double b = t + 1.0 - k;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (long i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * (i - k);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = b + an / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) {
      const double q = front * k * h;
      return {1.0 - q, q};
    }
  }
  throw TruncationError("reg_inc_gamma: continued fraction did not converge");
}

double reg_inc_gamma_lower(double k, double t) { return reg_inc_gamma(k, t).p; }
double reg_inc_gamma_upper(double k, double t) { return reg_inc_gamma(k, t).q; }

double poisson_pmf_prefix(std::uint64_t j, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("poisson_pmf_prefix: lambda must be >= 0");
  if (j == 0) return 0.0;
  if (lambda == 0.0) return 1.0;
  if (j <= 32) {
    // log-sum-exp over the j terms
    double logs[32];
    double mx = -std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i < j; ++i) {
      logs[i] = log_poisson_pmf(static_cast<double>(i), lambda);
      mx = std::max(mx, logs[i]);
    }
    if (std::isinf(mx)) return 0.0;
    double s = 0.0;
    for (std::uint64_t i = 0; i < j; ++i) s += std::exp(logs[i] - mx);
    return std::min(1.0, std::exp(mx) * s);
  }
  return reg_inc_gamma_upper(static_cast<double>(j), lambda);
}

double poisson_tail(std::uint64_t j, double lambda) {
  if (!(lambda >= 0.0)) throw DomainError("poisson_tail: lambda must be >= 0");
  if (j == 0) return 1.0;
  return reg_inc_gamma_lower(static_cast<double>(j), lambda);
}

namespace detail {

double bessel_i_scaled_series(double nu, double t) {
  if (t == 0.0) return nu == 0.0 ? 1.0 : (nu > 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
  const double h = 0.5 * t;
  const double h2 = h * h;
  // term ratio r(n) = h^2 / ((n+1)(n+nu+1)); start at the largest term
  double mode = std::floor(0.5 * (-nu + std::sqrt(nu * nu + 4.0 * h2)));
  if (mode < 0.0) mode = 0.0;
  int sign = 0;
  const double log_mode = (2.0 * mode + nu) * std::log(h) - ::lgamma_r(mode + 1.0, &sign) -
                          ::lgamma_r(mode + nu + 1.0, &sign) - t;
  double sum = 1.0;
  double term = 1.0;
  for (double n = mode;; n += 1.0) {
    term *= h2 / ((n + 1.0) * (n + nu + 1.0));
    sum += term;
    if (term < sum * kEps * 0.25) break;
  }
  term = 1.0;
  for (double n = mode - 1.0; n >= 0.0; n -= 1.0) {
    term *= ((n + 1.0) * (n + nu + 1.0)) / h2;
    sum += term;
    if (term < sum * kEps * 0.25) break;
  }
  return std::exp(log_mode) * sum;
}

double bessel_i_scaled_asymptotic(double nu, double t) {
  const double mu4 = 4.0 * nu * nu;
  double sum = 1.0;
  double term = 1.0;
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= -(mu4 - odd * odd) / (8.0 * k * t);
    const double a = std::fabs(term);
    if (a == 0.0) break;
    if (a > prev) return -1.0;
    sum += term;
    prev = a;
    if (a < std::fabs(sum) * kEps * 0.25) return sum / std::sqrt(2.0 * std::numbers::pi * t);
  }
  return -1.0;
}

}  // namespace detail

double bessel_i_scaled(double nu, double t) {
  if (!(nu > -1.0)) throw DomainError("bessel_i_scaled: nu must be > -1");
  if (!(t >= 0.0)) throw DomainError("bessel_i_scaled: t must be >= 0");
  if (t <= 30.0) return detail::bessel_i_scaled_series(nu, t);
  const double v = detail::bessel_i_scaled_asymptotic(nu, t);
  if (v >= 0.0) return v;
  return detail::bessel_i_scaled_series(nu, t);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_binomial_small(double n, std::uint64_t i) {
  double s = 0.0;
  for (std::uint64_t m = 0; m < i; ++m) s += std::log((n - m) / (m + 1.0));
  return s;
}

}  // namespace indsum::specfun
