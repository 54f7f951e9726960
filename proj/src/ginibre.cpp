#include <algorithm>
#include <cmath>
#include <numbers>

#include "indsum/errors.hpp"
#include "indsum/ginibre.hpp"
#include "indsum/parallel.hpp"
#include "indsum/specfun.hpp"

namespace indsum::ginibre {

namespace {

// Chernoff exponent of Poisson(t) at level m: t h(m/t), h(x) = x log x - x + 1.
double chernoff(double m, double t) {
  if (m == 0.0) return t;
  return m * std::log(m / t) - m + t;
}

// Bound on sum_{k>K} P{N_t >= k}; requires K + 1 > t.
double upper_tail_bound(Index K, double t) {
  const double m = static_cast<double>(K + 1);
  return std::exp(-chernoff(m, t)) / (1.0 - t / m);
}

// Bound on sum_{k<=k0} P{N_t <= k-1}; requires k0 - 1 < t.
double lower_tail_bound(Index k0, double t) {
  const double m = static_cast<double>(k0) - 1.0;
  if (m < 0.0) return 0.0;
  return std::exp(-chernoff(m, t)) / (1.0 - m / t);
}

}  // namespace

double GinibreModel::prob(Index k, double t) const {
  return specfun::reg_inc_gamma_lower(static_cast<double>(k), t);
}

double GinibreModel::complement(Index k, double t) const {
  return specfun::reg_inc_gamma_upper(static_cast<double>(k), t);
}

Index GinibreModel::truncation_index(double t, double eps) const {
  if (!(t >= 0.0)) throw DomainError("ginibre: t must be >= 0");
  if (t == 0.0) return 0;
  const Index base = static_cast<Index>(std::floor(t)) + 1;
  if (upper_tail_bound(base, t) < eps) return base;
  Index step = std::max<Index>(1, static_cast<Index>(std::sqrt(t)));
  Index lo = base;
  Index hi = base + step;
  while (!(upper_tail_bound(hi, t) < eps)) {
    lo = hi;
    step *= 2;
    hi = base + step;
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    if (upper_tail_bound(mid, t) < eps)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

Index GinibreModel::saturation_index(double t, double eps) const {
  if (!(t > 1.0)) return 0;
  // largest k0 with k0 - 1 < t and bound < eps; the bound grows with k0
  Index lo = 0;
  Index hi = static_cast<Index>(std::ceil(t));
  if (static_cast<double>(hi) - 1.0 >= t) --hi;
  if (lower_tail_bound(hi, t) < eps) return hi;
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    if (lower_tail_bound(mid, t) < eps)
      lo = mid;
    else
      hi = mid;
  }
  return lo;
}

double GinibreModel::sample_activation(Index k, RandomStream& rng) const {
  return rng.gamma(static_cast<double>(k));
}

std::optional<double> GinibreModel::closed_form_variance(double t) const { return var_exact(t); }

double var_exact(double t) {
  if (!(t >= 0.0)) throw DomainError("var_exact: t must be >= 0");
  if (t == 0.0) return 0.0;
  return t * (specfun::bessel_i_scaled(0.0, 2.0 * t) + specfun::bessel_i_scaled(1.0, 2.0 * t));
}

double var_asymptotic(double t) { return std::sqrt(t / std::numbers::pi); }

double var_two_term(double t) {
  return std::sqrt(t / std::numbers::pi) - 1.0 / (16.0 * std::sqrt(std::numbers::pi * t));
}

WindowBounds window_bounds(double t, double x) {
  if (!(x > 0.0)) throw DomainError("window: x must be > 0");
  if (!(t > 0.0)) throw DomainError("window: t must be > 0");
  const double s = std::sqrt(t);
  const double lo = std::floor(t - x * s);
  if (lo < 1.0) throw DomainError("window: floor(t - x sqrt t) must be >= 1");
  const double c = lo - 1.0;
  const double d = std::floor(t + x * s);
  return {static_cast<Index>(c) + 1, static_cast<Index>(d)};
}

double window_variance_range(double t, Index first, Index last) {
  if (first == 0) throw DomainError("window: indices start at 1");
  if (last < first) return 0.0;
  return parallel::block_sum_serial(first, last + 1, [t](Index k) {
    const auto pq = specfun::reg_inc_gamma(static_cast<double>(k), t);
    return specfun::bernoulli_variance(pq.p, pq.q);
  });
}

double window_variance(double t, double x) {
  const auto w = window_bounds(t, x);
  return window_variance_range(t, w.first, w.last);
}

double window_fraction_f(double x) {
  if (!(x >= 0.0)) throw DomainError("window_fraction_f: x must be >= 0");
  // Phi(sqrt2 x) - Phi(-sqrt2 x) = erf(x); Phi(x) - Phi(-x) = erf(x / sqrt2)
  const double g = std::exp(-0.5 * x * x);
  return std::erf(x) - std::numbers::sqrt2 * g * std::erf(x / std::numbers::sqrt2) +
         2.0 * std::sqrt(std::numbers::pi) * x * specfun::normal_cdf(-x) * specfun::normal_cdf(x);
}

double window_fraction_df(double x) {
  return 2.0 * std::sqrt(std::numbers::pi) * specfun::normal_cdf(-x) * specfun::normal_cdf(x);
}

WindowRoot solve_window_x(double varsigma) {
  if (!(varsigma > 0.0 && varsigma < 1.0)) throw DomainError("solve_window_x: varsigma must be in (0,1)");
  const double target = 1.0 - varsigma;
  double lo = 0.0;
  double hi = 8.0;
  if (window_fraction_f(hi) < target) return {hi, true};
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (window_fraction_f(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  const double flo = std::fabs(window_fraction_f(lo) - target);
  const double fhi = std::fabs(window_fraction_f(hi) - target);
  return {flo < fhi ? lo : hi, false};
}

Index first_window_overlap(const std::vector<double>& taus, double x) {
  for (std::size_t n = 0; n + 1 < taus.size(); ++n) {
    const auto a = window_bounds(taus[n], x);
    const auto b = window_bounds(taus[n + 1], x);
    if (!(a.last < b.first)) return n + 1;
  }
  return 0;
}

LilEnvelope lil_envelope_ginibre(double t) {
  if (!(t > std::numbers::e)) throw DomainError("lil_envelope_ginibre: t must exceed e");
  return {t, std::pow(t, 0.25) * std::sqrt(std::log(t)), std::pow(std::numbers::pi, -0.25)};
}

}  // namespace indsum::ginibre
