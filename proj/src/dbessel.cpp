#include <algorithm>
#include <cmath>

#include "indsum/errors.hpp"
#include "indsum/ginibre.hpp"
#include "indsum/specfun.hpp"

namespace indsum::ginibre {

DiscreteBessel::DiscreteBessel(double nu, double t) : nu_(nu), t_(t) {
  if (!(nu > -1.0)) throw DomainError("DiscreteBessel: nu must be > -1");
  if (!(t > 0.0)) throw DomainError("DiscreteBessel: t must be > 0");
  log_i_ = t + std::log(specfun::bessel_i_scaled(nu, t));

  // cumulative table until the remaining mass is below 1e-12 past the mode
  const double mode = std::max(0.0, 0.5 * (-nu + std::sqrt(nu * nu + t * t)));
  double c = 0.0;
  for (std::uint64_t n = 0;; ++n) {
    c += pmf(n);
    cdf_.push_back(std::min(c, 1.0));
    if (static_cast<double>(n) > mode && 1.0 - c < 1e-12) break;
    if (n > 100'000'000) throw TruncationError("DiscreteBessel: cdf table did not close");
  }
}

double DiscreteBessel::log_pmf(std::uint64_t n) const {
  const double x = static_cast<double>(n);
  return (2.0 * x + nu_) * std::log(0.5 * t_) - specfun::log_gamma(x + 1.0) -
         specfun::log_gamma(x + nu_ + 1.0) - log_i_;
}

double DiscreteBessel::pmf(std::uint64_t n) const { return std::exp(log_pmf(n)); }

double DiscreteBessel::mgf(double p) const {
  const double s = std::exp(0.5 * p) * t_;
  return std::exp(-0.5 * nu_ * p + s + std::log(specfun::bessel_i_scaled(nu_, s)) - log_i_);
}

double DiscreteBessel::bessel_ratio() const {
  return specfun::bessel_i_scaled(nu_ + 1.0, t_) / specfun::bessel_i_scaled(nu_, t_);
}

DiscreteBessel::Moments DiscreteBessel::moments() const {
  const double r0 = bessel_ratio();
  const double r1 = specfun::bessel_i_scaled(nu_ + 2.0, t_) / specfun::bessel_i_scaled(nu_ + 1.0, t_);
  return {0.5 * t_ * r0, 0.25 * t_ * t_ * r0 * (r1 - r0) + 0.5 * t_ * r0};
}

std::uint64_t DiscreteBessel::sample(RandomStream& rng) const {
  const double u = rng.uniform();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  if (it != cdf_.end()) return static_cast<std::uint64_t>(it - cdf_.begin());
  // beyond the table: walk the pmf
  std::uint64_t n = cdf_.size();
  double c = cdf_.back();
  for (;; ++n) {
    c += pmf(n);
    if (u < c || n > cdf_.size() + 100000) return n;
  }
}

}  // namespace indsum::ginibre
