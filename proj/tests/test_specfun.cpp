#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/poisson.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "indsum/specfun.hpp"

using namespace indsum::specfun;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST_CASE("incomplete gamma matches boost on both tails") {
  for (double k : {1.0, 2.0, 5.0, 17.0, 100.0, 1000.0, 1e5}) {
    for (double f : {0.01, 0.3, 0.9, 0.99, 1.0, 1.01, 1.2, 3.0}) {
      const double t = k * f;
      const auto pq = reg_inc_gamma(k, t);
      const double bp = boost::math::gamma_p(k, t);
      const double bq = boost::math::gamma_q(k, t);
      CAPTURE(k);
      CAPTURE(t);
      if (bp > 1e-300) CHECK(rel(pq.p, bp) < 1e-11);
      if (bq > 1e-300) CHECK(rel(pq.q, bq) < 1e-11);
      CHECK(pq.p + pq.q == doctest::Approx(1.0).epsilon(1e-14));
    }
  }
}

TEST_CASE("incomplete gamma edge values") {
  CHECK(reg_inc_gamma(3.0, 0.0).p == 0.0);
  CHECK(reg_inc_gamma(3.0, 0.0).q == 1.0);
  CHECK(reg_inc_gamma_lower(1.0, 2.0) == doctest::Approx(-std::expm1(-2.0)).epsilon(1e-14));
  CHECK(reg_inc_gamma_upper(1.0, 2.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
}

TEST_CASE("log poisson pmf matches boost") {
  for (double lambda : {0.1, 1.0, 7.5, 300.0, 1e6}) {
    for (double x : {0.0, 1.0, 3.0, 50.0, 299.0, 1e6 - 1000}) {
      const double ref = std::log(boost::math::pdf(boost::math::poisson_distribution<>(lambda), x));
      if (!std::isfinite(ref)) continue;
      CAPTURE(lambda);
      CAPTURE(x);
      CHECK(std::fabs(log_poisson_pmf(x, lambda) - ref) < 1e-10 * std::max(1.0, std::fabs(ref)));
    }
  }
}

TEST_CASE("poisson prefix and tail are complementary") {
  for (double lambda : {1e-8, 0.01, 0.5, 3.0, 40.0, 2000.0}) {
    for (std::uint64_t j : {1u, 2u, 3u, 10u, 40u, 100u}) {
      const double ref = boost::math::gamma_q(static_cast<double>(j), lambda);
      CAPTURE(lambda);
      CAPTURE(j);
      CHECK(rel(poisson_pmf_prefix(j, lambda), ref) < 1e-11);
      const double tail = boost::math::gamma_p(static_cast<double>(j), lambda);
      if (tail > 1e-300) CHECK(rel(poisson_tail(j, lambda), tail) < 1e-11);
    }
  }
  CHECK(poisson_tail(1, 1e-12) == doctest::Approx(1e-12).epsilon(1e-10));
}

TEST_CASE("scaled modified Bessel matches boost") {
  for (double nu : {0.0, 0.5, 1.0, 2.0, 10.0}) {
    for (double t : {1e-3, 0.5, 2.0, 10.0, 29.0, 31.0, 100.0, 700.0}) {
      const double ref = boost::math::cyl_bessel_i(nu, t) * std::exp(-t);
      CAPTURE(nu);
      CAPTURE(t);
      CHECK(rel(bessel_i_scaled(nu, t), ref) < 1e-12);
    }
  }
  CHECK(bessel_i_scaled(0.0, 0.0) == 1.0);
  CHECK(bessel_i_scaled(1.0, 0.0) == 0.0);
}

TEST_CASE("large-argument Bessel agrees with the leading term") {
  for (double t : {1e4, 1e6, 1e9}) {
    CHECK(rel(bessel_i_scaled(0.0, t), 1.0 / std::sqrt(2.0 * M_PI * t)) < 1.0 / t);
    CHECK(bessel_i_scaled(0.0, t) > bessel_i_scaled(1.0, t));
  }
}

TEST_CASE("normal cdf and log gamma") {
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(-40.0) >= 0.0);
  CHECK(rel(normal_cdf(-10.0), 0.5 * std::erfc(10.0 / std::sqrt(2.0))) < 1e-14);
  CHECK(rel(log_gamma(0.5), 0.5 * std::log(M_PI)) < 1e-14);
  CHECK(rel(log_gamma(101.0), boost::math::lgamma(101.0)) < 1e-14);
  CHECK(rel(log_binomial_small(50.0, 3), std::log(19600.0)) < 1e-13);
}

TEST_CASE("bernoulli variance picks the accurate side") {
  CHECK(bernoulli_variance(1e-20, 1.0) == doctest::Approx(1e-20));
  CHECK(bernoulli_variance(1.0, 1e-20) == doctest::Approx(1e-20));
  CHECK(bernoulli_variance(0.5, 0.5) == 0.25);
}
