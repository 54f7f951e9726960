#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "indsum/errors.hpp"
#include "indsum/karlin.hpp"
#include "indsum/rng.hpp"

using namespace indsum;
using namespace indsum::karlin;

namespace {

RhoSpec power(double a) { return RhoSpec{PowerLaw{a}}; }

// P{Pois(l) >= j} via boost
double tail(unsigned j, double l) { return l <= 0 ? 0.0 : boost::math::gamma_p(double(j), l); }

// alpha int_0^inf g(y) y^{-alpha-1} dy
double continuum(double alpha, const std::function<double(double)>& g) {
  boost::math::quadrature::tanh_sinh<double> ts;
  boost::math::quadrature::exp_sinh<double> es;
  const double head = ts.integrate([&](double y) { return y < 1e-100 ? 0.0 : g(y) * std::pow(y, -alpha - 1); }, 0.0, 1.0, 1e-13);
  const double rest = es.integrate([&](double y) { return g(y + 1) * std::pow(y + 1, -alpha - 1); }, 1e-13);
  return alpha * (head + rest);
}

}  // namespace

TEST_CASE("normalizing constants") {
  CHECK(BoxDistribution(power(0.5)).z() == doctest::Approx(std::riemann_zeta(2.0)).epsilon(1e-13));
  CHECK(BoxDistribution(power(0.3)).z() == doctest::Approx(std::riemann_zeta(1 / 0.3)).epsilon(1e-13));
  CHECK(BoxDistribution(power(0.9)).z() == doctest::Approx(std::riemann_zeta(1 / 0.9)).epsilon(1e-12));
  double poly = 0;
  for (int k = 200000; k >= 1; --k) poly += std::exp(-std::sqrt(2.0 * k));
  CHECK(BoxDistribution(RhoSpec{DeHaanPoly{1.0}}).z() == doctest::Approx(poly).epsilon(1e-13));
  double str = 0;
  for (int k = 2000000; k >= 1; --k) str += std::exp(-BoxDistribution::stretched_u(k, 1.0, 0.5));
  CHECK(BoxDistribution(RhoSpec{DeHaanStretched{1.0, 0.5}}).z() == doctest::Approx(str).epsilon(1e-11));
  // 1/(k log^2(k+2)): direct to N, then int_{N+1/2} dx / (x log^2 x) = 1 / log(N + 1/2)
  double bl = 0;
  const int N = 10000000;
  for (int k = N; k >= 1; --k) {
    const double l = std::log(k + 2.0);
    bl += 1.0 / (k * l * l);
  }
  bl += 1.0 / std::log(N + 0.5);
  CHECK(BoxDistribution(RhoSpec{BorderlinePower{2.0}}).z() == doctest::Approx(bl).epsilon(1e-8));
}

TEST_CASE("box probabilities") {
  const BoxDistribution b(power(0.5));
  CHECK(b.p(1) == doctest::Approx(6 / (std::numbers::pi * std::numbers::pi)).epsilon(1e-13));
  CHECK(b.p(10) == doctest::Approx(b.p(1) / 100).epsilon(1e-13));
  CHECK(b.inv_p(10) == doctest::Approx(1 / b.p(10)).epsilon(1e-13));
  CHECK(b.first_below(b.p(7)) == 8);
  CHECK_THROWS_AS(b.p(0), DomainError);
  const auto pk = build_pk(power(0.5), 5);
  CHECK(pk.size() == 5);
  CHECK(pk[4] == b.p(5));
  const BoxDistribution e(RhoSpec{Explicit{{0.5, 0.3, 0.2}}});
  CHECK(e.finite());
  CHECK(e.p(4) == 0.0);
  CHECK_THROWS_AS(BoxDistribution(RhoSpec{Explicit{{0.5, 0.3}}}), DomainError);
  CHECK_THROWS_AS(BoxDistribution(power(1.0)), DomainError);
  CHECK_THROWS_AS(BoxDistribution(RhoSpec{BorderlinePower{1.0}}), DomainError);
}

TEST_CASE("counting function against a direct count") {
  for (const auto& spec : {power(0.5), RhoSpec{DeHaanPoly{1.0}}, RhoSpec{DeHaanStretched{1.0, 0.5}},
                           RhoSpec{BorderlinePower{2.0}}}) {
    const BoxDistribution b(spec);
    for (double t : {1.0, 3.0, 100.0, 1e4, 1e6}) {
      Index c = 0;
      for (Index k = 1; k < 10000000 && b.inv_p(k) <= t; ++k) ++c;
      CAPTURE(variant_name(spec));
      CAPTURE(t);
      CHECK(rho_eval(b, t) == c);
    }
  }
}

TEST_CASE("mean against a direct sum with a closed-form tail") {
  // p_k = k^-2 / Z: sum_{k>N} (1 - e^{-a/k^2}) ~ int_X^inf = sqrt(pi a) erf(sqrt a / X) - X (1 - e^{-a/X^2})
  const KarlinModel m(power(0.5), 1);
  const double Z = std::riemann_zeta(2.0);
  for (double t : {10.0, 1e3, 1e5, 1e9}) {
    const double a = t / Z;
    const int N = 2000000;
    double s = 0;
    for (int k = N; k >= 1; --k) s += -std::expm1(-a / (double(k) * k));
    const double X = N + 0.5;
    s += std::sqrt(std::numbers::pi * a) * std::erf(std::sqrt(a) / X) + X * std::expm1(-a / (X * X));
    CHECK(mean_Kj(m, t) == doctest::Approx(s).epsilon(1e-10));
  }
}

TEST_CASE("finite families against direct sums") {
  const RhoSpec spec{Explicit{{0.4, 0.3, 0.2, 0.1}}};
  for (unsigned j : {1u, 2u, 3u}) {
    const KarlinModel m(spec, j);
    for (double t : {0.5, 4.0, 30.0}) {
      double mu = 0, var = 0, ks = 0;
      for (double p : {0.4, 0.3, 0.2, 0.1}) {
        const double q = tail(j, p * t);
        mu += q;
        var += q * (1 - q);
        ks += std::exp(-p * t) * std::pow(p * t, j) / std::tgamma(j + 1.0);
      }
      CHECK(mean_Kj(m, t) == doctest::Approx(mu).epsilon(1e-13));
      CHECK(var_Kj(m, t) == doctest::Approx(var).epsilon(1e-12));
      CHECK(mean_Kj_star(m, t) == doctest::Approx(ks).epsilon(1e-12));
    }
  }
}

TEST_CASE("variance identity through means") {
  for (double alpha : {0.3, 0.7}) {
    for (unsigned j : {1u, 2u, 3u}) {
      const KarlinModel m(power(alpha), j);
      for (double t : {10.0, 1000.0}) CHECK(var_Kj_via_means(m, t) == doctest::Approx(var_Kj(m, t)).epsilon(1e-8));
    }
  }
}

TEST_CASE("parallel box series equals the serial reference") {
  const BoxDistribution b(power(0.4));
  auto g = [](double p) { return -std::expm1(-1e4 * p); };
  CHECK(box_series(b, g, 1e4, {}, 4) == box_series_serial(b, g, 1e4, {}));
}

TEST_CASE("c_j and the power-law constants against the continuum integral") {
  for (double alpha : {0.3, 0.5, 0.7}) {
    CHECK(c_j(1, alpha) == doctest::Approx(std::tgamma(1 - alpha) * (std::pow(2.0, alpha) - 1)).epsilon(1e-13));
    for (unsigned j : {1u, 2u, 3u}) {
      auto var_kernel = [j](double y) {
        const double q = boost::math::gamma_p(double(j), y);
        return q * (1 - q);
      };
      CAPTURE(alpha);
      CAPTURE(j);
      CHECK(c_j(j, alpha) == doctest::Approx(continuum(alpha, var_kernel)).epsilon(1e-9));
      CHECK(c_j(j, alpha) > c_j_lower_bound(j, alpha));
      const auto cs = asymptotic_constants(power(alpha), j);
      CHECK(cs.mean_constant ==
            doctest::Approx(continuum(alpha, [j](double y) { return boost::math::gamma_p(double(j), y); })).epsilon(1e-9));
      CHECK(cs.kstar_constant ==
            doctest::Approx(continuum(alpha, [j](double y) {
              return std::exp(-y + j * std::log(y) - std::lgamma(j + 1.0));
            })).epsilon(1e-9));
    }
  }
  CHECK_THROWS_AS(c_j(0, 0.5), DomainError);
  CHECK_THROWS_AS(c_j(1, 1.0), DomainError);
}

TEST_CASE("lil constants and regimes") {
  CHECK(asymptotic_constants(power(0.5), 1).lil_constant == std::numbers::sqrt2);
  CHECK(asymptotic_constants(RhoSpec{DeHaanPoly{2.0}}, 1).lil_constant == std::sqrt(2.0 / 2.0));
  CHECK(asymptotic_constants(RhoSpec{DeHaanPoly{2.0}}, 1).regime == LilRegime::Log);
  CHECK(asymptotic_constants(RhoSpec{DeHaanStretched{1.0, 0.25}}, 1).lil_constant == std::sqrt(2.0 / 0.25));
  CHECK(asymptotic_constants(RhoSpec{BorderlinePower{2.0}}, 1).upper_bound_only);
  CHECK(asymptotic_constants(RhoSpec{DeHaanPoly{1.0}}, 1).variance_constant == std::numbers::ln2);
  // de Haan variance constant: int_0^inf P{Pois(y) >= j} P{Pois(y) < j} dy / y
  for (unsigned j : {1u, 2u, 3u}) {
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    auto kern = [j](double y) {
      if (y < 1e-200) return 0.0;
      const double q = boost::math::gamma_p(double(j), y);
      return q * (1 - q) / y;
    };
    const double ref = ts.integrate(kern, 0.0, 1.0, 1e-13) + es.integrate([&](double y) { return kern(y + 1); }, 1e-13);
    CHECK(asymptotic_constants(RhoSpec{DeHaanPoly{1.0}}, j).variance_constant == doctest::Approx(ref).epsilon(1e-10));
  }
  CHECK(asymptotic_constants(RhoSpec{DeHaanPoly{1.0}}, 2).variance_constant == doctest::Approx(std::numbers::ln2 - 0.25));
  CHECK_THROWS_AS(asymptotic_constants(RhoSpec{Explicit{{1.0}}}, 1), DomainError);
}

TEST_CASE("classification hooks") {
  CHECK(KarlinModel(power(0.5), 1).mu() == 1.0);
  CHECK(KarlinModel(RhoSpec{DeHaanPoly{2.0}}, 1).mu() == 1.5);
  CHECK(KarlinModel(RhoSpec{DeHaanStretched{1.0, 0.25}}, 1).q() == 3.0);
  CHECK(KarlinModel(power(0.5), 2).id() == "karlin:powerlaw:j=2");
}

TEST_CASE("slowly varying parts") {
  const RhoSpec spec{BorderlinePower{2.0}};
  const double c = 1 / BoxDistribution(spec).z();
  for (double t : {1e3, 1e8}) {
    boost::math::quadrature::exp_sinh<double> es;
    const double ref = es.integrate([&](double s) { return c * std::pow(std::log(t) + s, -2.0); }, 1e-13);
    CHECK(hat_L(spec, t) == doctest::Approx(ref).epsilon(1e-10));
    CHECK(L_of(spec, t) == doctest::Approx(c / (std::log(t) * std::log(t))).epsilon(1e-14));
  }
  const BoxDistribution poly(RhoSpec{DeHaanPoly{1.0}});
  const double t = 1e12;
  CHECK(double(rho_eval(poly, std::numbers::e * t) - rho_eval(poly, t)) / ell_hat(poly, t) ==
        doctest::Approx(1.0).epsilon(0.05));
  CHECK_THROWS_AS(hat_L(power(0.5), 10.0), DomainError);
}

TEST_CASE("exotic condition probe") {
  const auto bounded = exotic_condition_probe(RhoSpec{BorderlinePower{2.0}}, 0.5, 5, 60);
  CHECK(bounded.verdict == ExoticVerdict::BoundedAway);
  CHECK(bounded.ratio.size() == 56);
  const auto vanishing = exotic_condition_probe([](double u) { return -u; }, 0.5, 5, 60);
  CHECK(vanishing.verdict == ExoticVerdict::TendsToZero);
  CHECK(std::string(to_string(vanishing.verdict)) == "tends_to_zero");
  CHECK_THROWS_AS(exotic_condition_probe(power(0.5), 0.5, 5, 60), DomainError);
}

TEST_CASE("binomial split against boost") {
  for (unsigned j : {1u, 2u, 5u}) {
    for (std::uint64_t n : {3u, 100u, 10000u}) {
      for (double p : {1e-9, 1e-4, 0.01, 0.3, 0.9}) {
        if (n < j) continue;
        const double ref_q = boost::math::cdf(boost::math::binomial_distribution<>(double(n), p), j - 1.0);
        const double ref_p = boost::math::cdf(boost::math::complement(boost::math::binomial_distribution<>(double(n), p), j - 1.0));
        const auto s = binomial_split(j, n, p);
        CAPTURE(j);
        CAPTURE(n);
        CAPTURE(p);
        CHECK(s.q == doctest::Approx(ref_q).epsilon(1e-12));
        if (ref_p > 1e-300) CHECK(s.p == doctest::Approx(ref_p).epsilon(1e-10));
      }
    }
  }
  CHECK(binomial_split(3, 2, 0.5).p == 0.0);
}

TEST_CASE("deterministic scheme against exact enumeration") {
  const std::vector<double> probs{0.4, 0.3, 0.2, 0.1};
  const RhoSpec spec{Explicit{probs}};
  const unsigned n = 6;
  for (unsigned j : {1u, 2u}) {
    // enumerate all 4^n ball placements
    double m1 = 0, m2 = 0;
    for (unsigned code = 0; code < (1u << (2 * n)); ++code) {
      int cnt[4] = {0, 0, 0, 0};
      double pr = 1;
      for (unsigned b = 0; b < n; ++b) {
        const unsigned box = (code >> (2 * b)) & 3u;
        ++cnt[box];
        pr *= probs[box];
      }
      int k = 0;
      for (int c : cnt) k += c >= int(j);
      m1 += pr * k;
      m2 += pr * k * k;
    }
    const KarlinModel m(spec, j);
    CHECK(det_mean(m, n) == doctest::Approx(m1).epsilon(1e-13));
    const auto dv = det_var(m, n);
    CHECK(dv.value == doctest::Approx(m2 - m1 * m1).epsilon(1e-11));
    CHECK(dv.omitted_bound == 0.0);
  }
}

TEST_CASE("cross covariances for j = 1 against the closed form") {
  // Cov(1{N_i >= 1}, 1{N_k >= 1}) = (1 - p_i - p_k)^n - (1 - p_i)^n (1 - p_k)^n
  const KarlinModel m(power(0.5), 1);
  const std::uint64_t n = 500;
  const Index W = 300;
  double ref = 0;
  for (Index i = 1; i <= W; ++i)
    for (Index k = i + 1; k <= W; ++k) {
      const double pi = m.boxes().p(i), pk = m.boxes().p(k);
      ref += std::pow(1 - pi - pk, double(n)) - std::pow(1 - pi, double(n)) * std::pow(1 - pk, double(n));
    }
  CHECK(det_cross_sum(m, n, W) == doctest::Approx(2 * ref).epsilon(1e-9));
  CHECK(det_cross_sum(m, n, W, 3) == det_cross_sum_serial(m, n, W));
}

TEST_CASE("omitted cross terms stay within the certified bound") {
  const KarlinModel m(power(0.5), 2);
  const std::uint64_t n = 2000;
  Accuracy acc;
  acc.rel_tol = 0.5;
  const auto small = det_var(m, n, acc, 400);
  const auto large = det_var(m, n, acc, 20000);
  CHECK(std::fabs(small.value - large.value) <= small.omitted_bound + large.omitted_bound);
  CHECK(large.omitted_bound < small.omitted_bound);
}

TEST_CASE("deterministic sampler reproduces the mean") {
  const KarlinModel m(power(0.5), 2);
  const std::uint64_t n = 1000;
  const int reps = 4000;
  double s = 0;
  for (int r = 0; r < reps; ++r) {
    RandomStream rng(17, r);
    const auto occ = det_sample(m, n, 100000, rng);
    CHECK(occ.total() == n);
    s += double(occ.kj(2));
  }
  Accuracy acc;
  acc.rel_tol = 1e-2;
  const auto dv = det_var(m, n, acc);
  CHECK(std::fabs(s / reps - det_mean(m, n)) < 5 * std::sqrt(dv.value / reps));
}

TEST_CASE("box family config files") {
  const auto s = parse_rho_spec("# comment\nvariant = dehaan_stretched\nsigma = 1.5\nlambda=0.25\n");
  const auto* v = std::get_if<DeHaanStretched>(&s.variant);
  REQUIRE(v != nullptr);
  CHECK(v->sigma == 1.5);
  CHECK(v->lambda == 0.25);
  const auto e = parse_rho_spec(format_rho_spec(RhoSpec{Explicit{{0.7, 0.2, 0.1}}}));
  CHECK(std::get<Explicit>(e.variant).probabilities == std::vector<double>{0.7, 0.2, 0.1});
  const auto p = parse_rho_spec(format_rho_spec(power(0.123456789012345)));
  CHECK(std::get<PowerLaw>(p.variant).alpha == 0.123456789012345);
  CHECK_THROWS_AS(parse_rho_spec("variant = powerlaw\n"), DomainError);
  CHECK_THROWS_AS(parse_rho_spec("variant = powerlaw\nalpha = 0.5\nbeta = 1\n"), DomainError);
  CHECK_THROWS_AS(parse_rho_spec("variant = nope\n"), DomainError);
  CHECK_THROWS_AS(parse_rho_spec("variant = powerlaw\nalpha = 1.5\n"), DomainError);
}
