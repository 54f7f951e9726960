#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include <json.hpp>

#include "indsum/errors.hpp"
#include "indsum/ginibre.hpp"
#include "indsum/karlin.hpp"
#include "indsum/montecarlo.hpp"

using namespace indsum;
using namespace indsum::mc;

namespace {

std::vector<std::int64_t> poisson_samples(double lambda, int n, unsigned seed) {
  std::mt19937_64 eng(seed);
  std::poisson_distribution<std::int64_t> d(lambda);
  std::vector<std::int64_t> out(n);
  for (auto& x : out) x = d(eng);
  return out;
}

}  // namespace

TEST_CASE("ks statistic on hand-checked samples") {
  auto uniform = [](double x) { return std::clamp(x, 0.0, 1.0); };
  CHECK(ks_statistic({0.5}, uniform) == doctest::Approx(0.5));
  CHECK(ks_statistic({0.25, 0.75}, uniform) == doctest::Approx(0.25));
  CHECK(ks_statistic({0.9, 0.95}, uniform) == doctest::Approx(0.9));
  CHECK_THROWS_AS(ks_statistic({}, uniform), PreconditionError);
}

TEST_CASE("ks critical values") {
  const std::uint64_t n = 1000000;
  CHECK(ks_critical_value(0.05, n) * std::sqrt(double(n)) == doctest::Approx(1.3581).epsilon(1e-3));
  CHECK(ks_critical_value(0.001, n) * std::sqrt(double(n)) == doctest::Approx(1.9495).epsilon(1e-3));
  CHECK_THROWS_AS(ks_critical_value(0.0, 10), DomainError);
}

TEST_CASE("normal absolute moments") {
  CHECK(abs_normal_moment(1) == doctest::Approx(std::sqrt(2 / std::numbers::pi)).epsilon(1e-14));
  CHECK(abs_normal_moment(2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(abs_normal_moment(4) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("clt report passes on poisson data with the right centering only") {
  const auto xs = poisson_samples(900.0, 20000, 1);
  const auto good = clt_report("poisson", 900.0, xs, 900.0, 900.0);
  CHECK(good.verdict == Verdict::Pass);
  CHECK(good.statistic == "clt_ks");
  CHECK(good.tolerance == doctest::Approx(ks_critical_value(0.001, 20000) + 1.0 / 30.0));
  const auto bad = clt_report("poisson", 900.0, xs, 900.0 + 10 * 30.0, 900.0);
  CHECK(bad.verdict == Verdict::Fail);
  CHECK_THROWS_AS(clt_report("poisson", 900.0, xs, 900.0, 10.0), PreconditionError);
}

TEST_CASE("moment reports on exact normal data") {
  std::mt19937_64 eng(3);
  std::normal_distribution<double> nd;
  std::vector<double> z(200000);
  for (auto& x : z) x = nd(eng);
  for (double theta : {-1.0, 0.5, 1.0}) {
    const auto r = exp_moment_report("normal", 1.0, theta, z, 1e12);
    CHECK(r.target == doctest::Approx(std::exp(theta * theta / 2)));
    CHECK(r.verdict == Verdict::Pass);
  }
  for (double p : {1.0, 2.0, 4.0}) CHECK(abs_moment_report("normal", 1.0, p, z).verdict == Verdict::Pass);
  for (auto& x : z) x *= 1.1;
  CHECK(abs_moment_report("normal", 1.0, 2.0, z).verdict == Verdict::Fail);
  CHECK_THROWS_AS(exp_moment_report("normal", 1.0, 3.0, z, 1e12), PreconditionError);
  z.resize(100);
  CHECK_THROWS_AS(abs_moment_report("normal", 1.0, 1.0, z), PreconditionError);
}

TEST_CASE("standardization") {
  const auto z = standardize({1, 3}, 2.0, 4.0);
  CHECK(z == std::vector<double>{-0.5, 0.5});
  CHECK_THROWS_AS(standardize({1}, 0.0, 0.0), PreconditionError);
}

TEST_CASE("report json lines") {
  ValidationReport r{"clt_ks", "ginibre", 100.0, 10, 0.5, 0.0, 0.1, 0.2, Verdict::Fail};
  const auto j = nlohmann::json::parse(to_json_line(r));
  CHECK(j["schema_version"] == 1);
  CHECK(j["verdict"] == "fail");
  CHECK(j["stderr"] == 0.1);
  CHECK(to_json_line(r).find('\n') == std::string::npos);
}

TEST_CASE("lil normalizers and constants") {
  CHECK(lil_normalizer(2.0, 0.0, 100.0) == doctest::Approx(std::sqrt(2 * 100 * std::log(100.0))));
  CHECK(lil_normalizer(1.0, 1.0, 100.0) == doctest::Approx(std::sqrt(4 * 100 * std::log(std::log(100.0)))));
  const auto g = lil_constants(ginibre::GinibreModel{});
  CHECK(g.theorem_constant == std::pow(std::numbers::pi, -0.25));
  CHECK(g.regime == "log");
  const auto k = lil_constants(karlin::KarlinModel(karlin::RhoSpec{karlin::DeHaanPoly{0.5}}, 1));
  CHECK(k.theorem_constant == std::sqrt(2 / 0.5));
  CHECK(k.regime == "log");
}

TEST_CASE("ginibre normalization agrees with the envelope at 1e6") {
  const double a = ginibre::var_exact(1e6);
  const auto e = ginibre::lil_envelope_ginibre(1e6);
  CHECK(std::fabs(lil_normalizer(2.0, 0.0, a) / (e.scale * e.constant) - 1) < 0.05);
}

TEST_CASE("lil traces") {
  ginibre::GinibreModel g;
  McConfig cfg;
  cfg.seed = 21;
  const auto tr = lil_trace(g, 0.1, 200, 21, 0, cfg);
  REQUIRE(!tr.n.empty());
  for (std::size_t i = 0; i < tr.n.size(); ++i) {
    CHECK(std::isfinite(tr.value[i]));
    if (i > 0) {
      CHECK(tr.tau[i] > tr.tau[i - 1]);
      CHECK(tr.running_max[i] >= tr.running_max[i - 1]);
      CHECK(tr.running_min[i] <= tr.running_min[i - 1]);
    }
    CHECK(std::log(ginibre::var_exact(tr.tau[i])) >= kLilWarmup);
  }
  std::ostringstream os;
  write_trace_csv(os, tr);
  CHECK(os.str().rfind("n,tau_n,value,running_max\n", 0) == 0);

  cfg.workers = 1;
  const auto e1 = lil_trace_ensemble(g, 0.1, 100, 4, cfg);
  cfg.workers = 3;
  const auto e3 = lil_trace_ensemble(g, 0.1, 100, 4, cfg);
  for (int p = 0; p < 4; ++p) CHECK(e1[p].value == e3[p].value);
  const auto side = nlohmann::json::parse(trace_sidecar_json(g, e1, 100));
  CHECK(side["theorem_constant"] == std::pow(std::numbers::pi, -0.25));
  CHECK(side["verdict"] == "informational");
  CHECK(side["paths"].size() == 4);

  karlin::KarlinModel k(karlin::RhoSpec{karlin::PowerLaw{0.5}}, 1);
  const auto kt = lil_trace(k, 0.5, 4, 2, 0, cfg);
  CHECK(kt.regime == "loglog");
  CHECK(!kt.n.empty());
}
