#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "indsum/errors.hpp"
#include "indsum/karlin.hpp"
#include "indsum/specfun.hpp"

namespace indsum::karlin {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr Index kDirectMin = 256;

// Boost 1.74 declares the integrate overloads const but defines them non-const.
boost::math::quadrature::exp_sinh<double>& integrator() {
  thread_local boost::math::quadrature::exp_sinh<double> q;
  return q;
}

}  // namespace

std::string variant_name(const RhoSpec& spec) {
  return std::visit(Overloaded{[](const PowerLaw&) { return std::string("powerlaw"); },
                               [](const BorderlinePower&) { return std::string("borderline"); },
                               [](const DeHaanPoly&) { return std::string("dehaan_poly"); },
                               [](const DeHaanStretched&) { return std::string("dehaan_stretched"); },
                               [](const Explicit&) { return std::string("explicit"); }},
                    spec.variant);
}

void validate(const RhoSpec& spec) {
  std::visit(Overloaded{
                 [](const PowerLaw& v) {
                   if (!(v.alpha > 0.0 && v.alpha < 1.0)) throw DomainError("powerlaw: alpha must be in (0,1)");
                 },
                 [](const BorderlinePower& v) {
                   if (!(v.log_exponent > 1.0)) throw DomainError("borderline: log_exponent must be > 1");
                 },
                 [](const DeHaanPoly& v) {
                   if (!(v.beta > 0.0)) throw DomainError("dehaan_poly: beta must be > 0");
                 },
                 [](const DeHaanStretched& v) {
                   if (!(v.sigma > 0.0)) throw DomainError("dehaan_stretched: sigma must be > 0");
                   if (!(v.lambda > 0.0 && v.lambda < 1.0))
                     throw DomainError("dehaan_stretched: lambda must be in (0,1)");
                 },
                 [](const Explicit& v) {
                   if (v.probabilities.empty()) throw DomainError("explicit: no probabilities");
                   double s = 0.0;
                   for (double p : v.probabilities) {
                     if (!(p > 0.0 && p <= 1.0)) throw DomainError("explicit: probabilities must be in (0,1]");
                     s += p;
                   }
                   if (std::fabs(s - 1.0) > 1e-12) throw DomainError("explicit: probabilities must sum to 1");
                 }},
             spec.variant);
}

double BoxDistribution::stretched_u(double x, double sigma, double lambda) {
  return stretched_u_log(std::log(x), sigma, lambda);
}

double BoxDistribution::stretched_u_log(double log_x, double sigma, double lambda) {
  // phi(u) = (sigma lambda)^{-1} e^{sigma u^lambda} u^{1-lambda} = x, in logs
  const double target = log_x + std::log(sigma * lambda);
  auto F = [&](double u) { return sigma * std::pow(u, lambda) + (1.0 - lambda) * std::log(u) - target; };
  double lo = 1.0;
  double hi = 1.0;
  while (F(lo) > 0.0) lo *= 0.5;
  while (F(hi) < 0.0) hi *= 2.0;
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    const double f = F(u);
    if (f > 0.0)
      hi = u;
    else
      lo = u;
    const double df = sigma * lambda * std::pow(u, lambda - 1.0) + (1.0 - lambda) / u;
    double next = u - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - u) <= 1e-15 * u) return next;
    u = next;
  }
  return u;
}

BoxDistribution::BoxDistribution(RhoSpec spec, Index horizon) : spec_(std::move(spec)), horizon_(horizon) {
  validate(spec_);
  if (const auto* e = std::get_if<Explicit>(&spec_.variant)) {
    explicit_ = e->probabilities;
    horizon_ = explicit_.size();
    return;
  }
  // log_z_ = 0 makes p_at the raw weight while Z is being summed.
  double err = 0.0;
  const double z = sum_from(1, [](double w) { return w; }, &err);
  if (!(z > 0.0) || !std::isfinite(z)) throw NumericalError("normalization failed for " + variant_name(spec_));
  if (err > 1e-12 * z) throw TruncationError("normalization tail remainder exceeds 1e-12 for " + variant_name(spec_));
  log_z_ = std::log(z);
  z_error_ = err;
}

double BoxDistribution::z() const { return std::exp(log_z_); }

double BoxDistribution::log_raw(double x) const {
  return std::visit(Overloaded{[x](const PowerLaw& v) { return -std::log(x) / v.alpha; },
                               [x](const BorderlinePower& v) {
                                 return -std::log(x) - v.log_exponent * std::log(std::log(x + 2.0));
                               },
                               [x](const DeHaanPoly& v) { return -std::pow((v.beta + 1.0) * x, 1.0 / (v.beta + 1.0)); },
                               [x](const DeHaanStretched& v) { return -stretched_u(x, v.sigma, v.lambda); },
                               [](const Explicit&) { return 0.0; }},
                    spec_.variant);
}

double BoxDistribution::p(Index k) const {
  if (k == 0) throw DomainError("box index starts at 1");
  if (finite()) return k <= explicit_.size() ? explicit_[k - 1] : 0.0;
  return std::exp(log_raw(static_cast<double>(k)) - log_z_);
}

double BoxDistribution::log_p(double x) const {
  if (finite()) return std::log(p_at(x));
  return log_raw(x) - log_z_;
}

double BoxDistribution::p_at(double x) const {
  if (finite()) {
    const auto k = static_cast<Index>(std::llround(x));
    return k >= 1 && k <= explicit_.size() ? explicit_[k - 1] : 0.0;
  }
  if (std::isinf(x)) return 0.0;
  return std::exp(log_raw(x) - log_z_);
}

double BoxDistribution::inv_p(Index k) const {
  if (finite()) return 1.0 / p(k);
  return std::exp(log_z_ - log_raw(static_cast<double>(k)));
}

Index BoxDistribution::first_below(double p_cut) const {
  if (finite()) {
    for (Index k = 1; k <= explicit_.size(); ++k)
      if (explicit_[k - 1] < p_cut) return k;
    return explicit_.size() + 1;
  }
  if (p(1) < p_cut) return 1;
  Index lo = 1;
  Index hi = 2;
  while (p(hi) >= p_cut) {
    lo = hi;
    if (hi > horizon_ / 2) throw HorizonError("box index search passed the horizon");
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    if (p(mid) >= p_cut)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

Index BoxDistribution::count_inv_below(double t) const {
  if (!(t > 0.0)) return 0;
  if (finite()) {
    Index c = 0;
    for (double pk : explicit_)
      if (1.0 / pk <= t) ++c;
    return c;
  }
  // p_k >= 1/t  <=>  1/p_k <= t, checked on inv_p to stay exact at the edge
  Index k = first_below(1.0 / t);
  while (k > 1 && inv_p(k - 1) > t) --k;
  while (k <= horizon_ && inv_p(k) <= t) ++k;
  return k - 1;
}

// log(w(x) x) at x = e^s, without the cancellation in log w + s.
double BoxDistribution::log_raw_x_at_log(double s) const {
  return std::visit(Overloaded{[s](const PowerLaw& v) { return s * (1.0 - 1.0 / v.alpha); },
                               [s](const BorderlinePower& v) {
                                 return -v.log_exponent * std::log(s + std::log1p(2.0 * std::exp(-s)));
                               },
                               [s](const DeHaanPoly& v) {
                                 return s - std::exp((std::log(v.beta + 1.0) + s) / (v.beta + 1.0));
                               },
                               [s](const DeHaanStretched& v) { return s - stretched_u_log(s, v.sigma, v.lambda); },
                               [](const Explicit&) { return 0.0; }},
                    spec_.variant);
}

double BoxDistribution::integral_from(double x0, const std::function<double(double)>& g, double* err) const {
  if (!(x0 > 0.0)) throw PreconditionError("integral_from: x0 must be > 0");
  if (finite()) throw PreconditionError("integral_from: finite box family");
  constexpr double kSplit = 3.0;
  double head = 0.0;
  double head_err = 0.0;
  if (x0 < kSplit) {
    head = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        [&](double x) { return g(p_at(x)); }, x0, kSplit, 8, 1e-14, &head_err);
    x0 = kSplit;
  }
  // x = exp(e^v): slowly varying tails decay exponentially in v.
  constexpr double kTiny = 1e-250;
  const double slope = g(kTiny) / kTiny;
  const double v0 = std::log(std::log(x0));
  auto f = [&](double w) {
    const double s = std::exp(v0 + w);
    if (!std::isfinite(s)) return 0.0;
    const double lpx = log_raw_x_at_log(s) - log_z_;
    const double lp = lpx - s;
    const double lw = lpx + std::log(s);
    if (lp > std::log(kTiny)) {
      const double pv = std::exp(lp);
      const double gp = g(pv);
      return gp == 0.0 ? 0.0 : gp / pv * std::exp(lw);
    }
    return slope == 0.0 ? 0.0 : slope * std::exp(lw);
  };
  double e = 0.0;
  double l1 = 0.0;
  const double val = integrator().integrate(f, 1e-14, &e, &l1);
  if (err) *err = e + head_err;
  return head + val;
}

double BoxDistribution::sum_from(Index from, const std::function<double(double)>& g, double* err) const {
  if (from == 0) from = 1;
  if (finite()) {
    double s = 0.0;
    for (Index k = from; k <= explicit_.size(); ++k) s += g(explicit_[k - 1]);
    if (err) *err = 0.0;
    return s;
  }
  const Index k1 = std::max(from, kDirectMin);
  double direct = 0.0;
  double comp = 0.0;
  for (Index k = from; k < k1; ++k) {
    const double y = g(p(k)) - comp;
    const double t = direct + y;
    comp = (t - direct) - y;
    direct = t;
  }
  // Euler-Maclaurin, midpoint form:
  // sum_{k>=K} G(k) = int_{K-1/2}^inf G + G'(K-1/2)/24 - 7 G'''(K-1/2)/5760 + ...
  const double x0 = static_cast<double>(k1) - 0.5;
  auto G = [&](double x) { return g(p_at(x)); };
  double qerr = 0.0;
  const double integral = integral_from(x0, g, &qerr);
  const double h = 0.25;
  const double d1 = (G(x0 + h) - G(x0 - h)) / (2.0 * h);
  const double H = 0.5;
  const double d3 = (G(x0 + 2 * H) - 2 * G(x0 + H) + 2 * G(x0 - H) - G(x0 - 2 * H)) / (2 * H * H * H);
  const double next = 7.0 * d3 / 5760.0;
  if (err) *err = qerr + std::fabs(next);
  return direct + integral + d1 / 24.0 - next;
}

std::vector<double> build_pk(const RhoSpec& spec, Index k_max) {
  if (k_max == 0) throw DomainError("build_pk: k_max must be >= 1");
  const BoxDistribution boxes(spec);
  if (boxes.finite()) k_max = std::min(k_max, boxes.size());
  std::vector<double> out(k_max);
  for (Index k = 1; k <= k_max; ++k) out[k - 1] = boxes.p(k);
  return out;
}

Index rho_eval(const BoxDistribution& boxes, double t) {
  if (!(t > 0.0)) throw DomainError("rho_eval: t must be > 0");
  if (t <= 1.0) return 0;
  if (!boxes.finite() && boxes.inv_p(boxes.horizon()) <= t)
    throw HorizonError("rho_eval: t beyond the built range");
  return boxes.count_inv_below(t);
}

Index rho_eval(const RhoSpec& spec, double t) { return rho_eval(BoxDistribution(spec), t); }

double L_of(const RhoSpec& spec, double t) {
  const auto* v = std::get_if<BorderlinePower>(&spec.variant);
  if (!v) throw DomainError("L(t): only the alpha = 1 family has L");
  if (!(t > 1.0)) throw DomainError("L(t): t must be > 1");
  const double c = 1.0 / BoxDistribution(spec).z();
  return c * std::pow(std::log(t), -v->log_exponent);
}

double hat_L(const RhoSpec& spec, double t) {
  const auto* v = std::get_if<BorderlinePower>(&spec.variant);
  if (!v) throw DomainError("hat_L: defined only for the alpha = 1 family");
  if (!(t > 1.0)) throw DomainError("hat_L: t must be > 1");
  const double b = v->log_exponent;
  const double c = 1.0 / BoxDistribution(spec).z();
  return c * std::pow(std::log(t), 1.0 - b) / (b - 1.0);
}

double ell_hat(const BoxDistribution& boxes, double t) {
  const double s = t / boxes.z();
  if (!(s > 1.0)) return 0.0;
  const double u = std::log(s);
  if (const auto* v = std::get_if<DeHaanPoly>(&boxes.spec().variant)) return std::pow(u, v->beta);
  if (const auto* v = std::get_if<DeHaanStretched>(&boxes.spec().variant)) {
    const double ul = std::pow(u, v->lambda);
    return std::exp(v->sigma * ul) * (1.0 + (1.0 - v->lambda) / (v->sigma * v->lambda * ul));
  }
  throw DomainError("ell_hat: defined only for the de Haan families");
}

double growth_scale(const BoxDistribution& boxes, const std::string& scale, double t) {
  if (scale == "rho") return static_cast<double>(rho_eval(boxes, t));
  if (scale == "ell") return ell_hat(boxes, t);
  if (scale == "t_hat_L") return t * hat_L(boxes.spec(), t);
  throw DomainError("unknown growth scale '" + scale + "'");
}

double c_j(unsigned j, double alpha) {
  if (j == 0) throw DomainError("c_j: j must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("c_j: alpha must be in (0,1)");
  const double lf = specfun::log_gamma(j);  // log (j-1)!
  double s = 0.0;
  for (unsigned i = 0; i < j; ++i) {
    const double e = i + j - 1.0 - alpha;
    s += std::exp(specfun::log_gamma(i + j - alpha) - specfun::log_gamma(i + 1.0) - lf - e * std::numbers::ln2);
  }
  return s - std::exp(specfun::log_gamma(j - alpha) - lf);
}

double c_j_lower_bound(unsigned j, double alpha) {
  return std::pow(2.0, alpha - j) * alpha * std::exp(specfun::log_gamma(j - alpha) - specfun::log_gamma(j + 1.0));
}

const char* to_string(LilRegime r) { return r == LilRegime::Log ? "log" : "loglog"; }

ConstantSet asymptotic_constants(const RhoSpec& spec, unsigned j) {
  if (j == 0) throw DomainError("asymptotic_constants: j must be >= 1");
  validate(spec);
  ConstantSet c;
  const double jd = j;
  auto dehaan_var = [j] {
    double s = std::numbers::ln2;
    for (unsigned k = 1; k < j; ++k)
      s -= std::exp(specfun::log_gamma(2.0 * k) - 2.0 * specfun::log_gamma(k + 1.0) - 2.0 * k * std::numbers::ln2);
    return s;
  };
  std::visit(
      Overloaded{
          [&](const PowerLaw& v) {
            const double a = v.alpha;
            c.mean_constant = std::exp(specfun::log_gamma(jd - a) - specfun::log_gamma(jd));
            c.mean_scale = "rho";
            c.variance_constant = c_j(j, a);
            c.variance_scale = "rho";
            c.kstar_constant = a * std::exp(specfun::log_gamma(jd - a) - specfun::log_gamma(jd + 1.0));
            c.kstar_scale = "rho";
            c.lil_constant = std::numbers::sqrt2;
            c.regime = LilRegime::LogLog;
          },
          [&](const BorderlinePower&) {
            if (j == 1) {
              c.mean_constant = 1.0;
              c.mean_scale = "t_hat_L";
              c.variance_constant = 1.0;
              c.variance_scale = "t_hat_L";
              c.kstar_constant = 1.0;
              c.kstar_scale = "rho";
              c.upper_bound_only = true;
            } else {
              c.mean_constant = 1.0 / (jd - 1.0);
              c.mean_scale = "rho";
              c.variance_constant = std::exp(specfun::log_gamma(2.0 * jd - 2.0) - 2.0 * specfun::log_gamma(jd) -
                                             (2.0 * jd - 3.0) * std::numbers::ln2);
              c.variance_scale = "rho";
              c.kstar_constant = 1.0 / (jd * (jd - 1.0));
              c.kstar_scale = "rho";
            }
            c.lil_constant = std::numbers::sqrt2;
            c.regime = LilRegime::LogLog;
          },
          [&](const DeHaanPoly& v) {
            c.mean_constant = 1.0;
            c.mean_scale = "rho";
            c.variance_constant = dehaan_var();
            c.variance_scale = "ell";
            c.kstar_constant = 1.0 / jd;
            c.kstar_scale = "ell";
            c.lil_constant = std::sqrt(2.0 / v.beta);
            c.regime = LilRegime::Log;
          },
          [&](const DeHaanStretched& v) {
            c.mean_constant = 1.0;
            c.mean_scale = "rho";
            c.variance_constant = dehaan_var();
            c.variance_scale = "ell";
            c.kstar_constant = 1.0 / jd;
            c.kstar_scale = "ell";
            c.lil_constant = std::sqrt(2.0 / v.lambda);
            c.regime = LilRegime::LogLog;
          },
          [&](const Explicit&) { throw DomainError("asymptotic_constants: finite box families have no asymptotics"); }},
      spec.variant);
  return c;
}

}  // namespace indsum::karlin
