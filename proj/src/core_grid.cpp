#include <cmath>
#include <functional>
#include <string>

#include "indsum/core.hpp"
#include "indsum/errors.hpp"

namespace indsum {

std::vector<double> upper_levels(double mu, double q, double kappa, double varrho, Index n_max) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw DomainError("upper grid: kappa must be in (0,1)");
  if (!(varrho > 0.0 && varrho < 1.0)) throw DomainError("upper grid: varrho must be in (0,1)");
  if (!(mu >= 1.0)) throw DomainError("upper grid: mu must be >= 1");
  if (!(q >= 0.0)) throw DomainError("upper grid: q must be >= 0");
  std::vector<double> v(n_max);
  const double mr = mu + varrho;
  const double qr = q + varrho;
  for (Index n = 1; n <= n_max; ++n) {
    const double x = static_cast<double>(n);
    v[n - 1] = mu == 1.0 ? std::exp(std::pow(x, (1.0 - kappa) / (qr + 1.0)))
                         : std::pow(x, mr * (1.0 - kappa) / (mr - 1.0));
  }
  return v;
}

std::vector<double> lower_levels(double mu, double q, double gamma, Index n_max) {
  if (!(gamma > 0.0)) throw DomainError("lower grid: gamma must be > 0");
  if (!(mu >= 1.0)) throw DomainError("lower grid: mu must be >= 1");
  if (!(q >= 0.0)) throw DomainError("lower grid: q must be >= 0");
  std::vector<double> w(n_max);
  for (Index n = 1; n <= n_max; ++n) {
    const double x = static_cast<double>(n);
    w[n - 1] = mu == 1.0 ? std::exp(std::pow(x, (1.0 + gamma) / (q + 1.0)))
                         : std::pow(x, (1.0 + gamma) / (mu - 1.0));
  }
  return w;
}

namespace {

struct Crossing {
  double time;
  bool at_lower_horizon;
};

// inf{t > 0 : f(t) > level} for nondecreasing f.
Crossing first_crossing(const std::function<double(double)>& f, double level, double start,
                        const GridOptions& opts) {
  double lo = 0.0;
  double hi = std::max(start, opts.lower_horizon);
  if (f(hi) > level) {
    // shrink towards the lower horizon
    for (;;) {
      const double mid = 0.5 * hi;
      if (mid < opts.lower_horizon) return {opts.lower_horizon, true};
      if (f(mid) > level) {
        hi = mid;
      } else {
        lo = mid;
        break;
      }
    }
  } else {
    lo = hi;
    for (;;) {
      hi = 2.0 * lo;
      if (hi > opts.upper_horizon)
        throw HorizonError("grid: level " + std::to_string(level) + " not reached within horizon");
      if (f(hi) > level) break;
      lo = hi;
    }
  }
  while (hi - lo > opts.rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (f(mid) > level)
      hi = mid;
    else
      lo = mid;
  }
  return {hi, false};
}

CheckpointGrid build(GridKind kind, std::vector<double> levels,
                     const std::function<double(double)>& f, const GridOptions& opts) {
  CheckpointGrid g;
  g.kind = kind;
  g.levels = std::move(levels);
  g.times.reserve(g.levels.size());
  double start = 1.0;
  for (double level : g.levels) {
    const auto c = first_crossing(f, level, start, opts);
    g.times.push_back(c.time);
    g.at_lower_horizon.push_back(c.at_lower_horizon);
    start = std::max(c.time, 1.0);
  }
  return g;
}

}  // namespace

CheckpointGrid upper_grid(const IndicatorModel& model, double kappa, double varrho, Index n_max,
                          const Accuracy& acc, const GridOptions& opts) {
  auto f = [&](double t) { return model_mean(model, t, acc); };
  auto g = build(GridKind::Upper, upper_levels(model.mu(), model.q(), kappa, varrho, n_max), f, opts);
  g.kappa = kappa;
  g.varrho = varrho;
  return g;
}

CheckpointGrid lower_grid(const IndicatorModel& model, double gamma, Index n_max,
                          const Accuracy& acc, const GridOptions& opts) {
  auto f = [&](double t) { return model_variance(model, t, acc); };
  auto g = build(GridKind::Lower, lower_levels(model.mu(), model.q(), gamma, n_max), f, opts);
  g.gamma = gamma;
  return g;
}

}  // namespace indsum
