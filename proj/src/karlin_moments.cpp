#include <algorithm>
#include <cmath>
#include <string>

#include "indsum/errors.hpp"
#include "indsum/karlin.hpp"
#include "indsum/parallel.hpp"
#include "indsum/specfun.hpp"

namespace indsum::karlin {

namespace {

constexpr double kDirectThreshold = 1e-2;
constexpr Index kDirectMin = 256;
constexpr double kSmoothStep = 1e-3;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double mean_kernel(unsigned j, double lambda) { return specfun::poisson_tail(j, lambda); }

double var_kernel(unsigned j, double lambda) {
  const double q = specfun::poisson_pmf_prefix(j, lambda);
  const double p = specfun::poisson_tail(j, lambda);
  return specfun::bernoulli_variance(p, q);
}

double kstar_kernel(unsigned j, double lambda) {
  if (lambda == 0.0) return 0.0;
  return std::exp(specfun::log_poisson_pmf(j, lambda));
}

}  // namespace

// First k with log p_k - log p_{k+1} < kSmoothStep: from there on the terms
// vary slowly enough for the Euler-Maclaurin tail.
Index smooth_index(const BoxDistribution& boxes) {
  auto steep = [&](Index k) {
    const double x = static_cast<double>(k);
    return boxes.log_p(x) - boxes.log_p(x + 1.0) >= kSmoothStep;
  };
  Index lo = 1;
  Index hi = 2;
  while (steep(hi)) {
    lo = hi;
    if (hi > boxes.horizon() / 2) return boxes.horizon();
    hi *= 2;
  }
  while (hi - lo > 1) {
    const Index mid = lo + (hi - lo) / 2;
    (steep(mid) ? lo : hi) = mid;
  }
  return hi;
}

Index box_series_cutoff(const BoxDistribution& boxes, double scale) {
  if (boxes.finite()) return boxes.size() + 1;
  if (!(scale > 0.0)) return kDirectMin;
  const Index by_size = boxes.first_below(kDirectThreshold / scale);
  return std::max<Index>(kDirectMin, std::min(by_size, smooth_index(boxes)));
}

double box_series(const BoxDistribution& boxes, const std::function<double(double)>& g, double scale,
                  const Accuracy& acc, int workers) {
  acc.validate();
  const Index k0 = box_series_cutoff(boxes, scale);
  if (k0 - 1 > acc.max_terms)
    throw TruncationError("box series: " + std::to_string(k0 - 1) + " direct terms exceed max_terms");
  const double direct = parallel::block_sum(1, k0, [&](Index k) { return g(boxes.p(k)); }, workers);
  double err = 0.0;
  const double tail = boxes.sum_from(k0, g, &err);
  if (err > acc.allowed(direct + tail))
    throw TruncationError("box series: tail error estimate " + std::to_string(err) + " above tolerance");
  return direct + tail;
}

double box_series_serial(const BoxDistribution& boxes, const std::function<double(double)>& g, double scale,
                         const Accuracy& acc) {
  acc.validate();
  const Index k0 = box_series_cutoff(boxes, scale);
  if (k0 - 1 > acc.max_terms)
    throw TruncationError("box series: " + std::to_string(k0 - 1) + " direct terms exceed max_terms");
  const double direct = parallel::block_sum_serial(1, k0, [&](Index k) { return g(boxes.p(k)); });
  return direct + boxes.sum_from(k0, g);
}

KarlinModel::KarlinModel(std::shared_ptr<const BoxDistribution> boxes, unsigned j)
    : boxes_(std::move(boxes)), j_(j) {
  if (j_ == 0) throw DomainError("KarlinModel: j must be >= 1");
  if (!boxes_) throw DomainError("KarlinModel: no box distribution");
}

KarlinModel::KarlinModel(RhoSpec spec, unsigned j)
    : KarlinModel(std::make_shared<const BoxDistribution>(std::move(spec)), j) {}

std::string KarlinModel::id() const { return "karlin:" + variant_name(boxes_->spec()) + ":j=" + std::to_string(j_); }

double KarlinModel::prob(Index k, double t) const { return specfun::poisson_tail(j_, boxes_->p(k) * t); }

double KarlinModel::complement(Index k, double t) const {
  return specfun::poisson_pmf_prefix(j_, boxes_->p(k) * t);
}

Index KarlinModel::truncation_index(double t, double eps) const {
  if (!(t >= 0.0)) throw DomainError("karlin: t must be >= 0");
  if (boxes_->finite()) return boxes_->size();
  if (t == 0.0) return 0;
  // sum_{k>K} P{Poisson(p_k t) >= j} <= t^j/j! sum_{k>K} p_k^j <= t^j/j! int_K^inf p^j
  const double lead = std::exp(j_ * std::log(t) - specfun::log_gamma(j_ + 1.0));
  const unsigned jj = j_;
  auto bound = [&](Index K) {
    return lead * boxes_->integral_from(static_cast<double>(K), [jj](double p) { return std::pow(p, jj); });
  };
  Index lo = std::max<Index>(1, boxes_->first_below(1.0 / t));
  if (bound(lo) < eps) return lo;
  Index hi = 2 * lo;
  while (!(bound(hi) < eps)) {
    lo = hi;
    if (hi > boxes_->horizon() / 2) throw HorizonError("karlin truncation index beyond horizon");
    hi *= 2;
  }
  while (hi - lo > 1 && hi - lo > lo / 1024) {
    const Index mid = lo + (hi - lo) / 2;
    if (bound(mid) < eps)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

Index KarlinModel::saturation_index(double t, double eps) const {
  const Index limit = boxes_->finite() ? boxes_->size() : box_series_cutoff(*boxes_, t);
  double acc = 0.0;
  Index k = 0;
  while (k < limit) {
    acc += complement(k + 1, t);
    if (acc >= eps) break;
    ++k;
  }
  return k;
}

Index KarlinModel::dense_sampling_limit(double t, double /*eps*/) const {
  if (boxes_->finite()) return boxes_->size();
  if (!(t > 0.0)) return 0;
  return boxes_->first_below(0.25 / t) - 1;
}

double KarlinModel::sample_activation(Index k, RandomStream& rng) const {
  return rng.gamma(static_cast<double>(j_)) / boxes_->p(k);
}

double KarlinModel::mu() const {
  return std::visit(Overloaded{[](const DeHaanPoly& v) { return 1.0 + 1.0 / v.beta; },
                               [](const auto&) { return 1.0; }},
                    boxes_->spec().variant);
}

double KarlinModel::q() const {
  return std::visit(Overloaded{[](const DeHaanStretched& v) { return 1.0 / v.lambda - 1.0; },
                               [](const auto&) { return 0.0; }},
                    boxes_->spec().variant);
}

Index KarlinModel::series_cutoff(double t, const Accuracy&) const { return box_series_cutoff(*boxes_, t) - 1; }

double KarlinModel::tail_sum(Moment m, Index from, double t, const Accuracy& acc) const {
  const unsigned j = j_;
  double err = 0.0;
  const double v = m == Moment::Mean ? boxes_->sum_from(from, [j, t](double p) { return mean_kernel(j, p * t); }, &err)
                                     : boxes_->sum_from(from, [j, t](double p) { return var_kernel(j, p * t); }, &err);
  if (err > acc.allowed(v))
    throw TruncationError("moment tail: error estimate " + std::to_string(err) + " above tolerance");
  return v;
}

double mean_K(const BoxDistribution& boxes, unsigned j, double t, const Accuracy& acc, int workers) {
  if (!(t >= 0.0)) throw DomainError("mean_K: t must be >= 0");
  if (j == 0) return boxes.finite() ? static_cast<double>(boxes.size()) : INFINITY;
  return box_series(boxes, [j, t](double p) { return mean_kernel(j, p * t); }, t, acc, workers);
}

double mean_Kj(const KarlinModel& model, double t, const Accuracy& acc, int workers) {
  return mean_K(model.boxes(), model.j(), t, acc, workers);
}

double var_Kj(const KarlinModel& model, double t, const Accuracy& acc, int workers) {
  if (!(t >= 0.0)) throw DomainError("var_Kj: t must be >= 0");
  const unsigned j = model.j();
  return box_series(model.boxes(), [j, t](double p) { return var_kernel(j, p * t); }, t, acc, workers);
}

double mean_Kj_star(const KarlinModel& model, double t, const Accuracy& acc, int workers) {
  if (!(t >= 0.0)) throw DomainError("mean_Kj_star: t must be >= 0");
  const unsigned j = model.j();
  return box_series(model.boxes(), [j, t](double p) { return kstar_kernel(j, p * t); }, t, acc, workers);
}

double var_Kj_via_means(const KarlinModel& model, double t, const Accuracy& acc, int workers) {
  const unsigned j = model.j();
  double s = 0.0;
  for (unsigned i = 0; i < j; ++i) {
    const double log_w = specfun::log_gamma(i + j) - specfun::log_gamma(i + 1.0) - specfun::log_gamma(j) -
                         (i + j - 1.0) * std::log(2.0);
    s += std::exp(log_w) * mean_K(model.boxes(), i + j, 2.0 * t, acc, workers);
  }
  return s - mean_K(model.boxes(), j, t, acc, workers);
}

}  // namespace indsum::karlin
