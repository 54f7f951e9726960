#include <algorithm>
#include <cmath>
#include <string>

#include "indsum/core.hpp"
#include "indsum/errors.hpp"
#include "indsum/parallel.hpp"
#include "indsum/specfun.hpp"

namespace indsum {

Index IndicatorModel::saturation_index(double t, double eps) const {
  const Index limit = truncation_index(t, eps);
  double acc = 0.0;
  Index k = 0;
  while (k < limit) {
    acc += complement(k + 1, t);
    if (acc >= eps) break;
    ++k;
  }
  return k;
}

FixedTimesModel::FixedTimesModel(std::vector<double> times, double mu)
    : times_(std::move(times)), mu_(mu) {
  for (double x : times_)
    if (!(x >= 0.0)) throw DomainError("FixedTimesModel: activation times must be >= 0");
}

double FixedTimesModel::prob(Index k, double t) const {
  if (k == 0 || k > times_.size()) return 0.0;
  return times_[k - 1] <= t ? 1.0 : 0.0;
}

namespace {

struct SeriesRange {
  Index saturated;
  Index cutoff;
};

SeriesRange series_range(const IndicatorModel& model, double t, const Accuracy& acc) {
  acc.validate();
  if (!(t >= 0.0)) throw DomainError("moment series: t must be >= 0");
  const Index cutoff = model.series_cutoff(t, acc);
  const Index sat = std::min(cutoff, model.saturation_index(t, 0.25 * acc.abs_tol));
  if (cutoff - sat > acc.max_terms)
    throw TruncationError("moment series: " + std::to_string(cutoff - sat) +
                          " terms exceed max_terms at t=" + std::to_string(t));
  return {sat, cutoff};
}

template <bool Serial>
double mean_impl(const IndicatorModel& model, double t, const Accuracy& acc, int workers) {
  const auto r = series_range(model, t, acc);
  auto term = [&](Index k) { return model.prob(k, t); };
  double direct = 0.0;
  if constexpr (Serial)
    direct = parallel::block_sum_serial(r.saturated + 1, r.cutoff + 1, term);
  else
    direct = parallel::block_sum(r.saturated + 1, r.cutoff + 1, term, workers);
  return static_cast<double>(r.saturated) + direct +
         model.tail_sum(Moment::Mean, r.cutoff + 1, t, acc);
}

template <bool Serial>
double var_impl(const IndicatorModel& model, double t, const Accuracy& acc, int workers) {
  const auto r = series_range(model, t, acc);
  auto term = [&](Index k) {
    const double p = model.prob(k, t);
    return specfun::bernoulli_variance(p, model.complement(k, t));
  };
  double direct = 0.0;
  if constexpr (Serial)
    direct = parallel::block_sum_serial(r.saturated + 1, r.cutoff + 1, term);
  else
    direct = parallel::block_sum(r.saturated + 1, r.cutoff + 1, term, workers);
  return direct + model.tail_sum(Moment::Variance, r.cutoff + 1, t, acc);
}

}  // namespace

double mean_b(const IndicatorModel& model, double t, const Accuracy& acc, int workers) {
  return mean_impl<false>(model, t, acc, workers);
}
double var_a(const IndicatorModel& model, double t, const Accuracy& acc, int workers) {
  return var_impl<false>(model, t, acc, workers);
}
double mean_b_serial(const IndicatorModel& model, double t, const Accuracy& acc) {
  return mean_impl<true>(model, t, acc, 1);
}
double var_a_serial(const IndicatorModel& model, double t, const Accuracy& acc) {
  return var_impl<true>(model, t, acc, 1);
}

double model_mean(const IndicatorModel& model, double t, const Accuracy& acc, int workers) {
  if (auto v = model.closed_form_mean(t)) return *v;
  return mean_b(model, t, acc, workers);
}

double model_variance(const IndicatorModel& model, double t, const Accuracy& acc, int workers) {
  if (auto v = model.closed_form_variance(t)) return *v;
  return var_a(model, t, acc, workers);
}

}  // namespace indsum
