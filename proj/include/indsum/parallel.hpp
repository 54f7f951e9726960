#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <omp.h>

namespace indsum::parallel {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// 0 means "whatever the OpenMP runtime offers".
inline int resolve_workers(int requested) {
  if (requested > 0) return requested;
  return std::max(1, omp_get_max_threads());
}

inline constexpr std::uint64_t kBlock = 4096;

// Sum of term(i) for i in [begin, end). The range is cut into fixed blocks;
// each block is summed with compensation and the block partials are reduced
// in index order, so the result does not depend on the worker count.
template <class Term>
double block_sum(std::uint64_t begin, std::uint64_t end, const Term& term, int workers) {
  if (end <= begin) return 0.0;
  const std::uint64_t n = end - begin;
  const std::uint64_t nblocks = (n + kBlock - 1) / kBlock;
  std::vector<double> partial(nblocks, 0.0);
  const int w = resolve_workers(workers);
#pragma omp parallel for schedule(dynamic, 1) num_threads(w) if (nblocks > 1 && w > 1)
  for (std::int64_t b = 0; b < static_cast<std::int64_t>(nblocks); ++b) {
    const std::uint64_t lo = begin + static_cast<std::uint64_t>(b) * kBlock;
    const std::uint64_t hi = std::min(end, lo + kBlock);
    CompensatedSum s;
    for (std::uint64_t i = lo; i < hi; ++i) s.add(term(i));
    partial[b] = s.value();
  }
  CompensatedSum total;
  for (double p : partial) total.add(p);
  return total.value();
}

// Reference: same blocking and reduction order, one thread, no OpenMP.
template <class Term>
double block_sum_serial(std::uint64_t begin, std::uint64_t end, const Term& term) {
  if (end <= begin) return 0.0;
  CompensatedSum total;
  for (std::uint64_t lo = begin; lo < end; lo += kBlock) {
    const std::uint64_t hi = std::min(end, lo + kBlock);
    CompensatedSum s;
    for (std::uint64_t i = lo; i < hi; ++i) s.add(term(i));
    total.add(s.value());
  }
  return total.value();
}

}  // namespace indsum::parallel
