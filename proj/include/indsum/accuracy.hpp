#pragma once

#include <cstdint>

namespace indsum {

struct Accuracy {
  double abs_tol = 1e-9;
  double rel_tol = 0.0;
  std::uint64_t max_terms = 10'000'000;

  // Throws DomainError when both tolerances are zero, either is negative,
  // or max_terms is zero.
  void validate() const;

  // Largest error accepted for a result of magnitude |value|. Never below
  // kRoundoff |value|, which double arithmetic cannot beat anyway.
  double allowed(double value) const;
};

inline constexpr double kRoundoff = 1e-14;

}  // namespace indsum
