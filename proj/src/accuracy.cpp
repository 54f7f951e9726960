#include "indsum/accuracy.hpp"

#include <algorithm>
#include <cmath>

#include "indsum/errors.hpp"

namespace indsum {

void Accuracy::validate() const {
  if (!(abs_tol >= 0.0) || !(rel_tol >= 0.0))
    throw DomainError("accuracy: tolerances must be nonnegative");
  if (abs_tol == 0.0 && rel_tol == 0.0)
    throw DomainError("accuracy: abs_tol and rel_tol cannot both be zero");
  if (max_terms == 0) throw DomainError("accuracy: max_terms must be >= 1");
}

double Accuracy::allowed(double value) const {
  const double v = std::fabs(value);
  return std::max({abs_tol, rel_tol * v, kRoundoff * v});
}

}  // namespace indsum
