#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "indsum/errors.hpp"
#include "indsum/karlin.hpp"
#include "indsum/parallel.hpp"
#include "indsum/specfun.hpp"

namespace indsum::karlin {

BinomialSplit binomial_split(unsigned j, std::uint64_t n, double p) {
  if (n < j) return {0.0, 1.0};
  if (j == 0) return {1.0, 0.0};
  if (!(p > 0.0)) return {0.0, 1.0};
  if (p >= 1.0) return {1.0, 0.0};
  const double nd = static_cast<double>(n);
  const double lp = std::log(p);
  const double l1 = std::log1p(-p);
  double q = 0.0;
  for (unsigned a = 0; a < j; ++a) q += std::exp(specfun::log_binomial_small(nd, a) + a * lp + (nd - a) * l1);
  if (q < 0.5) return {1.0 - q, q};
  // small n p: sum the upper tail directly
  double term = std::exp(specfun::log_binomial_small(nd, j) + j * lp + (nd - j) * l1);
  double s = 0.0;
  const double odds = p / (1.0 - p);
  for (std::uint64_t i = j; i <= n; ++i) {
    s += term;
    if (term < s * 1e-17) break;
    term *= static_cast<double>(n - i) / static_cast<double>(i + 1) * odds;
  }
  return {s, 1.0 - s};
}

double det_mean(const KarlinModel& model, std::uint64_t n, const Accuracy& acc, int workers) {
  if (n == 0) throw DomainError("det_mean: n must be >= 1");
  const unsigned j = model.j();
  if (n < j) return 0.0;
  return box_series(model.boxes(), [j, n](double p) { return binomial_split(j, n, p).p; },
                    static_cast<double>(n), acc, workers);
}

namespace {

struct PairTables {
  unsigned j;
  double n;
  std::vector<double> p;
  std::vector<double> l1;    // log1p(-p)
  std::vector<double> T;     // T[(k-1) j + a] = C(n,a) p^a (1-p)^{n-a}
  std::vector<char> active;  // some T nonzero
  std::vector<double> lr;    // lr[a j + b] = log C(n-a,b) - log C(n,b)
};

PairTables make_tables(const KarlinModel& model, std::uint64_t n, Index window) {
  PairTables t;
  t.j = model.j();
  t.n = static_cast<double>(n);
  const unsigned j = t.j;
  t.p.resize(window);
  t.l1.resize(window);
  t.T.assign(window * j, 0.0);
  t.active.assign(window, 0);
  for (Index k = 1; k <= window; ++k) {
    const double p = model.boxes().p(k);
    t.p[k - 1] = p;
    t.l1[k - 1] = std::log1p(-p);
    bool any = false;
    for (unsigned a = 0; a < j; ++a) {
      if (a > n) continue;
      const double v = p >= 1.0 ? (a == n ? 1.0 : 0.0)
                                : std::exp(specfun::log_binomial_small(t.n, a) + a * std::log(p) + (t.n - a) * t.l1[k - 1]);
      t.T[(k - 1) * j + a] = v;
      any = any || v > 0.0;
    }
    t.active[k - 1] = any;
  }
  t.lr.assign(j * j, 0.0);
  for (unsigned a = 0; a < j; ++a)
    for (unsigned b = 0; b < j; ++b) {
      double s = 0.0;
      for (unsigned m = 0; m < b; ++m) s += std::log1p(-static_cast<double>(a) / (t.n - m));
      t.lr[a * j + b] = s;
    }
  return t;
}

// Cov(1_{A_i}, 1_{A_k}) = P(A_i^c A_k^c) - P(A_i^c) P(A_k^c), 0-based i != k
double pair_cov(const PairTables& t, std::size_t i, std::size_t k) {
  if (!t.active[i] || !t.active[k]) return 0.0;
  const unsigned j = t.j;
  const double pi = t.p[i];
  const double pk = t.p[k];
  const double x = pi * pk / ((1.0 - pi) * (1.0 - pk));
  const double D = std::log1p(-x);
  double s = 0.0;
  for (unsigned a = 0; a < j; ++a) {
    const double ta = t.T[i * j + a];
    if (ta == 0.0) continue;
    for (unsigned b = 0; b < j; ++b) {
      const double tb = t.T[k * j + b];
      if (tb == 0.0) continue;
      const double rest = t.n - a - b;
      if (rest < 0.0) {
        s -= ta * tb;
        continue;
      }
      double e = t.lr[a * j + b] - b * t.l1[i] - a * t.l1[k];
      if (rest > 0.0) e += rest * D;
      s += ta * tb * std::expm1(e);
    }
  }
  return s;
}

template <bool Serial>
double cross_impl(const KarlinModel& model, std::uint64_t n, Index window, int workers) {
  if (window < 2) return 0.0;
  const PairTables t = make_tables(model, n, window);
  std::vector<double> row(window, 0.0);
  auto row_sum = [&](std::int64_t k) {
    parallel::CompensatedSum s;
    for (std::int64_t i = 0; i < k; ++i) s.add(pair_cov(t, i, k));
    row[k] = s.value();
  };
  if constexpr (Serial) {
    for (std::int64_t k = 1; k < static_cast<std::int64_t>(window); ++k) row_sum(k);
  } else {
    const int w = parallel::resolve_workers(workers);
#pragma omp parallel for schedule(dynamic, 16) num_threads(w) if (w > 1)
    for (std::int64_t k = 1; k < static_cast<std::int64_t>(window); ++k) row_sum(k);
  }
  parallel::CompensatedSum total;
  for (double r : row) total.add(r);
  return 2.0 * total.value();
}

}  // namespace

double det_cross_sum(const KarlinModel& model, std::uint64_t n, Index window, int workers) {
  return cross_impl<false>(model, n, window, workers);
}

double det_cross_sum_serial(const KarlinModel& model, std::uint64_t n, Index window) {
  return cross_impl<true>(model, n, window, 1);
}

DetVariance det_var(const KarlinModel& model, std::uint64_t n, const Accuracy& acc, Index pair_cap, int workers) {
  if (n == 0) throw DomainError("det_var: n must be >= 1");
  if (pair_cap < 1) throw DomainError("det_var: pair_cap must be >= 1");
  acc.validate();
  const auto& boxes = model.boxes();
  const unsigned j = model.j();
  DetVariance out;
  out.diagonal = box_series(
      boxes,
      [j, n](double p) {
        const auto s = binomial_split(j, n, p);
        return specfun::bernoulli_variance(s.p, s.q);
      },
      static_cast<double>(n), acc, workers);

  out.window = std::min<Index>(pair_cap, boxes.size());
  out.cross = det_cross_sum(model, n, out.window, workers);

  if (out.window < boxes.size()) {
    // |Cov_ik| <= n p_k (1 + n p_k / (1 - p_k)) min(p_i, Q_i / (1 - p_i)),
    // summed over ordered pairs with an index beyond the window.
    const double nd = static_cast<double>(n);
    const Index w = out.window;
    const double s1 = boxes.sum_from(w + 1, [](double p) { return p; });
    const double s2 = boxes.sum_from(w + 1, [](double p) { return p * p; });
    const double pw = boxes.p(w + 1);
    double m = s1;
    for (Index i = 1; i <= w; ++i) {
      const double p = boxes.p(i);
      m += std::min(p, binomial_split(j, n, p).q / (1.0 - p));
    }
    out.omitted_bound = 2.0 * (nd * s1 + nd * nd * s2 / (1.0 - pw)) * m;
  }
  out.value = out.diagonal + out.cross;
  if (out.omitted_bound > acc.allowed(out.value))
    throw TruncationError("det_var: omitted pair bound " + std::to_string(out.omitted_bound) +
                          " exceeds tolerance; raise pair_cap or the tolerance");
  return out;
}

std::uint64_t Occupancy::count(Index k) const {
  for (const auto& [box, c] : nonempty)
    if (box == k) return c;
  return 0;
}

std::uint64_t Occupancy::total() const {
  std::uint64_t s = overflow;
  for (const auto& e : nonempty) s += e.second;
  return s;
}

std::uint64_t Occupancy::kj(unsigned j) const {
  std::uint64_t s = 0;
  for (const auto& e : nonempty)
    if (e.second >= j) ++s;
  return s;
}

std::uint64_t Occupancy::kj_star(unsigned j) const {
  std::uint64_t s = 0;
  for (const auto& e : nonempty)
    if (e.second == j) ++s;
  return s;
}

DetSampler::DetSampler(const BoxDistribution& boxes, Index k_cap) {
  if (k_cap == 0) throw DomainError("det_sample: k_cap must be >= 1");
  k_cap_ = std::min(k_cap, boxes.size());
  p_.resize(k_cap_);
  for (Index k = 1; k <= k_cap_; ++k) p_[k - 1] = boxes.p(k);
  tail_.assign(k_cap_ + 1, 0.0);
  tail_[k_cap_] = k_cap_ < boxes.size() ? boxes.sum_from(k_cap_ + 1, [](double p) { return p; }) : 0.0;
  for (Index k = k_cap_; k >= 1; --k) tail_[k - 1] = tail_[k] + p_[k - 1];
}

namespace {

// Binomial(r, q) conditioned on being >= 1.
std::uint64_t positive_binomial(std::uint64_t r, double q, RandomStream& rng) {
  if (q >= 1.0) return r;
  const double l1 = std::log1p(-q);
  const double log_p0 = static_cast<double>(r) * l1;
  if (log_p0 < -std::log(2.0)) {
    std::binomial_distribution<std::uint64_t> d(r, q);
    for (;;) {
      const auto c = d(rng.engine());
      if (c >= 1) return c;
    }
  }
  const double mass = -std::expm1(log_p0);
  const double u = rng.uniform() * mass;
  std::uint64_t c = 1;
  double pc = std::exp(std::log(static_cast<double>(r)) + std::log(q) + (static_cast<double>(r) - 1.0) * l1);
  double cum = pc;
  while (u > cum && c < r) {
    pc *= static_cast<double>(r - c) / static_cast<double>(c + 1) * (q / (1.0 - q));
    ++c;
    cum += pc;
  }
  return c;
}

}  // namespace

Occupancy DetSampler::sample(std::uint64_t n, RandomStream& rng) const {
  Occupancy occ;
  std::uint64_t r = n;
  Index pos = 0;  // 0-based index of the next box to consider
  while (r > 0) {
    if (pos >= k_cap_ || !(tail_[pos] > 0.0)) {
      occ.overflow += r;
      break;
    }
    // P{first nonempty box >= m} = (S_m / S_pos)^r
    const double target = tail_[pos] * std::exp(std::log(rng.uniform_pos()) / static_cast<double>(r));
    // largest m in [pos, k_cap] with tail_[m] >= target
    Index lo = pos;
    Index hi = k_cap_;
    if (tail_[hi] >= target) {
      occ.overflow += r;
      break;
    }
    while (hi - lo > 1) {
      const Index mid = lo + (hi - lo) / 2;
      if (tail_[mid] >= target)
        lo = mid;
      else
        hi = mid;
    }
    const Index box = lo;
    const double q = std::min(1.0, p_[box] / tail_[box]);
    const std::uint64_t c = positive_binomial(r, q, rng);
    occ.nonempty.emplace_back(box + 1, c);
    r -= c;
    pos = box + 1;
  }
  return occ;
}

Occupancy det_sample(const KarlinModel& model, std::uint64_t n, Index k_cap, RandomStream& rng) {
  return DetSampler(model.boxes(), k_cap).sample(n, rng);
}

const char* to_string(ExoticVerdict v) {
  switch (v) {
    case ExoticVerdict::TendsToZero: return "tends_to_zero";
    case ExoticVerdict::BoundedAway: return "bounded_away_from_zero";
    case ExoticVerdict::Inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

ExoticProbe exotic_condition_probe(const std::function<double(double)>& log_hat_L_of_log_t, double gamma,
                                   std::uint64_t n_first, std::uint64_t n_last) {
  if (!(gamma > 0.0)) throw DomainError("exotic probe: gamma must be > 0");
  if (n_first < 1 || n_last <= n_first) throw DomainError("exotic probe: need 1 <= n_first < n_last");
  ExoticProbe out;
  for (std::uint64_t n = n_first; n <= n_last; ++n) {
    const double u0 = std::pow(static_cast<double>(n), 1.0 + gamma);
    const double u1 = std::pow(static_cast<double>(n + 1), 1.0 + gamma);
    out.n.push_back(n);
    out.ratio.push_back(std::exp(log_hat_L_of_log_t(u1) - log_hat_L_of_log_t(u0)));
  }
  const double first = out.ratio.front();
  const double last = out.ratio.back();
  if (last < 0.05 && last < first)
    out.verdict = ExoticVerdict::TendsToZero;
  else if (last > 0.5 && last >= first * (1.0 - 1e-12))
    out.verdict = ExoticVerdict::BoundedAway;
  else
    out.verdict = ExoticVerdict::Inconclusive;
  return out;
}

ExoticProbe exotic_condition_probe(const RhoSpec& spec, double gamma, std::uint64_t n_first, std::uint64_t n_last) {
  const auto* v = std::get_if<BorderlinePower>(&spec.variant);
  if (!v) throw DomainError("exotic probe: only the alpha = 1 family is supported");
  if (!(gamma > 0.0)) throw DomainError("exotic probe: gamma must be > 0");
  const double b = v->log_exponent;
  const double log_c = -BoxDistribution(spec).log_z();
  // log L_hat at t = e^u
  auto f = [b, log_c](double u) { return log_c + (1.0 - b) * std::log(u) - std::log(b - 1.0); };
  return exotic_condition_probe(f, gamma, n_first, n_last);
}

}  // namespace indsum::karlin
