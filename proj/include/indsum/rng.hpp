#pragma once

#include <cstdint>
#include <random>

namespace indsum {

struct SeedRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// One replicate's generator. The state is a pure function of (seed, stream),
// so any partition of replicates over workers reproduces the same draws.
class RandomStream {
 public:
  using Engine = std::mt19937_64;

  RandomStream(std::uint64_t seed, std::uint64_t stream) : record_{seed, stream} {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x7f4a7c15u};
    engine_.seed(seq);
  }

  Engine& engine() { return engine_; }
  const SeedRecord& record() const { return record_; }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  // Uniform on (0, 1], safe under log.
  double uniform_pos() { return 1.0 - uniform(); }
  double gamma(double shape) {
    return gamma_(engine_, std::gamma_distribution<double>::param_type(shape, 1.0));
  }

 private:
  SeedRecord record_;
  Engine engine_;
  std::gamma_distribution<double> gamma_;
};

}  // namespace indsum
