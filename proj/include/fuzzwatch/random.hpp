#pragma once

#include <cstdint>
#include <random>

namespace fuzzwatch {

/// Independent generator for stream `stream` of a master seed. The split is a pure function of
/// (seed, stream), which is what makes ensembles reproducible under any thread count.
inline std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x66757a7aU};
  return std::mt19937_64(seq);
}

/// Engine plus the normal distribution bound to it (the distribution caches a variate).
struct RandomStream {
  std::mt19937_64 engine;
  std::normal_distribution<double> normal{0.0, 1.0};
  std::uniform_real_distribution<double> uniform{0.0, 1.0};

  RandomStream(std::uint64_t seed, std::uint64_t stream) : engine(make_stream(seed, stream)) {}

  double gaussian() { return normal(engine); }
  double unit() { return uniform(engine); }
};

}  // namespace fuzzwatch
