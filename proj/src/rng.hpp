#pragma once

#include <cstdint>
#include <random>

namespace steer {

// splitmix64: used only to decorrelate substream seeds. Fixed constants from
// the reference implementation; output is a bijection of the input.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Named substreams of a base seed. Every randomized field draws from its own
// stream, so regenerating one field (or adding draws to it) never shifts the
// others. Values are part of the serialization contract: an instance file
// regenerated from its recorded seed must reproduce bit-identical data.
enum class Stream : std::uint64_t {
  InnateOpinion = 1,   // s_i
  LowerBound = 2,      // l_i
  UpperBound = 3,      // u_i
  InitialAlpha = 4,    // alpha0_i
  Perturbation = 5,    // innate-opinion tie-breaking noise
  EdgeWeights = 6,     // synthetic weight assignment over a topology
  BaselineChoice = 7,  // random budgeted baseline selection order
};

// Deterministic uniform generator. std::mt19937_64 has a fully specified
// state sequence, but the <random> distributions do not; we map raw 64-bit
// outputs to doubles ourselves so results are identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  Rng(std::uint64_t seed, Stream stream)
      : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(stream)))) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1): 53 random mantissa bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Uniform on (0, 1]: complements uniform01 so 0 is excluded.
  double uniform01_open_low() { return 1.0 - uniform01(); }

  // Uniform integer in [0, n). Rejection-free modulo bias is irrelevant for
  // n << 2^64 but we reject anyway to keep the draw exact.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace steer
