#pragma once

#include <cstdint>

// Counter-based pseudo randomness. Every random quantity in the library is a
// pure function of (seed, stream), so results are reproducible bit for bit
// regardless of evaluation order or thread count.
namespace dyweights {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Hash of a (seed, stream) pair; streams index nodes, restarts, coefficients.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632BE59BD9B4E019ull));
}

// Uniform double in [0,1) from the top 53 bits.
inline double u01(std::uint64_t h) { return static_cast<double>(h >> 11) * 0x1.0p-53; }

// Uniform double in (-1,1); never returns exactly -1.
inline double usym(std::uint64_t h) { return 2.0 * u01(h) - 1.0 + 0x1.0p-53; }

// Small sequential generator for scratch vectors.
struct SplitMix {
  std::uint64_t state;
  explicit SplitMix(std::uint64_t seed) : state(splitmix64(seed)) {}
  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t x = state;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
  }
  double next_u01() { return u01(next()); }
  double next_usym() { return usym(next()); }
};

}  // namespace dyweights
