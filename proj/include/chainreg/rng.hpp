#ifndef CHAINREG_RNG_HPP
#define CHAINREG_RNG_HPP

#include <cstdint>

namespace chainreg {

// SplitMix64: 64-bit state, portable across platforms and compilers. Every
// experiment draw routes through this so traces are byte-reproducible.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  bool next_bool() { return (next() & 1ULL) != 0; }
};

}  // namespace chainreg

#endif
