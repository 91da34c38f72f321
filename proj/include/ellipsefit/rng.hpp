#pragma once

#include <cstdint>
#include <random>

namespace ellipsefit {

// splitmix64 finalizer; used to derive independent stream seeds.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t master, std::uint64_t i0 = 0,
                                 std::uint64_t i1 = 0, std::uint64_t i2 = 0) {
  std::uint64_t s = mix64(master);
  s = mix64(s ^ i0);
  s = mix64(s ^ i1);
  s = mix64(s ^ i2);
  return s;
}

// Independent per-trial generator: trials indexed under a master seed are
// reproducible irrespective of evaluation order or thread count.
inline std::mt19937_64 stream_rng(std::uint64_t master, std::uint64_t i0 = 0,
                                  std::uint64_t i1 = 0, std::uint64_t i2 = 0) {
  return std::mt19937_64(stream_seed(master, i0, i1, i2));
}

}  // namespace ellipsefit
