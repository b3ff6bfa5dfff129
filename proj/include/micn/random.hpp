#ifndef MICN_RANDOM_HPP
#define MICN_RANDOM_HPP

#include <cstdint>
#include <random>

#include "micn/gf.hpp"

namespace micn {

using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Seed of the run-th experiment derived from a master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t run) {
  return splitmix64(master ^ splitmix64(run + 1));
}

inline gf::Element uniform_element(const gf::Field& field, Rng& rng) {
  return gf::Element(std::uniform_int_distribution<unsigned>(0, field.order() - 1)(rng));
}

inline gf::Element uniform_nonzero(const gf::Field& field, Rng& rng) {
  return gf::Element(std::uniform_int_distribution<unsigned>(1, field.order() - 1)(rng));
}

inline double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

}  // namespace micn

#endif  // MICN_RANDOM_HPP
