#pragma once

#include <cstdint>
#include <random>

namespace coxveh {

using Rng = std::mt19937_64;

namespace detail {

// splitmix64; used only to decorrelate seeds, never as the working generator.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

// Deterministic per-stream generator derived from a master seed. Streams with
// distinct ids are independent for all practical purposes, and the mapping
// (master, id) -> stream is fixed, so realizations can be distributed across
// threads in any order without changing results.
inline Rng make_stream(std::uint64_t master_seed, std::uint64_t stream_id) {
  const std::uint64_t a = detail::splitmix64(master_seed);
  const std::uint64_t b = detail::splitmix64(a ^ detail::splitmix64(stream_id));
  return Rng(b);
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double exponential1(Rng& rng) {
  return std::exponential_distribution<double>(1.0)(rng);
}

inline long poisson(Rng& rng, double mean) {
  if (mean <= 0.0) return 0;
  return std::poisson_distribution<long>(mean)(rng);
}

inline bool bernoulli(Rng& rng, double p) {
  if (p <= 0.0) return false;
  if (p >= 1.0) return true;
  return std::bernoulli_distribution(p)(rng);
}

}  // namespace coxveh
