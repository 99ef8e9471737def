#pragma once

// Seeded randomness and the stable 64-bit unit hash.
//
// Engines are std::mt19937_64 (bit-exact by the standard). Distributions come
// from Boost.Random, whose algorithms are fixed across platforms, unlike the
// implementation-defined std:: distributions.

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include <boost/random/uniform_int_distribution.hpp>

namespace spillover {

using Rng = std::mt19937_64;

/// SplitMix64 finalizer. Constants: 0xbf58476d1ce4e5b9, 0x94d049bb133111eb,
/// shifts 30/27/31. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Hash used to place randomization units into buckets:
///   H(id, salt) = mix64(id ^ mix64(salt + 0x9e3779b97f4a7c15))
/// Part of the file-format contract; changing it re-randomizes every
/// persisted assignment.
constexpr std::uint64_t unit_hash(std::uint64_t id, std::uint64_t salt) noexcept {
  return mix64(id ^ mix64(salt + 0x9e3779b97f4a7c15ULL));
}

/// Independent child seed for a (base, tag) pair.
constexpr std::uint64_t derive_seed(std::uint64_t base, std::uint64_t tag) noexcept {
  return mix64(base ^ mix64(tag + 0x632be59bd9b4e019ULL));
}

/// Uniform integer in [0, n). n must be positive.
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  boost::random::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

/// Fisher-Yates shuffle with a platform-stable index draw.
template <typename T>
void shuffle(std::span<T> values, Rng& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = uniform_index(rng, i);
    std::swap(values[i - 1], values[j]);
  }
}

/// `count` distinct indices drawn uniformly from [0, n), in draw order.
inline std::vector<std::size_t> sample_without_replacement(std::size_t n, std::size_t count, Rng& rng) {
  std::vector<std::size_t> pool(n);
  for (std::size_t i = 0; i < n; ++i) pool[i] = i;
  for (std::size_t i = 0; i < count && i < n; ++i) {
    std::size_t j = i + uniform_index(rng, n - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(count < n ? count : n);
  return pool;
}

}  // namespace spillover
