#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <utility>

// The standard distributions are implementation-defined, so seeded runs would
// differ across standard libraries. These helpers only rely on the raw
// mt19937_64 output sequence, which is fully specified.
namespace spamfilter::detail {

using Engine = std::mt19937_64;

// Uniform integer in [0, bound), bound > 0. Rejection sampling, no modulo bias.
inline std::uint64_t uniform_below(Engine& engine, std::uint64_t bound) {
  // 2^64 mod bound; draws below it belong to an incomplete residue cycle.
  const std::uint64_t threshold = (0 - bound) % bound;
  std::uint64_t draw = engine();
  while (draw < threshold) draw = engine();
  return draw % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_unit(Engine& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(std::span<T> items, Engine& engine) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_below(engine, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace spamfilter::detail
