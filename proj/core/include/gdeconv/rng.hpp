#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gdeconv {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t mix_seed(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic seed for a path of integers, e.g. (base_seed, cell, trial).
constexpr std::uint64_t derive_seed(std::initializer_list<std::uint64_t> path) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t v : path) h = mix_seed(h ^ mix_seed(v));
  return h;
}

// Stream tags for the independent draws inside one trial.
enum class Stream : std::uint64_t { graph = 1, inputs = 2, filter = 3 };

constexpr std::uint64_t stream_seed(std::uint64_t trial_seed, Stream s,
                                    std::uint64_t attempt = 0) noexcept {
  return derive_seed({trial_seed, static_cast<std::uint64_t>(s), attempt});
}

}  // namespace gdeconv
