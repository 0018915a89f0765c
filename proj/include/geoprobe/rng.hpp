// Copyright 2026 The geoprobe Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace geoprobe {

// splitmix64 finalizer. Used to derive well-separated stream seeds from
// (master seed, task, index) so that parallel and serial generation see
// identical per-instance streams.
constexpr uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr uint64_t derive_seed(uint64_t master, uint64_t a, uint64_t b,
                               uint64_t salt = 0) {
  uint64_t s = mix64(master);
  s = mix64(s ^ (a * 0x9e3779b97f4a7c15ull));
  s = mix64(s ^ (b * 0xc2b2ae3d27d4eb4full));
  if (salt) s = mix64(s ^ salt);
  return s;
}

// Deterministic random stream. std::mt19937_64 has a fixed, portable
// algorithm; the standard distributions do not, so bounded draws are
// implemented here (Lemire multiply-shift with rejection).
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform integer in [lo, hi], inclusive, unbiased.
  int uniform_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("Rng::uniform_int: lo > hi");
    uint64_t span = static_cast<uint64_t>(hi) - static_cast<uint64_t>(lo) + 1;
    return lo + static_cast<int>(bounded(span));
  }

  // Uniform real in [lo, hi). 53-bit mantissa construction.
  double uniform_real(double lo, double hi) {
    double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    return lo + u * (hi - lo);
  }

  bool coin() { return (next_u64() & 1) != 0; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i) {
      size_t j = bounded(i);
      std::swap(v[i - 1], v[j]);
    }
  }

  // k distinct values drawn from [lo, hi] without replacement.
  std::vector<int> sample_distinct(int lo, int hi, size_t k) {
    std::vector<int> pool;
    for (int v = lo; v <= hi; ++v) pool.push_back(v);
    if (k > pool.size())
      throw std::invalid_argument("Rng::sample_distinct: k exceeds range");
    shuffle(pool);
    pool.resize(k);
    return pool;
  }

 private:
  uint64_t bounded(uint64_t span) {
    // Lemire's method; unbiased and identical on every platform with
    // 128-bit multiply support.
    __uint128_t m = static_cast<__uint128_t>(next_u64()) * span;
    auto lo = static_cast<uint64_t>(m);
    if (lo < span) {
      uint64_t t = (0 - span) % span;
      while (lo < t) {
        m = static_cast<__uint128_t>(next_u64()) * span;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  std::mt19937_64 eng_;
};

}  // namespace geoprobe
