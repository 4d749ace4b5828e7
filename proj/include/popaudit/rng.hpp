// Copyright 2026 The popaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Deterministic random toolkit. std::mt19937_64 has a standard-mandated bit
// stream, but the std distributions do not, so every draw used by the library
// goes through the helpers below. Identical (input, seed) pairs therefore
// produce bit-identical results on any conforming platform.

#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace popaudit::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive seed derivation: mix(seed, a, b, ...) folds each tag in.
inline std::uint64_t mix(std::uint64_t seed) { return splitmix64(seed); }

template <typename... Tags>
std::uint64_t mix(std::uint64_t seed, std::uint64_t tag, Tags... rest) {
  return mix(splitmix64(seed ^ (tag + 0x9e3779b97f4a7c15ULL)), rest...);
}

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::span<const std::int32_t> values) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::int32_t v : values) {
    for (int byte = 0; byte < 4; ++byte) {
      h ^= static_cast<std::uint64_t>((static_cast<std::uint32_t>(v) >> (8 * byte)) & 0xffU);
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed) { return Engine(splitmix64(seed)); }

// Unbiased integer in [0, bound) by rejection.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t draw;
  do {
    draw = eng();
  } while (draw >= limit);
  return draw % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform_real(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

template <typename T>
void shuffle(Engine& eng, std::vector<T>& values) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(uniform_below(eng, i));
    std::swap(values[i - 1], values[j]);
  }
}

// k distinct indices drawn uniformly from [0, n), in draw order.
inline std::vector<std::int32_t> sample_indices(Engine& eng, std::int32_t n, std::int32_t k) {
  std::vector<std::int32_t> pool(static_cast<std::size_t>(n));
  for (std::int32_t i = 0; i < n; ++i) pool[static_cast<std::size_t>(i)] = i;
  std::vector<std::int32_t> out;
  out.reserve(static_cast<std::size_t>(k));
  for (std::int32_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_below(eng, static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
    out.push_back(pool[static_cast<std::size_t>(i)]);
  }
  return out;
}

// Geometric number of failures before the first success, P(success) = p.
inline std::uint64_t geometric(Engine& eng, double p) {
  if (p >= 1.0) return 0;
  double u = uniform_real(eng);
  if (u <= 0.0) u = 0x1.0p-53;
  return static_cast<std::uint64_t>(std::floor(std::log1p(-u) / std::log1p(-p)));
}

// Standard normal via Box-Muller (one value per call; deterministic stream).
inline double normal(Engine& eng) {
  double u1 = uniform_real(eng);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform_real(eng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

// Index draw proportional to weights given their inclusive cumulative sums.
inline std::size_t discrete_from_cdf(Engine& eng, std::span<const double> cumulative) {
  const double target = uniform_real(eng) * cumulative.back();
  std::size_t lo = 0, hi = cumulative.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (cumulative[mid] <= target) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

}  // namespace popaudit::rng
