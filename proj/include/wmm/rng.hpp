/*
*   Copyright (c) 2026 wmm contributors
*
*   Licensed under the Apache License, Version 2.0 (the "License");
*   you may not use this file except in compliance with the License.
*   You may obtain a copy of the License at
*
*       http://www.apache.org/licenses/LICENSE-2.0
*
*   Unless required by applicable law or agreed to in writing, software
*   distributed under the License is distributed on an "AS IS" BASIS,
*   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
*   See the License for the specific language governing permissions and
*   limitations under the License.
*/
#ifndef WMM_RNG_HPP
#define WMM_RNG_HPP

#include <cmath>
#include <cstdint>

namespace wmm {

// splitmix64 finalizer. Bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// xoshiro256++ with splitmix64 seeding. Self-contained so that streams are
// bit-identical across platforms and standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) {
      sm += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = sm;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      word = z ^ (z >> 31);
    }
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on the open interval (0,1): bin centers of a 2^53 grid.
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
  }

  // Uniform on (-1,1), zero excluded only by measure.
  double uniform_symmetric() { return 2.0 * uniform() - 1.0; }

  // Standard normal via the polar method. The second coordinate is
  // discarded so the stream layout does not depend on call history.
  double normal() {
    for (;;) {
      const double u = uniform_symmetric();
      const double v = uniform_symmetric();
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) {
        return u * std::sqrt(-2.0 * std::log(s) / s);
      }
    }
  }

  // Index uniform on [0, k).
  std::size_t index(std::size_t k) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(k)) % k;
  }

  // Binomial as a sum of Bernoulli draws; n stays small in this library.
  long binomial(long n, double p) {
    long hits = 0;
    for (long i = 0; i < n; ++i) {
      if (uniform() < p) ++hits;
    }
    return hits;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t state_[4];
};

// Deterministic seed derivation for nested stream families.
inline std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t tag) {
  std::uint64_t h = mix64(master_seed);
  return mix64(h ^ (tag + 0x9e3779b97f4a7c15ULL));
}

// Deterministic substream derivation. Streams for distinct (a, b) pairs are
// decorrelated regardless of thread scheduling, which keeps every result
// independent of the parallelism degree.
inline Rng substream(std::uint64_t master_seed, std::uint64_t a,
                     std::uint64_t b = 0) {
  std::uint64_t h = mix64(master_seed);
  h = mix64(h ^ (a + 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (b + 0xbf58476d1ce4e5b9ULL));
  return Rng(h);
}

}  // namespace wmm

#endif  // WMM_RNG_HPP
