// Copyright 2026 The Sizeprobe Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIZEPROBE_RNG_HPP_
#define SIZEPROBE_RNG_HPP_

#include <cstdint>

namespace sizeprobe {

// SplitMix64. Self-contained so that campaigns replay identically regardless
// of the standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n), rejection-sampled to avoid modulo bias.
  std::uint64_t bounded(std::uint64_t n) {
    if (n < 2) return 0;
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
      std::uint64_t r = next();
      if (r >= threshold) return r % n;
    }
  }

  // Stream derivation for per-episode generators.
  static std::uint64_t deriveSeed(std::uint64_t campaign_seed, std::uint64_t episode_id) {
    Rng mixer(campaign_seed ^ (episode_id * 0x9e3779b97f4a7c15ULL + 0x613a3c0e4c35ULL));
    return mixer.next();
  }

 private:
  std::uint64_t state_;
};

}  // namespace sizeprobe

#endif  // SIZEPROBE_RNG_HPP_
