// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace captk {

// Counter-based generator: value(i) depends only on (seed, stream, i), never
// on call order, so draws are reproducible under any scheduling.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(mix(mix(seed ^ 0x9e3779b97f4a7c15ull) ^ stream)) {}

  std::uint64_t bits(std::uint64_t counter) const { return mix(base_ + counter * 0x9e3779b97f4a7c15ull); }

  // uniform in [0,1)
  double uniform(std::uint64_t counter) const {
    return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
  }

  // uniform in [lo,hi)
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t base_;
};

}  // namespace captk
