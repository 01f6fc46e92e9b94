// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstring>
#include <vector>

#include "captk/calculus.hpp"
#include "captk/rng.hpp"

namespace captk {

// Sum of Gaussian bumps; the reproducible "random smooth field" used by the
// extension-norm search, the vanishing-set checks and residual probes.
struct BumpField {
  int dim = 2;
  int count = 8;
  std::vector<double> center;  // count * dim
  std::vector<double> sigma;   // count
  std::vector<double> amp;     // count

  double eval(const Vec& x) const {
    double v = 0;
    for (int k = 0; k < count; ++k) {
      double r2 = 0;
      for (int i = 0; i < dim; ++i) {
        const double d = x[i] - center[k * dim + i];
        r2 += d * d;
      }
      v += amp[k] * std::exp(-r2 / (2.0 * sigma[k] * sigma[k]));
    }
    return v;
  }

  ScalarField sample(const Grid& g) const {
    return ScalarField::sample(g, [this](const Vec& x) { return eval(x); });
  }
};

// Bump centers uniform in the box, scales uniform in [scale_lo, scale_hi],
// amplitudes uniform in [-1,1] (first bump kept away from zero). The draw
// depends only on (rng, stream), never on call order.
inline BumpField random_bumps(int dim, const Aabb& box, double scale_lo, double scale_hi,
                              const CounterRng& rng, std::uint64_t stream, int count = 8) {
  BumpField f;
  f.dim = dim;
  f.count = count;
  f.center.resize(count * dim);
  f.sigma.resize(count);
  f.amp.resize(count);
  std::uint64_t ctr = stream * 1024;
  for (int k = 0; k < count; ++k) {
    for (int i = 0; i < dim; ++i) f.center[k * dim + i] = rng.uniform(ctr++, box.lo[i], box.hi[i]);
    f.sigma[k] = rng.uniform(ctr++, scale_lo, scale_hi);
    double a = rng.uniform(ctr++, -1.0, 1.0);
    if (k == 0 && std::abs(a) < 0.1) a = a < 0 ? -0.1 : 0.1;
    f.amp[k] = a;
  }
  return f;
}

inline std::uint64_t bump_fingerprint(const BumpField& f) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&h](double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h ^= bits;
    h *= 0x100000001b3ull;
  };
  for (double v : f.center) mix(v);
  for (double v : f.sigma) mix(v);
  for (double v : f.amp) mix(v);
  return h;
}

}  // namespace captk
