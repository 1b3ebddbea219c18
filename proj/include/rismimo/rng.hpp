// SPDX-License-Identifier: Apache-2.0
//
// ris-mimo-sim: uplink RIS-aided massive MIMO rate analysis and phase optimization
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RISMIMO_RNG_HPP
#define RISMIMO_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>

#include "rismimo/types.hpp"

namespace rismimo {

/// splitmix64 finalizer; used to derive independent substream seeds.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Reproducible random source: std::mt19937_64 (bit-exact by the standard)
/// with explicit uniform / Box-Muller transforms, so identical seeds give
/// identical streams independent of the standard library's distributions.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// Independent substream `stream` of the logical seed.
    static Rng substream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(mix64(seed ^ mix64(stream)));
    }

    /// Uniform on [0, 1), 53-bit resolution.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, bound).
    std::uint64_t integer(std::uint64_t bound) {
        // rejection-free modulo bias is negligible for the small bounds used here,
        // but stay exact anyway
        std::uint64_t threshold = (0ULL - bound) % bound;
        for (;;) {
            std::uint64_t r = gen_();
            if (r >= threshold) return r % bound;
        }
    }

    /// Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = two_pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    /// Circularly symmetric complex normal CN(0,1): Re and Im each N(0, 1/2).
    cplx cnormal() {
        double u1, u2;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        u2 = uniform();
        double r = std::sqrt(-std::log(u1));  // sqrt(-2 log u) / sqrt(2)
        double a = two_pi * u2;
        return {r * std::cos(a), r * std::sin(a)};
    }

  private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace rismimo

#endif
