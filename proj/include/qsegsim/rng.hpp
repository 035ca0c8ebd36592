// Copyright 2026 qsegsim Contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qsegsim {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Per-trial RNG stream derived from (master seed, trial index), so results
// are independent of worker scheduling.
inline std::mt19937_64 trial_rng(uint64_t master_seed, uint64_t trial_id) {
    uint64_t s = splitmix64(master_seed ^ splitmix64(trial_id * 0xd1342543de82ef95ULL + 1));
    return std::mt19937_64(s);
}

inline double uniform01(std::mt19937_64 &rng) {
    // 53-bit mantissa uniform in [0,1).
    return (rng() >> 11) * 0x1.0p-53;
}

// Iterates the hit indices of independent Bernoulli(p) draws over `count`
// locations using geometric gap sampling. O(#hits) instead of O(count).
template <typename Fn>
inline void sample_bernoulli_hits(std::mt19937_64 &rng, size_t count, double p, Fn &&on_hit) {
    if (p <= 0.0 || count == 0) {
        return;
    }
    if (p >= 1.0) {
        for (size_t i = 0; i < count; i++) {
            on_hit(i);
        }
        return;
    }
    const double log1mp = std::log1p(-p);
    double i = -1.0;
    while (true) {
        double u = uniform01(rng);
        if (u <= 0.0) {
            u = 0x1.0p-53;
        }
        i += 1.0 + std::floor(std::log(u) / log1mp);
        if (i >= static_cast<double>(count)) {
            return;
        }
        on_hit(static_cast<size_t>(i));
    }
}

}  // namespace qsegsim
