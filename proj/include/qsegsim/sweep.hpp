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

#include <atomic>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qsegsim/analysis.hpp"
#include "qsegsim/matching.hpp"

namespace qsegsim {

inline uint64_t fnv1a(const std::string &s) {
    uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

inline int default_workers() {
    if (const char *env = std::getenv("QSEGSIM_WORKERS")) {
        int w = std::atoi(env);
        if (w > 0) {
            return w;
        }
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

// Runs `trials` independent trials across a worker pool. Each trial's RNG
// stream depends only on (seed, trial index), so results are identical for
// any worker count. The per-trial functor gets (worker, trial).
inline void parallel_trials(long trials, int workers,
                            const std::function<void(int, long)> &body) {
    if (workers <= 1) {
        for (long t = 0; t < trials; t++) {
            body(0, t);
        }
        return;
    }
    std::atomic<long> next{0};
    const long chunk = 256;
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; w++) {
        pool.emplace_back([&, w]() {
            while (true) {
                long begin = next.fetch_add(chunk);
                if (begin >= trials) {
                    return;
                }
                long end = std::min(begin + chunk, trials);
                for (long t = begin; t < end; t++) {
                    body(w, t);
                }
            }
        });
    }
    for (auto &th : pool) {
        th.join();
    }
}

struct SurfacePointResult {
    int d = 0, s = 0;
    double eps2 = 0;
    int rounds = 0;
    long trials = 0;
    long failures_z = 0;  // phase failures (z-type errors beat the decoder)
    long failures_x = 0;
    PerRoundRate p_l_z, p_l_x;
};

// One grid point of the memory experiment: fast-sampled trials, exact MWPM
// decoding on both sides, per-round rate extraction.
inline SurfacePointResult run_surface_point(int s, double eps2, int rounds, long trials,
                                            uint64_t seed, int workers) {
    SurfacePointResult res;
    res.s = s;
    res.d = s - 2;
    res.eps2 = eps2;
    res.rounds = rounds;
    res.trials = trials;

    auto lay = build_layout(s, 1);
    auto sched = schedule_round(lay);
    auto lx = lay.logical_x(0);
    auto lz = lay.logical_z(0);
    auto tab = MechanismTable::build(lay, sched, lx, lz);
    auto noise = derive_rates(eps2, lay.code_distance);
    auto dec = Decoder::build(tab, noise, rounds);

    uint64_t point_seed = seed ^ fnv1a("surface:" + std::to_string(s) + ":" +
                                       std::to_string(eps2) + ":" + std::to_string(rounds));
    std::atomic<long> fz{0}, fx{0};
    int W = std::max(1, workers);
    std::vector<TrialSampler> samplers(W, TrialSampler(tab, noise, rounds));
    std::vector<MatchingGraph::Workspace> wss(W);
    parallel_trials(trials, W, [&](int w, long t) {
        auto trial = samplers[w].run(point_seed, static_cast<uint64_t>(t));
        auto j = dec.judge(trial, wss[w]);
        if (j.phase_failure) {
            fz.fetch_add(1, std::memory_order_relaxed);
        }
        if (j.bit_failure) {
            fx.fetch_add(1, std::memory_order_relaxed);
        }
    });
    res.failures_z = fz.load();
    res.failures_x = fx.load();
    res.p_l_z = per_round_rate(res.failures_z, trials, rounds);
    res.p_l_x = per_round_rate(res.failures_x, trials, rounds);
    return res;
}

}  // namespace qsegsim
