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

#include "qsegsim/blossom.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "qsegsim/rng.hpp"

using namespace qsegsim;

namespace {

int64_t matching_weight(const std::vector<int> &mate, const std::vector<MatchEdge> &edges) {
    std::vector<std::vector<int64_t>> w(mate.size(), std::vector<int64_t>(mate.size(), -1));
    for (const auto &e : edges) {
        if (w[e.u][e.v] < 0 || e.weight < w[e.u][e.v]) {
            w[e.u][e.v] = w[e.v][e.u] = e.weight;
        }
    }
    int64_t total = 0;
    for (int v = 0; v < static_cast<int>(mate.size()); v++) {
        if (mate[v] > v) {
            EXPECT_GE(w[v][mate[v]], 0) << "matched along a non-edge";
            total += w[v][mate[v]];
        }
    }
    return total;
}

// Exhaustive minimum over all perfect matchings.
int64_t brute_force_min(int n, const std::vector<MatchEdge> &edges, bool &feasible) {
    std::vector<std::vector<int64_t>> w(n, std::vector<int64_t>(n, -1));
    for (const auto &e : edges) {
        if (w[e.u][e.v] < 0 || e.weight < w[e.u][e.v]) {
            w[e.u][e.v] = w[e.v][e.u] = e.weight;
        }
    }
    int64_t best = -1;
    std::vector<int> left(n);
    std::iota(left.begin(), left.end(), 0);
    std::function<void(std::vector<int> &, int64_t)> rec = [&](std::vector<int> &rem,
                                                               int64_t acc) {
        if (rem.empty()) {
            if (best < 0 || acc < best) {
                best = acc;
            }
            return;
        }
        int a = rem[0];
        for (size_t k = 1; k < rem.size(); k++) {
            int b = rem[k];
            if (w[a][b] < 0) {
                continue;
            }
            std::vector<int> next;
            for (size_t m = 1; m < rem.size(); m++) {
                if (m != k) {
                    next.push_back(rem[m]);
                }
            }
            rec(next, acc + w[a][b]);
        }
    };
    rec(left, 0);
    feasible = best >= 0;
    return best;
}

TEST(Blossom, TwoNodes) {
    auto mate = WeightedMatcher::min_weight_perfect(2, {{0, 1, 7}});
    EXPECT_EQ(mate[0], 1);
    EXPECT_EQ(mate[1], 0);
}

TEST(Blossom, FourNodeTriangleTrap) {
    // Greedy would match the cheap central edge and get stuck or pay more.
    std::vector<MatchEdge> edges = {
        {0, 1, 1}, {1, 2, 1}, {2, 3, 1}, {0, 3, 10}, {0, 2, 4}, {1, 3, 4},
    };
    auto mate = WeightedMatcher::min_weight_perfect(4, edges);
    EXPECT_EQ(matching_weight(mate, edges), 2);  // (0,1) + (2,3)
}

TEST(Blossom, OddCycleNeedsBlossom) {
    // 6 nodes, two triangles joined by one edge; forces blossom shrinking.
    std::vector<MatchEdge> edges = {
        {0, 1, 2}, {1, 2, 2}, {0, 2, 2}, {3, 4, 2}, {4, 5, 2}, {3, 5, 2}, {2, 3, 1},
    };
    auto mate = WeightedMatcher::min_weight_perfect(6, edges);
    EXPECT_EQ(matching_weight(mate, edges), 5);  // (0,1),(2,3),(4,5)
}

TEST(Blossom, InfeasibleThrows) {
    EXPECT_THROW(WeightedMatcher::min_weight_perfect(4, {{0, 1, 1}}), std::runtime_error);
    EXPECT_THROW(WeightedMatcher::min_weight_perfect(3, {{0, 1, 1}}), std::invalid_argument);
}

TEST(Blossom, RandomGraphsMatchBruteForce) {
    auto rng = trial_rng(2024, 0);
    int tested = 0;
    for (int it = 0; it < 600; it++) {
        int n = 2 * (1 + static_cast<int>(rng() % 6));  // 2..12
        double density = 0.3 + 0.7 * uniform01(rng);
        std::vector<MatchEdge> edges;
        for (int u = 0; u < n; u++) {
            for (int v = u + 1; v < n; v++) {
                if (uniform01(rng) < density) {
                    edges.push_back({u, v, static_cast<int64_t>(rng() % 1000)});
                }
            }
        }
        bool feasible = false;
        int64_t want = brute_force_min(n, edges, feasible);
        if (!feasible) {
            EXPECT_THROW(WeightedMatcher::min_weight_perfect(n, edges), std::runtime_error);
            continue;
        }
        auto mate = WeightedMatcher::min_weight_perfect(n, edges);
        EXPECT_EQ(matching_weight(mate, edges), want) << "n=" << n << " it=" << it;
        tested++;
    }
    EXPECT_GT(tested, 300);
}

TEST(Blossom, LargeRandomSanity) {
    // Bigger instances: verify the matching is perfect and no single swap
    // of two pairs improves it (weak local optimality check).
    auto rng = trial_rng(77, 3);
    for (int it = 0; it < 5; it++) {
        int n = 150;
        std::vector<MatchEdge> edges;
        std::vector<std::vector<int64_t>> w(n, std::vector<int64_t>(n, -1));
        for (int u = 0; u < n; u++) {
            for (int v = u + 1; v < n; v++) {
                int64_t wt = static_cast<int64_t>(rng() % 100000);
                edges.push_back({u, v, wt});
                w[u][v] = w[v][u] = wt;
            }
        }
        auto mate = WeightedMatcher::min_weight_perfect(n, edges);
        for (int v = 0; v < n; v++) {
            ASSERT_GE(mate[v], 0);
            ASSERT_EQ(mate[mate[v]], v);
        }
        for (int a = 0; a < n; a++) {
            for (int c = a + 1; c < n; c++) {
                int b = mate[a], d = mate[c];
                if (b == c || d == a) {
                    continue;
                }
                EXPECT_LE(w[a][b] + w[c][d], std::min(w[a][c] + w[b][d], w[a][d] + w[b][c]));
            }
        }
    }
}

}  // namespace
