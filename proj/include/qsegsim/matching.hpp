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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <queue>
#include <stdexcept>
#include <vector>

#include "qsegsim/blossom.hpp"
#include "qsegsim/mechanism.hpp"

namespace qsegsim {

// Weights are -ln(p_edge), scaled to integers so the matching and its
// tie-breaking are exact and reproducible.
constexpr double kWeightScale = 1048576.0;  // 2^20

constexpr uint32_t kBoundaryNode = UINT32_MAX;

struct GraphEdge {
    uint32_t a = 0;
    uint32_t b = 0;             // == kBoundaryNode for boundary edges
    double prob = 0.0;          // parity-composed probability of merged mechanisms
    int64_t weight = 0;         // -ln(prob) * kWeightScale
    bool cross = false;         // correction flips the tracked logical
    std::vector<uint32_t> res;  // representative residual (data qubits)
    int mechanisms = 0;
};

// Space-time matching graph for one error side. Nodes are (stabiliser,
// round) detection sites; edges come from single-fault mechanisms, with
// probabilities of identical signatures parity-composed. Diagonal edges
// (different stabiliser and different round) arise from correlated errors
// in the measurement circuits.
class MatchingGraph {
   public:
    static MatchingGraph build(const MechanismTable &tab, const NoiseParams &noise, int rounds,
                               bool z_side) {
        MatchingGraph g;
        g.z_side_ = z_side;
        g.rounds_ = rounds;
        g.n_stabs_ = z_side ? tab.num_x_stabs() : tab.num_z_stabs();
        g.n_nodes_ = g.n_stabs_ * (rounds + 1);

        std::map<std::tuple<uint32_t, uint32_t, bool>, GraphEdge> acc;
        auto add_mech = [&](const SideSig &s, double p, int r) {
            if (p <= 0.0 || s.n_ev == 0) {
                return;
            }
            uint32_t a, b;
            if (s.n_ev == 1) {
                a = s.ev_stab[0] * (rounds + 1) + (r + s.ev_dr[0]);
                b = kBoundaryNode;
            } else {
                a = s.ev_stab[0] * (rounds + 1) + (r + s.ev_dr[0]);
                b = s.ev_stab[1] * (rounds + 1) + (r + s.ev_dr[1]);
                if (a > b) {
                    std::swap(a, b);
                }
            }
            auto key = std::make_tuple(a, b, s.cross);
            auto it = acc.find(key);
            if (it == acc.end()) {
                GraphEdge e;
                e.a = a;
                e.b = b;
                e.prob = p;
                e.cross = s.cross;
                e.res = s.res;
                e.mechanisms = 1;
                acc.emplace(key, std::move(e));
            } else {
                GraphEdge &e = it->second;
                e.prob = e.prob * (1.0 - p) + p * (1.0 - e.prob);
                e.mechanisms++;
            }
        };

        for (int r = 0; r < rounds; r++) {
            for (const auto &loc : tab.cnots) {
                for (int m = 0; m < 3; m++) {
                    add_mech(z_side ? loc.z[m] : loc.x[m], 4.0 * noise.eps2 / 15.0, r);
                }
            }
            for (const auto &loc : tab.idles) {
                add_mech(z_side ? loc.z : loc.x, 2.0 * noise.eps0 / 3.0, r);
            }
            for (const auto &loc : tab.init_h) {
                add_mech(z_side ? loc.z : loc.x, 2.0 * noise.eps1 / 3.0, r);
            }
            for (const auto &loc : tab.init_flips) {
                if (loc.z_side == z_side) {
                    add_mech(loc.sig, noise.epsI, r);
                }
            }
            for (const auto &loc : tab.measx_flips) {
                if (loc.z_side == z_side) {
                    add_mech(loc.sig, noise.epsM, r);
                    add_mech(loc.sig, 2.0 * noise.eps1 / 3.0, r);
                }
            }
            for (const auto &loc : tab.measz_flips) {
                if (loc.z_side == z_side) {
                    add_mech(loc.sig, noise.epsM, r);
                }
            }
        }

        g.edges_.reserve(acc.size());
        for (auto &[key, e] : acc) {
            if (e.prob <= 0.0 || e.prob >= 1.0) {
                throw std::logic_error("edge probability out of range");
            }
            e.weight = llround(-std::log(e.prob) * kWeightScale);
            g.edges_.push_back(std::move(e));
        }
        g.adj_.assign(g.n_nodes_, {});
        for (uint32_t i = 0; i < g.edges_.size(); i++) {
            const GraphEdge &e = g.edges_[i];
            g.adj_[e.a].push_back(i);
            if (e.b != kBoundaryNode) {
                g.adj_[e.b].push_back(i);
            }
        }
        g.compute_boundary_tree();
        return g;
    }

    int num_nodes() const {
        return n_nodes_;
    }
    int num_stabs() const {
        return n_stabs_;
    }
    int rounds() const {
        return rounds_;
    }
    const std::vector<GraphEdge> &edges() const {
        return edges_;
    }
    int64_t boundary_distance(uint32_t node) const {
        return bdist_[node];
    }

    struct Workspace {
        std::vector<int64_t> dist;
        std::vector<uint8_t> par;
        std::vector<int32_t> pred;
        std::vector<uint32_t> touched;
    };

    struct DecodeResult {
        // (i, j): defect indices matched together; (i, -1): boundary match.
        std::vector<std::pair<int, int>> pairs;
        bool correction_cross = false;
        int64_t total_weight = 0;
    };

    // Exact MWPM decode: complete defect graph from exact shortest paths
    // (with the provably-safe dominance prune), one virtual boundary mate
    // per defect, blossom matching on integer weights.
    DecodeResult decode(const std::vector<uint32_t> &defects, Workspace &ws) const {
        DecodeResult out;
        int D = static_cast<int>(defects.size());
        if (D == 0) {
            return out;
        }
        int64_t bmax = 0;
        bool all_boundary_reachable = true;
        for (int i = 0; i < D; i++) {
            int64_t b = bdist_[defects[i]];
            if (b < 0) {
                all_boundary_reachable = false;
            } else {
                bmax = std::max(bmax, b);
            }
        }
        std::vector<MatchEdge> medges;
        std::vector<std::vector<std::pair<int64_t, bool>>> pair_info(
            D, std::vector<std::pair<int64_t, bool>>(D, {-1, false}));
        for (int i = 0; i < D; i++) {
            // Any defect farther than limit is dominated by two boundary
            // matches and can be skipped exactly.
            int64_t limit = (all_boundary_reachable && bdist_[defects[i]] >= 0)
                                ? bdist_[defects[i]] + bmax
                                : -1;
            dijkstra(defects[i], limit, ws);
            for (int j = 0; j < D; j++) {
                if (j == i) {
                    continue;
                }
                int64_t dj = ws.dist[defects[j]];
                if (dj >= 0) {
                    pair_info[i][j] = {dj, ws.par[defects[j]] != 0};
                }
            }
        }
        for (int i = 0; i < D; i++) {
            int64_t bi = bdist_[defects[i]];
            for (int j = i + 1; j < D; j++) {
                auto [dij, cr] = pair_info[i][j];
                if (dij < 0) {
                    continue;
                }
                int64_t bj = bdist_[defects[j]];
                if (bi >= 0 && bj >= 0 && dij >= bi + bj) {
                    continue;
                }
                medges.push_back({i, j, dij});
            }
            if (bi >= 0) {
                medges.push_back({i, D + i, bi});
            }
        }
        for (int i = 0; i < D; i++) {
            for (int j = i + 1; j < D; j++) {
                medges.push_back({D + i, D + j, 0});
            }
        }
        auto mate = WeightedMatcher::min_weight_perfect(2 * D, medges);
        for (int i = 0; i < D; i++) {
            if (mate[i] >= D) {
                out.pairs.push_back({i, -1});
                out.correction_cross ^= (bpar_[defects[i]] != 0);
                out.total_weight += bdist_[defects[i]];
            } else if (mate[i] > i) {
                int j = mate[i];
                out.pairs.push_back({i, j});
                out.correction_cross ^= pair_info[i][j].second;
                out.total_weight += pair_info[i][j].first;
            }
        }
        return out;
    }

    // Correction support (data-qubit set) of a decode result, resolved
    // through explicit shortest-path edge composition.
    std::vector<uint32_t> correction_qubits(const std::vector<uint32_t> &defects,
                                            const DecodeResult &res, Workspace &ws) const {
        std::map<uint32_t, int> parity;
        auto add_edge_res = [&](uint32_t ei) {
            for (uint32_t q : edges_[ei].res) {
                parity[q] ^= 1;
            }
        };
        for (auto [i, j] : res.pairs) {
            if (j < 0) {
                uint32_t cur = defects[i];
                while (true) {
                    int32_t ei = bpred_[cur];
                    if (ei < 0) {
                        throw std::logic_error("broken boundary tree");
                    }
                    add_edge_res(ei);
                    const GraphEdge &e = edges_[ei];
                    if (e.b == kBoundaryNode) {
                        break;
                    }
                    cur = (e.a == cur) ? e.b : e.a;
                }
            } else {
                dijkstra(defects[i], -1, ws);
                uint32_t cur = defects[j];
                while (cur != defects[i]) {
                    int32_t ei = ws.pred[cur];
                    add_edge_res(ei);
                    const GraphEdge &e = edges_[ei];
                    cur = (e.a == cur) ? e.b : e.a;
                }
            }
        }
        std::vector<uint32_t> out;
        for (auto [q, p] : parity) {
            if (p) {
                out.push_back(q);
            }
        }
        return out;
    }

   private:
    void dijkstra(uint32_t src, int64_t limit, Workspace &ws) const {
        prepare(ws);
        using Item = std::pair<int64_t, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        ws.dist[src] = 0;
        ws.touched.push_back(src);
        heap.push({0, src});
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d != ws.dist[u]) {
                continue;
            }
            for (uint32_t ei : adj_[u]) {
                const GraphEdge &e = edges_[ei];
                if (e.b == kBoundaryNode) {
                    continue;
                }
                uint32_t v = (e.a == u) ? e.b : e.a;
                int64_t nd = d + e.weight;
                if (limit >= 0 && nd > limit) {
                    continue;
                }
                if (ws.dist[v] < 0 || nd < ws.dist[v]) {
                    if (ws.dist[v] < 0) {
                        ws.touched.push_back(v);
                    }
                    ws.dist[v] = nd;
                    ws.par[v] = ws.par[u] ^ (e.cross ? 1 : 0);
                    ws.pred[v] = static_cast<int32_t>(ei);
                    heap.push({nd, v});
                }
            }
        }
    }

    void prepare(Workspace &ws) const {
        if (ws.dist.size() != static_cast<size_t>(n_nodes_)) {
            ws.dist.assign(n_nodes_, -1);
            ws.par.assign(n_nodes_, 0);
            ws.pred.assign(n_nodes_, -1);
            ws.touched.clear();
        } else {
            for (uint32_t v : ws.touched) {
                ws.dist[v] = -1;
                ws.par[v] = 0;
                ws.pred[v] = -1;
            }
            ws.touched.clear();
        }
    }

    // Multi-source Dijkstra from the virtual boundary: distance, path
    // parity, and the first edge toward the boundary for every node.
    void compute_boundary_tree() {
        bdist_.assign(n_nodes_, -1);
        bpar_.assign(n_nodes_, 0);
        bpred_.assign(n_nodes_, -1);
        using Item = std::pair<int64_t, uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        for (uint32_t ei = 0; ei < edges_.size(); ei++) {
            const GraphEdge &e = edges_[ei];
            if (e.b == kBoundaryNode) {
                if (bdist_[e.a] < 0 || e.weight < bdist_[e.a]) {
                    bdist_[e.a] = e.weight;
                    bpar_[e.a] = e.cross ? 1 : 0;
                    bpred_[e.a] = static_cast<int32_t>(ei);
                }
            }
        }
        for (int v = 0; v < n_nodes_; v++) {
            if (bdist_[v] >= 0) {
                heap.push({bdist_[v], static_cast<uint32_t>(v)});
            }
        }
        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (d != bdist_[u]) {
                continue;
            }
            for (uint32_t ei : adj_[u]) {
                const GraphEdge &e = edges_[ei];
                if (e.b == kBoundaryNode) {
                    continue;
                }
                uint32_t v = (e.a == u) ? e.b : e.a;
                int64_t nd = d + e.weight;
                if (bdist_[v] < 0 || nd < bdist_[v]) {
                    bdist_[v] = nd;
                    bpar_[v] = bpar_[u] ^ (e.cross ? 1 : 0);
                    bpred_[v] = static_cast<int32_t>(ei);
                    heap.push({nd, v});
                }
            }
        }
    }

    bool z_side_ = true;
    int rounds_ = 0;
    int n_stabs_ = 0;
    int n_nodes_ = 0;
    std::vector<GraphEdge> edges_;
    std::vector<std::vector<uint32_t>> adj_;
    std::vector<int64_t> bdist_;
    std::vector<uint8_t> bpar_;
    std::vector<int32_t> bpred_;
};

// Two-sided decoder: phase errors (z-type residuals on X stabilisers,
// judged against logical X) and bit errors (the dual).
struct Decoder {
    MatchingGraph graph_z;
    MatchingGraph graph_x;

    static Decoder build(const MechanismTable &tab, const NoiseParams &noise, int rounds) {
        return Decoder{MatchingGraph::build(tab, noise, rounds, true),
                       MatchingGraph::build(tab, noise, rounds, false)};
    }

    struct Judgement {
        bool phase_failure = false;
        bool bit_failure = false;
    };

    Judgement judge(const FastTrial &trial, MatchingGraph::Workspace &ws) const {
        Judgement j;
        auto rz = graph_z.decode(trial.defects_z, ws);
        j.phase_failure = trial.cross_z ^ rz.correction_cross;
        auto rx = graph_x.decode(trial.defects_x, ws);
        j.bit_failure = trial.cross_x ^ rx.correction_cross;
        return j;
    }
};

}  // namespace qsegsim
