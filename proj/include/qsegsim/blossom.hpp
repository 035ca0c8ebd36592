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

#include <cassert>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace qsegsim {

struct MatchEdge {
    int u, v;
    int64_t weight;
};

// Exact maximum-weight general matching (Galil's O(n^3) blossom algorithm,
// primal-dual with nested blossoms). Integer weights keep the duals exact.
// Minimum-weight perfect matching is obtained by complementing the weights
// and requiring maximum cardinality.
class WeightedMatcher {
   public:
    // Returns mate[v] (-1 if unmatched) of a maximum-weight matching; with
    // max_cardinality, among maximum-cardinality matchings.
    static std::vector<int> max_weight_matching(int n, const std::vector<MatchEdge> &edges,
                                                bool max_cardinality) {
        WeightedMatcher m(n, edges, max_cardinality);
        m.solve();
        return m.mate_;
    }

    // Minimum-weight perfect matching. Throws if no perfect matching exists.
    static std::vector<int> min_weight_perfect(int n, const std::vector<MatchEdge> &edges) {
        if (n == 0) {
            return {};
        }
        if (n % 2 != 0) {
            throw std::invalid_argument("perfect matching needs an even node count");
        }
        int64_t wmax = 0;
        for (const auto &e : edges) {
            wmax = std::max(wmax, e.weight);
        }
        std::vector<MatchEdge> flipped = edges;
        for (auto &e : flipped) {
            e.weight = wmax + 1 - e.weight;
        }
        auto mate = max_weight_matching(n, flipped, true);
        for (int v = 0; v < n; v++) {
            if (mate[v] < 0) {
                throw std::runtime_error("graph admits no perfect matching");
            }
        }
        return mate;
    }

   private:
    static constexpr int kNone = -1;
    static constexpr int64_t kInf = std::numeric_limits<int64_t>::max() / 4;

    int n_;
    bool maxcard_;
    std::vector<std::vector<int64_t>> w_;  // dense weight matrix (x2 internally via slack formula)
    std::vector<std::vector<uint8_t>> has_;
    std::vector<std::vector<uint8_t>> allow_;

    // Slots [0,n) are vertices, [n, 2n) are blossoms.
    std::vector<int8_t> label_;
    std::vector<std::pair<int, int>> labeledge_;
    std::vector<int> inblossom_;
    std::vector<int> parent_;
    std::vector<int> base_;
    std::vector<std::vector<int>> childs_;
    std::vector<std::vector<std::pair<int, int>>> bedges_;
    std::vector<std::vector<std::pair<int, int>>> mybest_;
    std::vector<uint8_t> has_mybest_;
    std::vector<std::pair<int, int>> bestedge_;
    std::vector<int64_t> dual_;   // vertices
    std::vector<int64_t> bdual_;  // blossoms
    std::vector<uint8_t> in_use_;
    std::vector<int> mate_;
    std::vector<int> queue_;

    WeightedMatcher(int n, const std::vector<MatchEdge> &edges, bool maxcard)
        : n_(n), maxcard_(maxcard) {
        w_.assign(n, std::vector<int64_t>(n, 0));
        has_.assign(n, std::vector<uint8_t>(n, 0));
        allow_.assign(n, std::vector<uint8_t>(n, 0));
        int64_t maxw = 0;
        for (const auto &e : edges) {
            if (e.u == e.v) {
                continue;
            }
            if (e.u < 0 || e.u >= n || e.v < 0 || e.v >= n) {
                throw std::out_of_range("matching edge endpoint out of range");
            }
            if (!has_[e.u][e.v] || e.weight > w_[e.u][e.v]) {
                w_[e.u][e.v] = w_[e.v][e.u] = e.weight;
                has_[e.u][e.v] = has_[e.v][e.u] = 1;
            }
            maxw = std::max(maxw, e.weight);
        }
        int slots = 2 * n;
        label_.assign(slots, 0);
        labeledge_.assign(slots, {kNone, kNone});
        inblossom_.resize(n);
        for (int v = 0; v < n; v++) {
            inblossom_[v] = v;
        }
        parent_.assign(slots, kNone);
        base_.assign(slots, kNone);
        for (int v = 0; v < n; v++) {
            base_[v] = v;
        }
        childs_.assign(slots, {});
        bedges_.assign(slots, {});
        mybest_.assign(slots, {});
        has_mybest_.assign(slots, 0);
        bestedge_.assign(slots, {kNone, kNone});
        dual_.assign(n, maxw);
        bdual_.assign(slots, 0);
        in_use_.assign(slots, 0);
        mate_.assign(n, kNone);
    }

    bool is_blossom(int b) const {
        return b >= n_;
    }

    int64_t slack(int v, int w) const {
        return dual_[v] + dual_[w] - 2 * w_[v][w];
    }

    void leaves_of(int b, std::vector<int> &out) const {
        if (!is_blossom(b)) {
            out.push_back(b);
            return;
        }
        for (int c : childs_[b]) {
            leaves_of(c, out);
        }
    }

    int alloc_blossom() {
        for (int b = n_; b < 2 * n_; b++) {
            if (!in_use_[b]) {
                in_use_[b] = 1;
                return b;
            }
        }
        throw std::logic_error("blossom slots exhausted");
    }

    void free_blossom(int b) {
        in_use_[b] = 0;
        childs_[b].clear();
        bedges_[b].clear();
        mybest_[b].clear();
        has_mybest_[b] = 0;
        parent_[b] = kNone;
        base_[b] = kNone;
        label_[b] = 0;
        labeledge_[b] = {kNone, kNone};
        bestedge_[b] = {kNone, kNone};
        bdual_[b] = 0;
    }

    void assign_label(int w, int t, int v) {
        int b = inblossom_[w];
        assert(label_[w] == 0 && label_[b] == 0);
        label_[w] = label_[b] = static_cast<int8_t>(t);
        if (v != kNone) {
            labeledge_[w] = labeledge_[b] = {v, w};
        } else {
            labeledge_[w] = labeledge_[b] = {kNone, kNone};
        }
        bestedge_[w] = bestedge_[b] = {kNone, kNone};
        if (t == 1) {
            std::vector<int> lv;
            leaves_of(b, lv);
            for (int x : lv) {
                queue_.push_back(x);
            }
        } else if (t == 2) {
            int bb = base_[b];
            assert(mate_[bb] != kNone);
            assign_label(mate_[bb], 1, bb);
        }
    }

    int scan_blossom(int v, int w) {
        std::vector<int> path;
        int found_base = kNone;
        while (v != kNone) {
            int b = inblossom_[v];
            if (label_[b] & 4) {
                found_base = base_[b];
                break;
            }
            assert(label_[b] == 1);
            path.push_back(b);
            label_[b] = 5;
            if (labeledge_[b].first == kNone) {
                assert(mate_[base_[b]] == kNone);
                v = kNone;
            } else {
                assert(labeledge_[b].first == mate_[base_[b]]);
                v = labeledge_[b].first;
                int b2 = inblossom_[v];
                assert(label_[b2] == 2);
                v = labeledge_[b2].first;
            }
            if (w != kNone) {
                std::swap(v, w);
            }
        }
        for (int b : path) {
            label_[b] = 1;
        }
        return found_base;
    }

    void add_blossom(int bse, int v, int w) {
        int bb = inblossom_[bse];
        int bv = inblossom_[v];
        int bw = inblossom_[w];
        int b = alloc_blossom();
        base_[b] = bse;
        parent_[b] = kNone;
        parent_[bb] = b;
        auto &path = childs_[b];
        auto &edgs = bedges_[b];
        path.clear();
        edgs.clear();
        edgs.push_back({v, w});
        while (bv != bb) {
            parent_[bv] = b;
            path.push_back(bv);
            edgs.push_back(labeledge_[bv]);
            assert(label_[bv] == 2 ||
                   (label_[bv] == 1 && labeledge_[bv].first == mate_[base_[bv]]));
            v = labeledge_[bv].first;
            bv = inblossom_[v];
        }
        path.push_back(bb);
        std::reverse(path.begin(), path.end());
        std::reverse(edgs.begin(), edgs.end());
        while (bw != bb) {
            parent_[bw] = b;
            path.push_back(bw);
            edgs.push_back({labeledge_[bw].second, labeledge_[bw].first});
            assert(label_[bw] == 2 ||
                   (label_[bw] == 1 && labeledge_[bw].first == mate_[base_[bw]]));
            w = labeledge_[bw].first;
            bw = inblossom_[w];
        }
        assert(label_[bb] == 1);
        label_[b] = 1;
        labeledge_[b] = labeledge_[bb];
        bdual_[b] = 0;
        std::vector<int> lv;
        leaves_of(b, lv);
        for (int x : lv) {
            if (label_[inblossom_[x]] == 2) {
                queue_.push_back(x);
            }
            inblossom_[x] = b;
        }
        // Compute the blossom's least-slack edges towards S-blossoms.
        std::vector<std::pair<int, int>> best_to(2 * n_, {kNone, kNone});
        for (int child : path) {
            std::vector<std::pair<int, int>> nblist;
            if (is_blossom(child)) {
                if (has_mybest_[child]) {
                    nblist = mybest_[child];
                    mybest_[child].clear();
                    has_mybest_[child] = 0;
                } else {
                    std::vector<int> cl;
                    leaves_of(child, cl);
                    for (int x : cl) {
                        for (int y = 0; y < n_; y++) {
                            if (y != x && has_[x][y]) {
                                nblist.push_back({x, y});
                            }
                        }
                    }
                }
            } else {
                for (int y = 0; y < n_; y++) {
                    if (y != child && has_[child][y]) {
                        nblist.push_back({child, y});
                    }
                }
            }
            for (auto [i, j] : nblist) {
                if (inblossom_[j] == b) {
                    std::swap(i, j);
                }
                int bj = inblossom_[j];
                if (bj != b && label_[bj] == 1 &&
                    (best_to[bj].first == kNone ||
                     slack(i, j) < slack(best_to[bj].first, best_to[bj].second))) {
                    best_to[bj] = {i, j};
                }
            }
            bestedge_[child] = {kNone, kNone};
        }
        mybest_[b].clear();
        for (auto &e : best_to) {
            if (e.first != kNone) {
                mybest_[b].push_back(e);
            }
        }
        has_mybest_[b] = 1;
        bestedge_[b] = {kNone, kNone};
        for (auto &e : mybest_[b]) {
            if (bestedge_[b].first == kNone ||
                slack(e.first, e.second) < slack(bestedge_[b].first, bestedge_[b].second)) {
                bestedge_[b] = e;
            }
        }
    }

    void expand_blossom(int b, bool endstage) {
        for (size_t ci = 0; ci < childs_[b].size(); ci++) {
            int s = childs_[b][ci];
            parent_[s] = kNone;
            if (!is_blossom(s)) {
                inblossom_[s] = s;
            } else if (endstage && bdual_[s] == 0) {
                expand_blossom(s, endstage);
            } else {
                std::vector<int> lv;
                leaves_of(s, lv);
                for (int x : lv) {
                    inblossom_[x] = s;
                }
            }
        }
        if (!endstage && label_[b] == 2) {
            int entrychild = inblossom_[labeledge_[b].second];
            int m = static_cast<int>(childs_[b].size());
            int j = 0;
            for (; j < m; j++) {
                if (childs_[b][j] == entrychild) {
                    break;
                }
            }
            int jstep;
            if (j & 1) {
                j -= m;
                jstep = 1;
            } else {
                jstep = -1;
            }
            auto at = [&](int idx) -> int {
                return childs_[b][(idx % m + m) % m];
            };
            auto edge_at = [&](int idx) -> std::pair<int, int> {
                return bedges_[b][(idx % m + m) % m];
            };
            int v = labeledge_[b].first;
            int w = labeledge_[b].second;
            while (j != 0) {
                int p, q;
                if (jstep == 1) {
                    auto e = edge_at(j);
                    p = e.first;
                    q = e.second;
                } else {
                    auto e = edge_at(j - 1);
                    p = e.second;
                    q = e.first;
                }
                label_[w] = 0;
                label_[q] = 0;
                assign_label(w, 2, v);
                allow_[p][q] = allow_[q][p] = 1;
                j += jstep;
                if (jstep == 1) {
                    auto e = edge_at(j);
                    v = e.first;
                    w = e.second;
                } else {
                    auto e = edge_at(j - 1);
                    w = e.first;
                    v = e.second;
                }
                allow_[v][w] = allow_[w][v] = 1;
                j += jstep;
            }
            int bw = at(0);
            label_[w] = label_[bw] = 2;
            labeledge_[w] = labeledge_[bw] = {v, w};
            bestedge_[bw] = {kNone, kNone};
            j += jstep;
            while (at(j) != entrychild) {
                int bv = at(j);
                if (label_[bv] == 1) {
                    j += jstep;
                    continue;
                }
                std::vector<int> lv;
                leaves_of(bv, lv);
                int x = kNone;
                for (int cand : lv) {
                    if (label_[cand] != 0) {
                        x = cand;
                        break;
                    }
                }
                if (x != kNone) {
                    assert(label_[x] == 2);
                    assert(inblossom_[x] == bv);
                    label_[x] = 0;
                    label_[mate_[base_[bv]]] = 0;
                    assign_label(x, 2, labeledge_[x].first);
                }
                j += jstep;
            }
        }
        free_blossom(b);
    }

    void augment_blossom(int b, int v) {
        int t = v;
        while (parent_[t] != b) {
            t = parent_[t];
        }
        if (is_blossom(t)) {
            augment_blossom(t, v);
        }
        int m = static_cast<int>(childs_[b].size());
        int i = 0;
        for (; i < m; i++) {
            if (childs_[b][i] == t) {
                break;
            }
        }
        int j = i, jstep;
        if (i & 1) {
            j -= m;
            jstep = 1;
        } else {
            jstep = -1;
        }
        auto at = [&](int idx) -> int {
            return childs_[b][(idx % m + m) % m];
        };
        auto edge_at = [&](int idx) -> std::pair<int, int> {
            return bedges_[b][(idx % m + m) % m];
        };
        while (j != 0) {
            j += jstep;
            int tt = at(j);
            int w, x;
            if (jstep == 1) {
                auto e = edge_at(j);
                w = e.first;
                x = e.second;
            } else {
                auto e = edge_at(j - 1);
                x = e.first;
                w = e.second;
            }
            if (is_blossom(tt)) {
                augment_blossom(tt, w);
            }
            j += jstep;
            tt = at(j);
            if (is_blossom(tt)) {
                augment_blossom(tt, x);
            }
            mate_[w] = x;
            mate_[x] = w;
        }
        std::rotate(childs_[b].begin(), childs_[b].begin() + i, childs_[b].end());
        std::rotate(bedges_[b].begin(), bedges_[b].begin() + i, bedges_[b].end());
        base_[b] = base_[childs_[b][0]];
        assert(base_[b] == v);
    }

    void augment_matching(int v, int w) {
        for (auto [s, j] : {std::pair{v, w}, std::pair{w, v}}) {
            while (true) {
                int bs = inblossom_[s];
                assert(label_[bs] == 1);
                assert((labeledge_[bs].first == kNone && mate_[base_[bs]] == kNone) ||
                       labeledge_[bs].first == mate_[base_[bs]]);
                if (is_blossom(bs)) {
                    augment_blossom(bs, s);
                }
                mate_[s] = j;
                if (labeledge_[bs].first == kNone) {
                    break;
                }
                int t = labeledge_[bs].first;
                int bt = inblossom_[t];
                assert(label_[bt] == 2);
                s = labeledge_[bt].first;
                j = labeledge_[bt].second;
                assert(base_[bt] == t);
                if (is_blossom(bt)) {
                    augment_blossom(bt, j);
                }
                mate_[j] = s;
            }
        }
    }

    void solve() {
        if (n_ == 0) {
            return;
        }
        while (true) {
            std::fill(label_.begin(), label_.end(), 0);
            std::fill(labeledge_.begin(), labeledge_.end(), std::pair<int, int>{kNone, kNone});
            std::fill(bestedge_.begin(), bestedge_.end(), std::pair<int, int>{kNone, kNone});
            for (int b = n_; b < 2 * n_; b++) {
                if (in_use_[b]) {
                    mybest_[b].clear();
                    has_mybest_[b] = 0;
                }
            }
            for (auto &row : allow_) {
                std::fill(row.begin(), row.end(), 0);
            }
            queue_.clear();
            for (int v = 0; v < n_; v++) {
                if (mate_[v] == kNone && label_[inblossom_[v]] == 0) {
                    assign_label(v, 1, kNone);
                }
            }
            bool augmented = false;
            while (true) {
                while (!queue_.empty() && !augmented) {
                    int v = queue_.back();
                    queue_.pop_back();
                    assert(label_[inblossom_[v]] == 1);
                    for (int u = 0; u < n_; u++) {
                        if (u == v || !has_[v][u]) {
                            continue;
                        }
                        int bv = inblossom_[v], bu = inblossom_[u];
                        if (bv == bu) {
                            continue;
                        }
                        int64_t kslack = 0;
                        if (!allow_[v][u]) {
                            kslack = slack(v, u);
                            if (kslack <= 0) {
                                allow_[v][u] = allow_[u][v] = 1;
                            }
                        }
                        if (allow_[v][u]) {
                            if (label_[bu] == 0) {
                                assign_label(u, 2, v);
                            } else if (label_[bu] == 1) {
                                int bse = scan_blossom(v, u);
                                if (bse != kNone) {
                                    add_blossom(bse, v, u);
                                } else {
                                    augment_matching(v, u);
                                    augmented = true;
                                    break;
                                }
                            } else if (label_[u] == 0) {
                                assert(label_[bu] == 2);
                                label_[u] = 2;
                                labeledge_[u] = {v, u};
                            }
                        } else if (label_[bu] == 1) {
                            if (bestedge_[bv].first == kNone ||
                                kslack < slack(bestedge_[bv].first, bestedge_[bv].second)) {
                                bestedge_[bv] = {v, u};
                            }
                        } else if (label_[u] == 0) {
                            if (bestedge_[u].first == kNone ||
                                kslack < slack(bestedge_[u].first, bestedge_[u].second)) {
                                bestedge_[u] = {v, u};
                            }
                        }
                    }
                }
                if (augmented) {
                    break;
                }
                int deltatype = -1;
                int64_t delta = 0;
                std::pair<int, int> deltaedge{kNone, kNone};
                int deltablossom = kNone;
                if (!maxcard_) {
                    deltatype = 1;
                    int64_t mind = kInf;
                    for (int v = 0; v < n_; v++) {
                        mind = std::min(mind, dual_[v]);
                    }
                    delta = std::max<int64_t>(0, mind);
                }
                for (int v = 0; v < n_; v++) {
                    if (label_[inblossom_[v]] == 0 && bestedge_[v].first != kNone) {
                        int64_t d = slack(bestedge_[v].first, bestedge_[v].second);
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 2;
                            deltaedge = bestedge_[v];
                        }
                    }
                }
                for (int b = 0; b < 2 * n_; b++) {
                    if (b >= n_ && !in_use_[b]) {
                        continue;
                    }
                    if (parent_[b] == kNone && label_[b] == 1 && bestedge_[b].first != kNone) {
                        int64_t ks = slack(bestedge_[b].first, bestedge_[b].second);
                        assert(ks % 2 == 0);
                        int64_t d = ks / 2;
                        if (deltatype == -1 || d < delta) {
                            delta = d;
                            deltatype = 3;
                            deltaedge = bestedge_[b];
                        }
                    }
                }
                for (int b = n_; b < 2 * n_; b++) {
                    if (in_use_[b] && parent_[b] == kNone && label_[b] == 2 &&
                        (deltatype == -1 || bdual_[b] < delta)) {
                        delta = bdual_[b];
                        deltatype = 4;
                        deltablossom = b;
                    }
                }
                if (deltatype == -1) {
                    deltatype = 1;
                    int64_t mind = kInf;
                    for (int v = 0; v < n_; v++) {
                        mind = std::min(mind, dual_[v]);
                    }
                    delta = std::max<int64_t>(0, mind);
                }
                for (int v = 0; v < n_; v++) {
                    int lbl = label_[inblossom_[v]];
                    if (lbl == 1) {
                        dual_[v] -= delta;
                    } else if (lbl == 2) {
                        dual_[v] += delta;
                    }
                }
                for (int b = n_; b < 2 * n_; b++) {
                    if (in_use_[b] && parent_[b] == kNone) {
                        if (label_[b] == 1) {
                            bdual_[b] += delta;
                        } else if (label_[b] == 2) {
                            bdual_[b] -= delta;
                        }
                    }
                }
                if (deltatype == 1) {
                    break;
                } else if (deltatype == 2) {
                    auto [v, w] = deltaedge;
                    assert(label_[inblossom_[v]] == 1);
                    allow_[v][w] = allow_[w][v] = 1;
                    queue_.push_back(v);
                } else if (deltatype == 3) {
                    auto [v, w] = deltaedge;
                    allow_[v][w] = allow_[w][v] = 1;
                    assert(label_[inblossom_[v]] == 1);
                    queue_.push_back(v);
                } else {
                    expand_blossom(deltablossom, false);
                }
            }
            if (!augmented) {
                break;
            }
            for (int b = n_; b < 2 * n_; b++) {
                if (in_use_[b] && parent_[b] == kNone && label_[b] == 1 && bdual_[b] == 0) {
                    expand_blossom(b, true);
                }
            }
        }
    }
};

}  // namespace qsegsim
