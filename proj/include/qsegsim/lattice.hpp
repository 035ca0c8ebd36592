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
#include <cassert>
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsegsim/layout.hpp"
#include "qsegsim/pauli.hpp"

namespace qsegsim {

// One active column of a lattice configuration: a global column index plus
// the rows currently on-lattice. Skipped columns are simply absent from the
// sequence; stabilisers then stretch across the gap and are measured with a
// GHZ chain of shuttle qubits.
struct ActiveColumn {
    int col = 0;
    std::vector<int> ys;
    // A smooth top suppresses the plaquette candidates above the column's
    // topmost qubit (long-column shrink or degenerate one-column strips).
    bool smooth_top = false;
};

struct Stabiliser {
    uint32_t id = 0;
    char type = 'X';  // 'X' or 'Z'
    int row = 0;      // center y
    int center_col = 0;
    std::vector<uint32_t> data;              // qubit ids
    std::vector<std::pair<int, int>> sites;  // (col, y) per data qubit
    // Circuit realization: consecutive shuttle indices (shuttle i sits
    // between columns i-1 and i). front() is initialised in |+>, the rest
    // in |0>; chain CNOTs build a GHZ state before the data interactions.
    std::vector<int> shuttle_chain;

    PauliOperator as_pauli(uint32_t num_qubits) const {
        PauliOperator p(num_qubits);
        for (uint32_t q : data) {
            if (type == 'X') {
                p.set_x(q);
            } else {
                p.set_z(q);
            }
        }
        return p;
    }
};

struct LatticeConfig {
    std::vector<ActiveColumn> cols;
    bool type_swapped = false;
    std::vector<Stabiliser> stabilisers;
    std::vector<uint32_t> active_data;  // sorted qubit ids
    std::string name;

    bool is_active(uint32_t q) const {
        return std::binary_search(active_data.begin(), active_data.end(), q);
    }
};

namespace detail {

inline bool odd(int v) {
    return (v & 1) != 0;
}

}  // namespace detail

// Builds the stabiliser set of a lattice configuration from its active
// columns. Candidate vertices/plaquettes with fewer than two active qubits
// are dropped; anticommuting overlaps at ragged corners are resolved by
// dropping the lighter stabiliser.
inline LatticeConfig build_lattice_config(const ChainLayout &lay, std::vector<ActiveColumn> cols,
                                          bool type_swapped = false, std::string name = "") {
    LatticeConfig cfg;
    cfg.cols = std::move(cols);
    cfg.type_swapped = type_swapped;
    cfg.name = std::move(name);
    if (cfg.cols.empty()) {
        return cfg;
    }
    for (auto &c : cfg.cols) {
        std::sort(c.ys.begin(), c.ys.end());
        for (int y : c.ys) {
            cfg.active_data.push_back(lay.data_qubit(c.col, y));
        }
    }
    std::sort(cfg.active_data.begin(), cfg.active_data.end());

    // Sequence parity: qubits sit at (position + y) == par (mod 2).
    int par = (0 + cfg.cols[0].ys.at(0)) & 1;
    int P = static_cast<int>(cfg.cols.size());
    auto active_at = [&](int p, int y) -> bool {
        if (p < 0 || p >= P) {
            return false;
        }
        return std::binary_search(cfg.cols[p].ys.begin(), cfg.cols[p].ys.end(), y);
    };
    int y_lo = cfg.cols[0].ys.front(), y_hi = cfg.cols[0].ys.back();
    for (const auto &c : cfg.cols) {
        if ((static_cast<int>(&c - cfg.cols.data()) + c.ys.front()) % 2 != par % 2) {
            throw std::invalid_argument("lattice config breaks checkerboard parity: col " +
                                        std::to_string(c.col));
        }
        y_lo = std::min(y_lo, c.ys.front());
        y_hi = std::max(y_hi, c.ys.back());
    }

    struct Cand {
        int p, y;
        char type;
        std::vector<std::pair<int, int>> site_pos;  // (position, y)
        size_t weight() const {
            return site_pos.size();
        }
    };
    std::vector<Cand> cands;
    for (int p = 0; p < P; p++) {
        for (int y = y_lo - 1; y <= y_hi + 1; y++) {
            if (((p + y) & 1) == (par & 1)) {
                continue;  // qubit site, not a center
            }
            Cand c;
            c.p = p;
            c.y = y;
            bool x_type = detail::odd(y);
            if (type_swapped) {
                x_type = !x_type;
            }
            c.type = x_type ? 'X' : 'Z';
            for (auto [dp, dy] : {std::pair{0, -1}, {0, 1}, {-1, 0}, {1, 0}}) {
                if (active_at(p + dp, y + dy)) {
                    c.site_pos.push_back({p + dp, y + dy});
                }
            }
            if (c.weight() < 2) {
                continue;
            }
            if (!type_swapped && c.type == 'Z' && cfg.cols[p].smooth_top &&
                y < cfg.cols[p].ys.front()) {
                continue;  // no plaquette caps a smooth top
            }
            cands.push_back(std::move(c));
        }
    }

    // Resolve anticommuting corner overlaps (odd shared support between an X
    // and a Z candidate): keep the heavier one.
    std::vector<bool> dead(cands.size(), false);
    bool changed = true;
    while (changed) {
        changed = false;
        for (size_t i = 0; i < cands.size() && !changed; i++) {
            if (dead[i]) {
                continue;
            }
            for (size_t j = i + 1; j < cands.size(); j++) {
                if (dead[j] || cands[i].type == cands[j].type) {
                    continue;
                }
                size_t shared = 0;
                for (auto &s : cands[i].site_pos) {
                    for (auto &t : cands[j].site_pos) {
                        if (s == t) {
                            shared++;
                        }
                    }
                }
                if (shared % 2 == 1) {
                    size_t drop = cands[i].weight() <= cands[j].weight() ? i : j;
                    dead[drop] = true;
                    changed = true;
                    break;
                }
            }
        }
    }

    // Emit: X stabilisers by (row, position), then Z.
    std::vector<size_t> order;
    for (size_t i = 0; i < cands.size(); i++) {
        if (!dead[i]) {
            order.push_back(i);
        }
    }
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        auto ka = std::tuple(cands[a].type != 'X', cands[a].y, cands[a].p);
        auto kb = std::tuple(cands[b].type != 'X', cands[b].y, cands[b].p);
        return ka < kb;
    });
    for (size_t idx : order) {
        const Cand &c = cands[idx];
        Stabiliser s;
        s.id = static_cast<uint32_t>(cfg.stabilisers.size());
        s.type = c.type;
        s.row = c.y;
        s.center_col = cfg.cols[c.p].col;
        int col_lo = s.center_col, col_hi = s.center_col;
        for (auto [sp, sy] : c.site_pos) {
            int col = cfg.cols[sp].col;
            s.sites.push_back({col, sy});
            s.data.push_back(lay.data_qubit(col, sy));
            col_lo = std::min(col_lo, col);
            col_hi = std::max(col_hi, col);
        }
        // GHZ chain spans every shuttle from the left-most involved column
        // boundary to the right-most. Stabilisers confined to two adjacent
        // columns need only the single shuttle between them; this keeps
        // neighbouring patches from contending for their shared shuttle.
        if (col_hi - col_lo <= 1) {
            s.shuttle_chain.push_back(col_lo == col_hi ? col_lo + 1 : col_hi);
        } else {
            int start = (col_lo < s.center_col) ? col_lo + 1 : s.center_col;
            int end = (col_hi > s.center_col) ? col_hi : s.center_col + 1;
            for (int b = start; b <= end; b++) {
                s.shuttle_chain.push_back(b);
            }
        }
        cfg.stabilisers.push_back(std::move(s));
    }
    return cfg;
}

// Union of disconnected lattice configurations (e.g. separate patches).
// Stabilisers are re-identified X-first so parallel row scheduling across
// patches works unchanged.
inline LatticeConfig merge_configs(const ChainLayout &lay, std::vector<LatticeConfig> parts,
                                   std::string name = "") {
    (void)lay;
    LatticeConfig out;
    out.name = std::move(name);
    for (auto &p : parts) {
        for (auto &c : p.cols) {
            out.cols.push_back(std::move(c));
        }
        for (auto &s : p.stabilisers) {
            out.stabilisers.push_back(std::move(s));
        }
        out.active_data.insert(out.active_data.end(), p.active_data.begin(),
                               p.active_data.end());
    }
    std::sort(out.active_data.begin(), out.active_data.end());
    std::sort(out.stabilisers.begin(), out.stabilisers.end(),
              [](const Stabiliser &a, const Stabiliser &b) {
                  return std::tuple(a.type != 'X', a.row, a.center_col) <
                         std::tuple(b.type != 'X', b.row, b.center_col);
              });
    for (uint32_t i = 0; i < out.stabilisers.size(); i++) {
        out.stabilisers[i].id = i;
    }
    return out;
}

// Memory configuration: every patch in its standard shape (long columns at
// even local index, spares idle). Patches are independent lattices; their
// rows are measured in parallel.
inline LatticeConfig memory_config(const ChainLayout &lay) {
    std::vector<LatticeConfig> parts;
    int extent = lay.logical_extent();
    for (int p = 0; p < lay.n_logical; p++) {
        std::vector<ActiveColumn> cols;
        for (int j = 0; j < extent; j++) {
            const auto &c = lay.columns[p * extent + j];
            ActiveColumn a;
            a.col = c.col;
            a.ys = c.rows;
            cols.push_back(std::move(a));
        }
        parts.push_back(build_lattice_config(lay, std::move(cols), false));
    }
    return merge_configs(lay, std::move(parts), "memory");
}

// Validation helpers ------------------------------------------------------

inline bool stabilisers_commute(const LatticeConfig &cfg, const ChainLayout &lay) {
    std::vector<PauliOperator> ops;
    for (const auto &s : cfg.stabilisers) {
        ops.push_back(s.as_pauli(lay.num_qubits));
    }
    for (size_t i = 0; i < ops.size(); i++) {
        for (size_t j = i + 1; j < ops.size(); j++) {
            if (!commutes(ops[i], ops[j])) {
                return false;
            }
        }
    }
    return true;
}

// Number of encoded qubits: |active data| - rank(stabilisers).
inline int encoded_qubits(const LatticeConfig &cfg, const ChainLayout &lay) {
    std::vector<PauliOperator> ops;
    for (const auto &s : cfg.stabilisers) {
        ops.push_back(s.as_pauli(lay.num_qubits));
    }
    auto basis = symplectic_rref(ops);
    return static_cast<int>(cfg.active_data.size()) - static_cast<int>(basis.size());
}

}  // namespace qsegsim
