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

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "qsegsim/pauli.hpp"

namespace qsegsim {

constexpr uint32_t kNoQubit = UINT32_MAX;

// One segment of the chain, holding one column of the surface code.
// Long columns use d data qubits (even rows), short columns use d-1 data
// qubits (odd rows) plus one spare qubit. The spare sits at row 2d-1 and is
// idle during memory experiments; deformation protocols activate it when a
// rough boundary is extended by half an edge.
struct ColumnSpec {
    int col = 0;        // global column index
    int patch = 0;      // logical patch index
    int local = 0;      // column index within the patch (0..2d-2)
    bool is_long = false;
    std::vector<uint32_t> data_qubits;  // ordered by row
    std::vector<int> rows;              // row y of each data qubit
    uint32_t spare_qubit = kNoQubit;    // short columns only (row 2d-1)
};

// Geometry of a chain of logical patches. Patches are directly adjacent:
// patch k occupies columns [k(2d-1), (k+1)(2d-1)-1]. Shuttle i sits between
// columns i-1 and i; shuttles 0 and C are the chain ends.
class ChainLayout {
   public:
    int segment_size = 0;   // s = data capacity + 2 shuttle qubits
    int code_distance = 0;  // d = s - 2
    int n_logical = 0;
    std::vector<ColumnSpec> columns;
    std::vector<uint32_t> shuttle_qubits;  // size columns.size() + 1
    uint32_t num_qubits = 0;               // data + spares + shuttles

    int logical_extent() const {
        return 2 * code_distance - 1;
    }
    int num_columns() const {
        return static_cast<int>(columns.size());
    }

    bool has_data(int col, int y) const {
        return qubit_at_.count(key(col, y)) > 0;
    }
    uint32_t data_qubit(int col, int y) const {
        auto it = qubit_at_.find(key(col, y));
        if (it == qubit_at_.end()) {
            throw std::out_of_range("no data qubit at (col,y)");
        }
        return it->second;
    }
    // Shuttle between columns c-1 and c.
    uint32_t shuttle(int c) const {
        return shuttle_qubits.at(static_cast<size_t>(c));
    }

    std::pair<int, int> qubit_pos(uint32_t q) const {
        return pos_of_.at(q);
    }
    bool is_shuttle(uint32_t q) const {
        return q >= first_shuttle_;
    }
    // Segment (column) that owns a data/spare qubit.
    int segment_of(uint32_t q) const {
        return pos_of_.at(q).first;
    }

    // Data qubits of one patch in memory configuration (spares excluded).
    std::vector<uint32_t> patch_data_qubits(int patch) const {
        std::vector<uint32_t> out;
        for (const auto &c : columns) {
            if (c.patch == patch) {
                out.insert(out.end(), c.data_qubits.begin(), c.data_qubits.end());
            }
        }
        return out;
    }

    // Logical X: top-row chain across the long columns of a patch
    // (connects the left and right smooth boundaries).
    PauliOperator logical_x(int patch) const {
        PauliOperator p(num_qubits);
        for (const auto &c : columns) {
            if (c.patch == patch && c.is_long) {
                p.set_x(c.data_qubits.front());
            }
        }
        return p;
    }

    // Logical Z: leftmost column of a patch (connects top and bottom rough
    // boundaries).
    PauliOperator logical_z(int patch) const {
        PauliOperator p(num_qubits);
        int first_col = patch * logical_extent();
        for (uint32_t q : columns[first_col].data_qubits) {
            p.set_z(q);
        }
        return p;
    }

    friend ChainLayout build_layout(int s, int n_logical, bool allow_small);

   private:
    static int64_t key(int col, int y) {
        return (static_cast<int64_t>(col) << 20) | static_cast<int64_t>(y + 4);
    }
    std::map<int64_t, uint32_t> qubit_at_;
    std::map<uint32_t, std::pair<int, int>> pos_of_;  // q -> (col, y); shuttles: (boundary index, -1)
    uint32_t first_shuttle_ = 0;
};

// d = s-2 exactly. s < 5 is rejected: d <= 2 gives no error correction in
// memory experiments. Symbolic protocol verification may opt into d = 2.
inline ChainLayout build_layout(int s, int n_logical, bool allow_small = false) {
    if (s < (allow_small ? 4 : 5)) {
        throw std::invalid_argument("segment size must be >= 5 (d = s-2 >= 3)");
    }
    if (n_logical < 1) {
        throw std::invalid_argument("need at least one logical qubit");
    }
    ChainLayout lay;
    lay.segment_size = s;
    lay.code_distance = s - 2;
    lay.n_logical = n_logical;
    int d = lay.code_distance;
    int extent = 2 * d - 1;
    uint32_t next = 0;
    for (int patch = 0; patch < n_logical; patch++) {
        for (int local = 0; local < extent; local++) {
            ColumnSpec c;
            c.col = patch * extent + local;
            c.patch = patch;
            c.local = local;
            c.is_long = (local % 2) == 0;
            if (c.is_long) {
                for (int y = 0; y <= 2 * d - 2; y += 2) {
                    c.data_qubits.push_back(next);
                    c.rows.push_back(y);
                    lay.qubit_at_[ChainLayout::key(c.col, y)] = next;
                    lay.pos_of_[next] = {c.col, y};
                    next++;
                }
            } else {
                for (int y = 1; y <= 2 * d - 3; y += 2) {
                    c.data_qubits.push_back(next);
                    c.rows.push_back(y);
                    lay.qubit_at_[ChainLayout::key(c.col, y)] = next;
                    lay.pos_of_[next] = {c.col, y};
                    next++;
                }
                c.spare_qubit = next;
                lay.qubit_at_[ChainLayout::key(c.col, 2 * d - 1)] = next;
                lay.pos_of_[next] = {c.col, 2 * d - 1};
                next++;
            }
            lay.columns.push_back(std::move(c));
        }
    }
    lay.first_shuttle_ = next;
    for (int b = 0; b <= lay.num_columns(); b++) {
        lay.shuttle_qubits.push_back(next);
        lay.pos_of_[next] = {b, -1};
        next++;
    }
    lay.num_qubits = next;
    return lay;
}

}  // namespace qsegsim
