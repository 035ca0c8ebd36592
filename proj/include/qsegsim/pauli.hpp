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

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "qsegsim/bitvec.hpp"

namespace qsegsim {

// Pauli operator in binary symplectic form. Phases are not tracked:
// syndrome statistics and logical-class membership depend only on
// commutation relations.
struct PauliOperator {
    BitVec x;
    BitVec z;

    PauliOperator() = default;
    explicit PauliOperator(size_t num_qubits) : x(num_qubits), z(num_qubits) {}

    size_t num_qubits() const {
        return x.size();
    }

    bool is_identity() const {
        return !x.any() && !z.any();
    }

    // Number of qubits acted on nontrivially.
    size_t weight() const {
        size_t n = 0;
        for (size_t q = 0; q < x.size(); q++) {
            if (x.get(q) || z.get(q)) {
                n++;
            }
        }
        return n;
    }

    void set_x(size_t q) {
        x.set(q, true);
    }
    void set_z(size_t q) {
        z.set(q, true);
    }
    void set_y(size_t q) {
        x.set(q, true);
        z.set(q, true);
    }

    bool operator==(const PauliOperator &o) const {
        return x == o.x && z == o.z;
    }

    static PauliOperator single_x(size_t n, size_t q) {
        PauliOperator p(n);
        p.set_x(q);
        return p;
    }
    static PauliOperator single_z(size_t n, size_t q) {
        PauliOperator p(n);
        p.set_z(q);
        return p;
    }
    static PauliOperator single_y(size_t n, size_t q) {
        PauliOperator p(n);
        p.set_y(q);
        return p;
    }

    std::string str() const {
        std::string s;
        for (size_t q = 0; q < num_qubits(); q++) {
            bool bx = x.get(q), bz = z.get(q);
            s += bx ? (bz ? 'Y' : 'X') : (bz ? 'Z' : '_');
        }
        return s;
    }
};

// Product up to global phase: masks XOR.
inline PauliOperator multiply(const PauliOperator &p, const PauliOperator &q) {
    if (p.num_qubits() != q.num_qubits()) {
        throw std::invalid_argument("multiply: qubit count mismatch");
    }
    PauliOperator r = p;
    r.x ^= q.x;
    r.z ^= q.z;
    return r;
}

// True iff the symplectic product <p.x,q.z> + <p.z,q.x> vanishes mod 2.
inline bool commutes(const PauliOperator &p, const PauliOperator &q) {
    if (p.num_qubits() != q.num_qubits()) {
        throw std::invalid_argument("commutes: qubit count mismatch");
    }
    return !(BitVec::and_parity(p.x, q.z) ^ BitVec::and_parity(p.z, q.x));
}

enum class GateKind : uint8_t { CNOT, H, SWAP };

struct CliffordGate {
    GateKind kind;
    uint32_t a;  // control for CNOT, qubit for H, first qubit for SWAP
    uint32_t b;  // target for CNOT, unused for H, second qubit for SWAP

    static CliffordGate cnot(uint32_t control, uint32_t target) {
        return {GateKind::CNOT, control, target};
    }
    static CliffordGate h(uint32_t q) {
        return {GateKind::H, q, 0};
    }
    static CliffordGate swap(uint32_t p, uint32_t q) {
        return {GateKind::SWAP, p, q};
    }
};

// Conjugation of a Pauli (error frame) by a Clifford gate:
// CNOT maps X_c -> X_c X_t and Z_t -> Z_c Z_t; H swaps x/z bits.
inline void conjugate_inplace(PauliOperator &p, const CliffordGate &g) {
    size_t n = p.num_qubits();
    if (g.a >= n || (g.kind != GateKind::H && g.b >= n)) {
        throw std::out_of_range("conjugate: qubit index out of range");
    }
    switch (g.kind) {
        case GateKind::CNOT: {
            if (p.x.get(g.a)) {
                p.x.flip(g.b);
            }
            if (p.z.get(g.b)) {
                p.z.flip(g.a);
            }
            break;
        }
        case GateKind::H: {
            bool bx = p.x.get(g.a), bz = p.z.get(g.a);
            p.x.set(g.a, bz);
            p.z.set(g.a, bx);
            break;
        }
        case GateKind::SWAP: {
            bool xa = p.x.get(g.a), xb = p.x.get(g.b);
            p.x.set(g.a, xb);
            p.x.set(g.b, xa);
            bool za = p.z.get(g.a), zb = p.z.get(g.b);
            p.z.set(g.a, zb);
            p.z.set(g.b, za);
            break;
        }
    }
}

inline PauliOperator conjugate(const PauliOperator &p, const CliffordGate &g) {
    PauliOperator r = p;
    conjugate_inplace(r, g);
    return r;
}

// The tracked error state of one simulation trial. Confined to a single
// trial; never shared across threads.
using PauliFrame = PauliOperator;

// A stabilizer group with named logical representatives.
struct StabilizerGroup {
    std::vector<PauliOperator> generators;
    std::map<std::string, PauliOperator> logical_reps;

    size_t num_qubits() const {
        if (!generators.empty()) {
            return generators.front().num_qubits();
        }
        if (!logical_reps.empty()) {
            return logical_reps.begin()->second.num_qubits();
        }
        return 0;
    }
};

// Reduced row-echelon form of a set of Paulis over GF(2), using the
// symplectic column order (x_0, z_0, x_1, z_1, ...). Dependent rows drop out.
inline std::vector<PauliOperator> symplectic_rref(std::vector<PauliOperator> rows) {
    std::vector<PauliOperator> out;
    if (rows.empty()) {
        return out;
    }
    size_t n = rows.front().num_qubits();
    size_t pivot_row = 0;
    for (size_t col = 0; col < 2 * n && pivot_row < rows.size(); col++) {
        size_t q = col / 2;
        bool use_x = (col % 2) == 0;
        size_t found = rows.size();
        for (size_t r = pivot_row; r < rows.size(); r++) {
            bool bit = use_x ? rows[r].x.get(q) : rows[r].z.get(q);
            if (bit) {
                found = r;
                break;
            }
        }
        if (found == rows.size()) {
            continue;
        }
        std::swap(rows[pivot_row], rows[found]);
        for (size_t r = 0; r < rows.size(); r++) {
            if (r == pivot_row) {
                continue;
            }
            bool bit = use_x ? rows[r].x.get(q) : rows[r].z.get(q);
            if (bit) {
                rows[r] = multiply(rows[r], rows[pivot_row]);
            }
        }
        pivot_row++;
    }
    for (size_t r = 0; r < pivot_row; r++) {
        out.push_back(rows[r]);
    }
    return out;
}

// Canonicalizes generators (RREF, dependent generators removed). Logical
// representatives pass through unchanged.
inline StabilizerGroup reduce(const StabilizerGroup &group) {
    StabilizerGroup out;
    out.generators = symplectic_rref(group.generators);
    out.logical_reps = group.logical_reps;
    return out;
}

// Membership test by elimination against an RREF basis.
inline bool in_span(const std::vector<PauliOperator> &rref_basis, PauliOperator candidate) {
    size_t n = candidate.num_qubits();
    for (const auto &row : rref_basis) {
        // Pivot of `row` is its lowest set symplectic column.
        size_t px = row.x.lowest_set();
        size_t pz = row.z.lowest_set();
        size_t col = std::min(2 * px, 2 * pz + 1);
        if (col >= 2 * n) {
            continue;
        }
        size_t q = col / 2;
        bool use_x = (col % 2) == 0;
        bool bit = use_x ? candidate.x.get(q) : candidate.z.get(q);
        if (bit) {
            candidate = multiply(candidate, row);
        }
    }
    return candidate.is_identity();
}

inline bool group_contains(const StabilizerGroup &group, const PauliOperator &p) {
    return in_span(symplectic_rref(group.generators), p);
}

}  // namespace qsegsim
