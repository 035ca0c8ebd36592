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

#include "qsegsim/lattice.hpp"
#include "qsegsim/pauli.hpp"
#include "qsegsim/schedule.hpp"

namespace qsegsim {

// Raised when a deformation step would destroy a tracked logical operator:
// a measured operator anticommutes with it and no stabiliser can repair it.
struct ProtocolBugError : std::runtime_error {
    explicit ProtocolBugError(const std::string &what) : std::runtime_error(what) {}
};

// One lattice-deformation step: qubits entering the lattice (initialised),
// an optional in-step Clifford circuit (teleportation), qubits leaving
// (measured), and the stabiliser set measured for the following rounds.
struct DeformationStep {
    std::string name;
    std::vector<std::pair<uint32_t, Basis>> initialized;  // X: |+>, Z: |0>
    std::vector<CliffordGate> unitaries;
    std::vector<std::pair<uint32_t, Basis>> measured;  // X: +/- basis, Z: 0/1
    LatticeConfig lattice;
    int rounds = 1;  // stabiliser-measurement rounds after the step
    int panels = 0;  // patch-areas measured during those rounds
};

// Phase-free stabilizer-group tracker. Measurement projections repair
// anticommuting generators and logical representatives by multiplication;
// outcomes are symbolic, so verified maps hold for every outcome string.
class DeformationEngine {
   public:
    explicit DeformationEngine(size_t num_qubits) : n_(num_qubits) {}

    void add_generator(const PauliOperator &g) {
        group_.generators.push_back(g);
    }
    void set_logical(const std::string &name, const PauliOperator &op) {
        group_.logical_reps[name] = op;
    }
    const StabilizerGroup &group() const {
        return group_;
    }
    const PauliOperator &logical(const std::string &name) const {
        return group_.logical_reps.at(name);
    }

    // Project onto measured operator m (init and measure are the same
    // operation in the phase-free algebra).
    void project(const PauliOperator &m) {
        int pivot = -1;
        for (size_t i = 0; i < group_.generators.size(); i++) {
            if (!commutes(group_.generators[i], m)) {
                pivot = static_cast<int>(i);
                break;
            }
        }
        if (pivot < 0) {
            for (auto &[name, rep] : group_.logical_reps) {
                if (!commutes(rep, m)) {
                    throw ProtocolBugError("measurement destroys logical " + name);
                }
            }
            if (!group_contains(group_, m)) {
                group_.generators.push_back(m);
            }
            return;
        }
        PauliOperator g1 = group_.generators[pivot];
        for (size_t i = 0; i < group_.generators.size(); i++) {
            if (static_cast<int>(i) != pivot && !commutes(group_.generators[i], m)) {
                group_.generators[i] = multiply(group_.generators[i], g1);
            }
        }
        for (auto &[name, rep] : group_.logical_reps) {
            if (!commutes(rep, m)) {
                rep = multiply(rep, g1);
            }
        }
        group_.generators[pivot] = m;
    }

    void apply_gate(const CliffordGate &gate) {
        for (auto &g : group_.generators) {
            conjugate_inplace(g, gate);
        }
        for (auto &[name, rep] : group_.logical_reps) {
            conjugate_inplace(rep, gate);
        }
    }

    void apply_step(const DeformationStep &step) {
        for (auto [q, basis] : step.initialized) {
            project(single(q, basis));
        }
        for (const auto &gate : step.unitaries) {
            apply_gate(gate);
        }
        for (auto [q, basis] : step.measured) {
            project(single(q, basis));
        }
        for (const auto &st : step.lattice.stabilisers) {
            project(st.as_pauli(n_));
        }
        group_.generators = symplectic_rref(group_.generators);
    }

    bool contains(const PauliOperator &p) const {
        return group_contains(group_, p);
    }

    // True iff rep is equivalent to target modulo the stabiliser group.
    bool equivalent(const PauliOperator &rep, const PauliOperator &target) const {
        return contains(multiply(rep, target));
    }

   private:
    PauliOperator single(uint32_t q, Basis basis) const {
        return basis == Basis::X ? PauliOperator::single_x(n_, q)
                                 : PauliOperator::single_z(n_, q);
    }

    size_t n_;
    StabilizerGroup group_;
};

// Minimum weight of a Pauli that commutes with every stabiliser of the
// configuration but acts nontrivially on its logical algebra. Logical
// strings terminate on boundary qubits (qubits contained in only one
// stabiliser of the constraining type), so the search is a shortest-path
// problem over stabiliser adjacency, filtered by group non-membership.
struct DistanceAudit {
    int z_distance = -1;  // min weight of a nontrivial z-type operator
    int x_distance = -1;
    int distance() const {
        if (z_distance < 0) {
            return x_distance;
        }
        if (x_distance < 0) {
            return z_distance;
        }
        return std::min(z_distance, x_distance);
    }
};

namespace detail {

// Min-weight nontrivial string of the given error type ('Z' errors are
// constrained by X stabilisers and vice versa). Nontriviality is tested
// against `group_rref`, which may include init-frozen degrees of freedom
// on top of the configuration's stabilisers.
inline int min_string_weight(const ChainLayout &lay, const LatticeConfig &cfg, char err_type,
                             const std::vector<PauliOperator> &group_rref) {
    char constraint = (err_type == 'Z') ? 'X' : 'Z';
    std::vector<const Stabiliser *> stabs;
    for (const auto &s : cfg.stabilisers) {
        if (s.type == constraint) {
            stabs.push_back(&s);
        }
    }
    std::map<uint32_t, std::vector<int>> stabs_of;  // qubit -> constraining stabs
    for (size_t i = 0; i < stabs.size(); i++) {
        for (uint32_t q : stabs[i]->data) {
            stabs_of[q].push_back(static_cast<int>(i));
        }
    }
    struct Edge {
        int other;  // stab index or -1 for boundary
        uint32_t q;
    };
    std::vector<std::vector<Edge>> adj(stabs.size());
    std::vector<std::pair<int, uint32_t>> boundary_edges;  // (stab, qubit)
    std::vector<uint32_t> bare;
    for (uint32_t q : cfg.active_data) {
        auto it = stabs_of.find(q);
        if (it == stabs_of.end()) {
            bare.push_back(q);  // candidate weight-1 operator
            continue;
        }
        const auto &ss = it->second;
        if (ss.size() == 1) {
            boundary_edges.push_back({ss[0], q});
            adj[ss[0]].push_back({-1, q});
        } else if (ss.size() == 2) {
            adj[ss[0]].push_back({ss[1], q});
            adj[ss[1]].push_back({ss[0], q});
        }
        // Qubits in >2 stabilisers of one type cannot occur on these
        // lattices; they would not admit string operators through them.
    }
    auto make_op = [&](const std::vector<uint32_t> &qubits) {
        PauliOperator p(lay.num_qubits);
        for (uint32_t q : qubits) {
            if (err_type == 'Z') {
                p.z.set(q, true);
            } else {
                p.x.set(q, true);
            }
        }
        return p;
    };
    int best = -1;
    for (uint32_t q : bare) {
        auto op = make_op({q});
        bool clean = true;
        for (const auto &s : cfg.stabilisers) {
            if (!commutes(op, s.as_pauli(lay.num_qubits))) {
                clean = false;
                break;
            }
        }
        if (clean && !in_span(group_rref, op)) {
            return 1;
        }
    }
    // BFS from each boundary edge; paths end on any other boundary edge.
    for (size_t be = 0; be < boundary_edges.size(); be++) {
        auto [s0, q0] = boundary_edges[be];
        std::vector<int> dist(stabs.size(), -1);
        std::vector<std::pair<int, uint32_t>> pred(stabs.size(), {-1, 0});
        std::vector<int> queue{s0};
        dist[s0] = 1;  // the entry qubit
        size_t head = 0;
        while (head < queue.size()) {
            int u = queue[head++];
            for (const auto &e : adj[u]) {
                if (e.other >= 0 && dist[e.other] < 0) {
                    dist[e.other] = dist[u] + 1;
                    pred[e.other] = {u, e.q};
                    queue.push_back(e.other);
                }
            }
        }
        for (size_t bf = 0; bf < boundary_edges.size(); bf++) {
            auto [s1, q1] = boundary_edges[bf];
            if (dist[s1] < 0) {
                continue;
            }
            if (be == bf) {
                continue;
            }
            // Path operator: entry qubit + interior qubits + exit qubit.
            std::vector<uint32_t> qubits{q0};
            int cur = s1;
            while (cur != s0) {
                qubits.push_back(pred[cur].second);
                cur = pred[cur].first;
            }
            if (q1 != q0) {
                qubits.push_back(q1);
            }
            std::sort(qubits.begin(), qubits.end());
            std::vector<uint32_t> dedup;
            for (size_t i = 0; i < qubits.size(); i++) {
                if (i + 1 < qubits.size() && qubits[i] == qubits[i + 1]) {
                    i++;  // cancels
                    continue;
                }
                dedup.push_back(qubits[i]);
            }
            int w = static_cast<int>(dedup.size());
            if (w == 0 || (best >= 0 && w >= best)) {
                continue;
            }
            auto op = make_op(dedup);
            bool clean = true;
            for (const auto &s : cfg.stabilisers) {
                if (!commutes(op, s.as_pauli(lay.num_qubits))) {
                    clean = false;
                    break;
                }
            }
            if (!clean) {
                continue;
            }
            if (!in_span(group_rref, op)) {
                best = w;
            }
        }
    }
    return best;
}

}  // namespace detail

inline DistanceAudit audit_distance(const ChainLayout &lay, const LatticeConfig &cfg,
                                    const StabilizerGroup *state_group = nullptr) {
    std::vector<PauliOperator> gens;
    for (const auto &s : cfg.stabilisers) {
        gens.push_back(s.as_pauli(lay.num_qubits));
    }
    if (state_group) {
        for (const auto &g : state_group->generators) {
            gens.push_back(g);
        }
    }
    auto rref = symplectic_rref(gens);
    DistanceAudit out;
    out.z_distance = detail::min_string_weight(lay, cfg, 'Z', rref);
    out.x_distance = detail::min_string_weight(lay, cfg, 'X', rref);
    return out;
}

}  // namespace qsegsim
