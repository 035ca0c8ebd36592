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

#include "qsegsim/protocol.hpp"

#include <gtest/gtest.h>

using namespace qsegsim;

namespace {

TEST(Protocol, CnotVerifiesForSmallDistances) {
    for (int d : {2, 3, 4, 5}) {
        auto lay = build_layout(d + 2, 5, true);
        auto rep = verify_cnot(lay, d);
        EXPECT_TRUE(rep.verified) << "d=" << d << " failure: " << rep.failure;
        for (const auto &[name, ok] : rep.map_ok) {
            EXPECT_TRUE(ok) << "d=" << d << " logical " << name;
        }
        EXPECT_GE(rep.min_distance, d) << "d=" << d;
        EXPECT_EQ(rep.total_blocks, 14) << "d=" << d;
    }
}

TEST(Protocol, CnotStepLatticesAreValidCodes) {
    for (int d : {2, 3}) {
        auto lay = build_layout(d + 2, 5, true);
        auto proto = make_cnot_protocol(lay, d);
        ASSERT_EQ(proto.steps.size(), 4u);
        for (const auto &step : proto.steps) {
            EXPECT_TRUE(stabilisers_commute(step.lattice, lay)) << step.name;
            EXPECT_EQ(encoded_qubits(step.lattice, lay), 2) << step.name;
        }
    }
}

TEST(Protocol, CnotMapPreservesCommutation) {
    auto lay = build_layout(5, 5);
    auto proto = make_cnot_protocol(lay, 3);
    // The claimed map is a CNOT: conjugation preserves the logical algebra.
    EXPECT_FALSE(commutes(proto.claimed["Xc"], proto.claimed["Zc"]));
    EXPECT_FALSE(commutes(proto.claimed["Xt"], proto.claimed["Zt"]));
    EXPECT_TRUE(commutes(proto.claimed["Xc"], proto.claimed["Zt"]));
    EXPECT_TRUE(commutes(proto.claimed["Xt"], proto.claimed["Zc"]));
}

TEST(Protocol, StateTransferVerifies) {
    for (int d : {2, 3, 4, 5}) {
        auto lay = build_layout(d + 2, 2, true);
        auto rep = verify_state_transfer(lay, d);
        EXPECT_TRUE(rep.verified) << "d=" << d << " failure: " << rep.failure;
        EXPECT_GE(rep.min_distance, d);
    }
}

TEST(Protocol, DoubleStateTransferIsIdentity) {
    for (int d : {2, 3}) {
        auto lay = build_layout(d + 2, 2, true);
        auto there = make_state_transfer(lay, 1, 0, d);
        auto back = make_state_transfer(lay, 0, 1, d);
        DeformationEngine eng(lay.num_qubits);
        for (const auto &g : there.initial_group.generators) {
            eng.add_generator(g);
        }
        eng.set_logical("X", lay.logical_x(1));
        eng.set_logical("Z", lay.logical_z(1));
        for (const auto &p : {there, back}) {
            for (const auto &step : p.steps) {
                eng.apply_step(step);
            }
        }
        EXPECT_TRUE(eng.equivalent(eng.logical("X"), lay.logical_x(1))) << "d=" << d;
        EXPECT_TRUE(eng.equivalent(eng.logical("Z"), lay.logical_z(1))) << "d=" << d;
    }
}

TEST(Protocol, HadamardVerifies) {
    for (int d : {2, 3, 4, 5}) {
        auto lay = build_layout(d + 2, 2, true);
        auto rep = verify_hadamard(lay, d);
        EXPECT_TRUE(rep.verified) << "d=" << d << " failure: " << rep.failure;
        EXPECT_GE(rep.min_distance, d);
    }
}

TEST(Protocol, MutationsAreRejected) {
    auto lay5 = build_layout(5, 5);
    for (Mutation m : {Mutation::OmitBottomChange, Mutation::WrongInitBasis,
                       Mutation::SkipAncillaInit, Mutation::PinholeBottom,
                       Mutation::SkipStabiliser}) {
        auto rep = verify_cnot(lay5, 3, m);
        EXPECT_FALSE(rep.verified) << "mutation " << static_cast<int>(m) << " not rejected";
    }
    auto lay2 = build_layout(5, 2);
    auto rep = verify_hadamard(lay2, 3, Mutation::OmitBottomChange);
    EXPECT_FALSE(rep.verified);
}

TEST(Protocol, SkippedStabiliserDropsDistance) {
    auto lay = build_layout(5, 5);
    auto rep = verify_cnot(lay, 3, Mutation::SkipStabiliser);
    EXPECT_FALSE(rep.verified);
    // The unmeasured plaquette admits a logical operator below distance.
    EXPECT_LT(rep.min_distance, 3);
}

TEST(Protocol, SchedulesBuildForEveryStep) {
    for (int d : {2, 3}) {
        auto lay = build_layout(d + 2, 5, true);
        auto proto = make_cnot_protocol(lay, d);
        auto steps = schedule_protocol(lay, proto);
        for (const auto &ps : steps) {
            if (ps.step.rounds == 0) {
                continue;
            }
            EXPECT_GT(ps.schedule.step_count(), 0u);
            // Every stabiliser is measured exactly once per round.
            std::set<uint32_t> measured;
            for (const auto &st : ps.schedule.steps) {
                for (const auto &op : st.ops) {
                    if (op.kind == OpKind::Measure && op.counted) {
                        measured.insert(op.stab_id);
                    }
                }
            }
            EXPECT_EQ(measured.size(), ps.schedule.stabilisers.size());
        }
    }
}

// On merged lattices with skipped columns the GHZ bridges must still
// measure exactly the stretched stabilisers.
TEST(Protocol, MergedLatticeReadoutBackpropagates) {
    auto lay = build_layout(5, 2);
    auto proto = make_state_transfer(lay, 1, 0, 3);
    const auto &cfg = proto.steps.front().lattice;
    auto sched = schedule_for_config(lay, cfg);
    for (const auto &span : sched.row_spans) {
        std::map<uint32_t, Basis> init_basis;
        std::map<uint32_t, PauliOperator> readout;
        for (size_t t = span.step_begin; t < span.step_end; t++) {
            for (const auto &op : sched.steps[t].ops) {
                if (op.kind == OpKind::Init) {
                    init_basis[op.q0] = op.basis;
                } else if (op.kind == OpKind::Measure && op.counted) {
                    auto [it, fresh] =
                        readout.try_emplace(op.stab_id, PauliOperator(lay.num_qubits));
                    if (op.basis == Basis::X) {
                        it->second.x.flip(op.q0);
                    } else {
                        it->second.z.flip(op.q0);
                    }
                }
            }
        }
        for (auto &[stab_id, p] : readout) {
            for (size_t t = span.step_end; t-- > span.step_begin;) {
                const auto &ops = sched.steps[t].ops;
                for (size_t oi = ops.size(); oi-- > 0;) {
                    if (ops[oi].kind == OpKind::Cnot) {
                        conjugate_inplace(p, CliffordGate::cnot(ops[oi].q0, ops[oi].q1));
                    }
                }
            }
            auto want = sched.stabilisers[stab_id].as_pauli(lay.num_qubits);
            for (uint32_t q = 0; q < lay.num_qubits; q++) {
                if (!lay.is_shuttle(q)) {
                    continue;
                }
                bool bx = p.x.get(q), bz = p.z.get(q);
                if (!bx && !bz) {
                    continue;
                }
                ASSERT_TRUE(init_basis.count(q)) << "uninitialised shuttle in readout";
                if (init_basis[q] == Basis::X) {
                    EXPECT_TRUE(bx && !bz);
                } else {
                    EXPECT_TRUE(bz && !bx);
                }
                p.x.set(q, false);
                p.z.set(q, false);
            }
            EXPECT_EQ(p, want) << "stab " << stab_id;
        }
    }
}

TEST(Protocol, AuditDistanceOnMemoryPatch) {
    for (int d : {2, 3, 4}) {
        auto lay = build_layout(d + 2, 1, true);
        auto cfg = memory_config(lay);
        auto audit = audit_distance(lay, cfg);
        EXPECT_EQ(audit.z_distance, d);
        EXPECT_EQ(audit.x_distance, d);
    }
}

// Brute-force cross-check of the distance audit: enumerate every Pauli of
// weight below the audited distance that commutes with all stabilisers and
// confirm none is a nontrivial logical.
TEST(Protocol, AuditMatchesBruteForceSmall) {
    for (int d : {2, 3}) {
        auto lay = build_layout(d + 2, 1, true);
        auto cfg = memory_config(lay);
        auto audit = audit_distance(lay, cfg);
        std::vector<PauliOperator> gens;
        for (const auto &s : cfg.stabilisers) {
            gens.push_back(s.as_pauli(lay.num_qubits));
        }
        auto rref = symplectic_rref(gens);
        int dist = audit.distance();
        // Every pure-Z or pure-X operator of weight < dist over the active
        // qubits either breaks a stabiliser or sits inside the group.
        const auto &qs = cfg.active_data;
        auto check = [&](const std::vector<uint32_t> &sel, bool z_type) {
            PauliOperator p(lay.num_qubits);
            for (uint32_t q : sel) {
                if (z_type) {
                    p.z.set(q, true);
                } else {
                    p.x.set(q, true);
                }
            }
            for (const auto &g : gens) {
                if (!commutes(p, g)) {
                    return;
                }
            }
            EXPECT_TRUE(in_span(rref, p)) << "weight-" << sel.size() << " logical below audit";
        };
        for (size_t i = 0; i < qs.size(); i++) {
            if (dist > 1) {
                check({qs[i]}, true);
                check({qs[i]}, false);
            }
            for (size_t j = i + 1; j < qs.size() && dist > 2; j++) {
                check({qs[i], qs[j]}, true);
                check({qs[i], qs[j]}, false);
            }
        }
    }
}

}  // namespace
