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

#include "qsegsim/schedule.hpp"

#include <gtest/gtest.h>

#include <map>
#include <set>

using namespace qsegsim;

namespace {

TEST(Schedule, StepCount) {
    for (int s : {5, 7, 9, 11}) {
        auto lay = build_layout(s, 1);
        auto sched = schedule_round(lay);
        int d = lay.code_distance;
        EXPECT_EQ(sched.step_count(), static_cast<size_t>(5 * (2 * d - 1)));
    }
}

TEST(Schedule, ShuttleInitAndMeasureOncePerRow) {
    auto lay = build_layout(7, 1);
    auto sched = schedule_round(lay);
    for (const auto &span : sched.row_spans) {
        std::map<uint32_t, int> inits, meas;
        for (size_t t = span.step_begin; t < span.step_end; t++) {
            for (const auto &op : sched.steps[t].ops) {
                if (op.kind == OpKind::Init) {
                    inits[op.q0]++;
                }
                if (op.kind == OpKind::Measure) {
                    meas[op.q0]++;
                }
            }
        }
        EXPECT_EQ(inits, meas);
        for (auto [q, c] : inits) {
            EXPECT_EQ(c, 1);
            EXPECT_TRUE(lay.is_shuttle(q));
        }
    }
}

TEST(Schedule, OneCnotPerSegmentPerStep) {
    auto lay = build_layout(9, 2);
    auto sched = schedule_round(lay);
    for (const auto &st : sched.steps) {
        std::set<int> segs;
        for (const auto &op : st.ops) {
            if (op.kind == OpKind::Cnot) {
                EXPECT_TRUE(segs.insert(op.host_segment).second);
            }
        }
    }
}

TEST(Schedule, BoundaryRowsDropOneCnot) {
    auto lay = build_layout(5, 1);
    auto sched = schedule_round(lay);
    // Weight-3 stabilisers have 3 data CNOTs, weight-4 have 4.
    std::map<uint32_t, int> cnots_per_stab;
    for (const auto &span : sched.row_spans) {
        std::map<uint32_t, uint32_t> shuttle_owner;
        for (const auto &st : sched.stabilisers) {
            if (st.type == span.type && st.row == span.row) {
                for (int b : st.shuttle_chain) {
                    shuttle_owner[lay.shuttle(b)] = st.id;
                }
            }
        }
        for (size_t t = span.step_begin; t < span.step_end; t++) {
            for (const auto &op : sched.steps[t].ops) {
                if (op.kind != OpKind::Cnot) {
                    continue;
                }
                bool q0_sh = lay.is_shuttle(op.q0), q1_sh = lay.is_shuttle(op.q1);
                if (q0_sh && q1_sh) {
                    continue;  // chain entangler
                }
                uint32_t sh = q0_sh ? op.q0 : op.q1;
                ASSERT_TRUE(shuttle_owner.count(sh));
                cnots_per_stab[shuttle_owner[sh]]++;
            }
        }
    }
    for (const auto &st : sched.stabilisers) {
        EXPECT_EQ(cnots_per_stab[st.id], static_cast<int>(st.data.size()));
    }
}

TEST(Schedule, EveryActiveQubitCoveredEachStep) {
    auto lay = build_layout(7, 1);
    auto sched = schedule_round(lay);
    for (const auto &st : sched.steps) {
        std::set<uint32_t> seen;
        for (const auto &op : st.ops) {
            if (op.kind == OpKind::Cnot) {
                seen.insert(op.q0);
                seen.insert(op.q1);
            } else if (op.kind == OpKind::Idle) {
                seen.insert(op.q0);
            }
        }
        for (uint32_t q : sched.active_data) {
            EXPECT_TRUE(seen.count(q));
        }
    }
}

// The readout of every stabiliser, propagated backward through its row's
// gates, must equal the stabiliser's data operator times init-basis
// stabilised shuttle components. This pins the whole circuit construction.
TEST(Schedule, BackpropagatedReadoutEqualsStabiliser) {
    for (int s : {5, 7}) {
        auto lay = build_layout(s, 1);
        auto sched = schedule_round(lay);
        for (const auto &span : sched.row_spans) {
            // Collect readout product per stabiliser and init bases.
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
                // Conjugate backward: last gate first.
                for (size_t t = span.step_end; t-- > span.step_begin;) {
                    const auto &ops = sched.steps[t].ops;
                    for (size_t oi = ops.size(); oi-- > 0;) {
                        const auto &op = ops[oi];
                        if (op.kind == OpKind::Cnot) {
                            conjugate_inplace(p, CliffordGate::cnot(op.q0, op.q1));
                        }
                    }
                }
                const auto &st = sched.stabilisers[stab_id];
                auto want = st.as_pauli(lay.num_qubits);
                // Shuttle components must be stabilised by their init state.
                for (uint32_t q = 0; q < lay.num_qubits; q++) {
                    if (!lay.is_shuttle(q)) {
                        continue;
                    }
                    bool bx = p.x.get(q), bz = p.z.get(q);
                    if (!bx && !bz) {
                        continue;
                    }
                    ASSERT_TRUE(init_basis.count(q));
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
}

}  // namespace
