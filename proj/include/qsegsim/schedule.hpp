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
#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "qsegsim/lattice.hpp"
#include "qsegsim/layout.hpp"

namespace qsegsim {

enum class OpKind : uint8_t { Init, Measure, Cnot, Idle, ShuttleMove };
enum class Basis : uint8_t { Z, X };  // 0/1 or +/- basis

struct StepOp {
    OpKind kind;
    Basis basis = Basis::Z;         // init/measure
    uint32_t q0 = kNoQubit;         // cnot control / op qubit
    uint32_t q1 = kNoQubit;         // cnot target
    int host_segment = -1;          // cnot host / shuttle-move destination
    uint32_t stab_id = UINT32_MAX;  // measure: owning stabiliser
    bool counted = true;            // measure: included in the stabiliser readout
};

struct TimeStep {
    std::vector<StepOp> ops;
};

struct RowSpan {
    char type;
    int row;
    size_t step_begin, step_end;  // [begin, end)
};

// Time-ordered operation list for one full round of stabiliser measurements
// on a lattice configuration. A plain memory round has exactly 5(2d-1)
// steps; rounds on deformed lattices may need extra steps for GHZ bridges
// across skipped columns.
struct RoundSchedule {
    std::vector<TimeStep> steps;
    std::vector<Stabiliser> stabilisers;
    std::vector<uint32_t> active_data;  // sorted; idles attach to these
    std::vector<RowSpan> row_spans;

    size_t step_count() const {
        return steps.size();
    }
};

namespace detail {

struct SiteCnot {
    uint32_t shuttle;  // shuttle qubit id
    uint32_t data;
    int host_segment;
};

// Distributes a stabiliser's data qubits over its GHZ chain. Z-type odd
// chains read out through the chain ends only, so the ends must host every
// data interaction; otherwise any bordering chain member may serve.
// Canonical order: far-left, center-bottom, center-top, far-right.
inline std::vector<SiteCnot> assign_data(const ChainLayout &lay, const Stabiliser &s) {
    int c = s.center_col;
    size_t k = s.shuttle_chain.size();
    bool ends_only = (s.type == 'Z') && (k > 1) && (k % 2 == 1);
    auto eligible = [&](size_t i) {
        return !ends_only || i == 0 || i == k - 1;
    };
    struct Site {
        int col, y;
        uint32_t q;
    };
    std::vector<Site> order;
    Site far_l{0, 0, kNoQubit}, far_r{0, 0, kNoQubit}, top{0, 0, kNoQubit}, bot{0, 0, kNoQubit};
    for (size_t i = 0; i < s.sites.size(); i++) {
        auto [col, y] = s.sites[i];
        Site r{col, y, s.data[i]};
        if (col < c) {
            far_l = r;
        } else if (col > c) {
            far_r = r;
        } else if (y < s.row) {
            top = r;
        } else {
            bot = r;
        }
    }
    for (const Site *site : {&far_l, &bot, &top, &far_r}) {
        if (site->q != kNoQubit) {
            order.push_back(*site);
        }
    }
    std::vector<SiteCnot> out;
    for (const Site &r : order) {
        std::vector<size_t> hosts;
        for (size_t i = 0; i < k; i++) {
            int b = s.shuttle_chain[i];
            if ((b - 1 == r.col || b == r.col) && eligible(i)) {
                hosts.push_back(i);
            }
        }
        if (hosts.empty()) {
            throw std::logic_error("stabiliser site unreachable by eligible shuttle");
        }
        size_t host;
        if (r.col == c) {
            host = (r.y < s.row) ? hosts.front() : hosts.back();
        } else {
            host = (r.col < c) ? hosts.front() : hosts.back();
        }
        out.push_back({lay.shuttle(s.shuttle_chain[host]), r.q, r.col});
    }
    return out;
}

}  // namespace detail

// Emits the row-by-row measurement circuit of a lattice configuration.
// X-stabiliser rows are swept top to bottom, then Z rows; one row's
// shuttles are initialised, chain-entangled, interacted and measured before
// the next row starts. Within a step no segment hosts more than one CNOT
// and no qubit is touched twice; data CNOTs go into the earliest admissible
// step. Data qubits not acted on in a step carry explicit idle markers so
// memory noise attaches deterministically.
inline RoundSchedule schedule_for_config(const ChainLayout &lay, const LatticeConfig &cfg) {
    RoundSchedule sched;
    sched.stabilisers = cfg.stabilisers;
    sched.active_data = cfg.active_data;

    std::map<std::pair<char, int>, std::vector<const Stabiliser *>> rows;
    for (const auto &s : sched.stabilisers) {
        rows[{s.type == 'X' ? 0 : 1, s.row}].push_back(&s);
    }

    for (auto &[row_key, stabs] : rows) {
        std::set<int> used;
        for (auto *s : stabs) {
            for (int b : s->shuttle_chain) {
                if (!used.insert(b).second) {
                    throw std::logic_error("shuttle shared by two stabilisers in one row");
                }
            }
        }
        std::vector<std::set<int>> seg_busy(1);
        std::vector<std::set<uint32_t>> qubit_busy(1);
        struct Placed {
            size_t step;
            const Stabiliser *stab;
            detail::SiteCnot cnot;
        };
        std::vector<Placed> placed;
        auto ensure = [&](size_t t) {
            while (seg_busy.size() <= t) {
                seg_busy.emplace_back();
                qubit_busy.emplace_back();
            }
        };
        // Chain CNOTs occupy fixed early steps.
        for (auto *s : stabs) {
            for (size_t j = 0; j + 1 < s->shuttle_chain.size(); j++) {
                size_t t = 1 + j;
                ensure(t);
                if (!seg_busy[t].insert(s->shuttle_chain[j]).second) {
                    throw std::logic_error("chain CNOTs collide in a segment");
                }
                qubit_busy[t].insert(lay.shuttle(s->shuttle_chain[j]));
                qubit_busy[t].insert(lay.shuttle(s->shuttle_chain[j + 1]));
            }
        }
        // Data CNOTs: earliest admissible step after the stabiliser's own
        // chain completes.
        for (auto *s : stabs) {
            size_t base = 1 + (s->shuttle_chain.size() - 1);
            for (const auto &dc : detail::assign_data(lay, *s)) {
                size_t t = base;
                while (true) {
                    ensure(t);
                    if (!seg_busy[t].count(dc.host_segment) && !qubit_busy[t].count(dc.shuttle) &&
                        !qubit_busy[t].count(dc.data)) {
                        break;
                    }
                    t++;
                }
                seg_busy[t].insert(dc.host_segment);
                qubit_busy[t].insert(dc.shuttle);
                qubit_busy[t].insert(dc.data);
                placed.push_back({t, s, dc});
            }
        }
        size_t n_steps = seg_busy.size() + 1;  // + final measure step
        std::vector<TimeStep> row_steps(n_steps);
        size_t meas_step = n_steps - 1;

        for (auto *s : stabs) {
            size_t k = s->shuttle_chain.size();
            bool ends_only = (s->type == 'Z') && (k > 1) && (k % 2 == 1);
            for (size_t j = 0; j < k; j++) {
                StepOp op;
                op.kind = OpKind::Init;
                op.basis = (j == 0 && (k > 1 || s->type == 'X')) ? Basis::X : Basis::Z;
                op.q0 = lay.shuttle(s->shuttle_chain[j]);
                row_steps[0].ops.push_back(op);
            }
            for (size_t j = 0; j + 1 < k; j++) {
                StepOp op;
                op.kind = OpKind::Cnot;
                op.q0 = lay.shuttle(s->shuttle_chain[j]);
                op.q1 = lay.shuttle(s->shuttle_chain[j + 1]);
                op.host_segment = s->shuttle_chain[j];
                row_steps[1 + j].ops.push_back(op);
            }
            for (size_t j = 0; j < k; j++) {
                StepOp op;
                op.kind = OpKind::Measure;
                op.q0 = lay.shuttle(s->shuttle_chain[j]);
                op.stab_id = s->id;
                bool is_end = (j == 0) || (j == k - 1);
                if (s->type == 'X') {
                    op.basis = Basis::X;
                    op.counted = true;
                } else if (ends_only && !is_end) {
                    op.basis = Basis::X;  // disentangle GHZ interior
                    op.counted = false;
                } else {
                    op.basis = Basis::Z;
                    op.counted = true;
                }
                row_steps[meas_step].ops.push_back(op);
            }
        }
        for (const auto &pl : placed) {
            StepOp mv;
            mv.kind = OpKind::ShuttleMove;
            mv.q0 = pl.cnot.shuttle;
            mv.host_segment = pl.cnot.host_segment;
            row_steps[pl.step].ops.push_back(mv);
            StepOp op;
            op.kind = OpKind::Cnot;
            if (pl.stab->type == 'X') {
                op.q0 = pl.cnot.shuttle;  // shuttle controls data
                op.q1 = pl.cnot.data;
            } else {
                op.q0 = pl.cnot.data;  // data controls shuttle
                op.q1 = pl.cnot.shuttle;
            }
            op.host_segment = pl.cnot.host_segment;
            row_steps[pl.step].ops.push_back(op);
        }

        for (size_t ti = 0; ti < row_steps.size(); ti++) {
            std::set<int> segs;
            std::set<uint32_t> qs;
            for (auto &op : row_steps[ti].ops) {
                if (op.kind == OpKind::Cnot) {
                    if (!segs.insert(op.host_segment).second) {
                        throw std::logic_error("two CNOTs share a segment in one step");
                    }
                    if (!qs.insert(op.q0).second || !qs.insert(op.q1).second) {
                        throw std::logic_error("qubit acted on twice in one step");
                    }
                }
            }
        }
        size_t begin = sched.steps.size();
        for (auto &st : row_steps) {
            sched.steps.push_back(std::move(st));
        }
        sched.row_spans.push_back(
            {row_key.first == 0 ? 'X' : 'Z', row_key.second, begin, sched.steps.size()});
    }

    // Idle markers on data qubits not acted on in a step.
    for (auto &st : sched.steps) {
        std::set<uint32_t> busy;
        for (auto &op : st.ops) {
            if (op.kind == OpKind::Cnot) {
                busy.insert(op.q0);
                busy.insert(op.q1);
            }
        }
        for (uint32_t q : sched.active_data) {
            if (!busy.count(q)) {
                StepOp op;
                op.kind = OpKind::Idle;
                op.q0 = q;
                st.ops.push_back(op);
            }
        }
    }
    return sched;
}

// A full round of stabiliser measurements on the plain memory lattice:
// 5(d-1) steps for the X rows plus 5d for the Z rows.
inline RoundSchedule schedule_round(const ChainLayout &lay) {
    return schedule_for_config(lay, memory_config(lay));
}

}  // namespace qsegsim
