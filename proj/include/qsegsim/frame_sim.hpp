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
#include <stdexcept>
#include <vector>

#include "qsegsim/layout.hpp"
#include "qsegsim/noise.hpp"
#include "qsegsim/pauli.hpp"
#include "qsegsim/rng.hpp"
#include "qsegsim/schedule.hpp"

namespace qsegsim {

// Detection event: a stabiliser outcome that differs from the previous
// round (round 0 compares against the known initial state, and a final
// noiseless round is appended so the residual frame is assessable).
struct DetectionEvent {
    uint32_t stab;  // side-local stabiliser index
    int round;      // 0 .. rounds (the last one is the perfect round)
};

struct SyndromeRecord {
    uint64_t trial_id = 0;
    int rounds = 0;
    std::vector<DetectionEvent> events_z;  // X-stabiliser events (z-type errors)
    std::vector<DetectionEvent> events_x;  // Z-stabiliser events (x-type errors)
    PauliFrame final_frame;                // residual data error after the perfect round
    std::vector<uint8_t> boundary_outcomes;  // perfect-round readout flips per stabiliser
    bool cross_x_logical = false;            // residual z-part anticommutes with logical X
    bool cross_z_logical = false;            // residual x-part anticommutes with logical Z
};

// A deterministic injected fault for oracle tests and edge-weight
// derivation.
struct Fault {
    enum class Kind : uint8_t { AfterOp, MeasFlip };
    Kind kind = Kind::AfterOp;
    int round = 0;
    int step = 0;
    int op_index = 0;
    PauliOperator pauli;  // full-width; AfterOp only
};

// Step-by-step Pauli-frame engine over a round schedule. This is the
// reference path: exact, simple, and used to derive the fault-mechanism
// table that the fast path samples from.
class ReferenceSim {
   public:
    ReferenceSim(const ChainLayout &lay, const RoundSchedule &sched)
        : lay_(&lay), sched_(&sched) {
        n_stabs_ = static_cast<int>(sched.stabilisers.size());
        stab_side_.resize(n_stabs_);
        side_index_.resize(n_stabs_);
        n_x_ = n_z_ = 0;
        for (int i = 0; i < n_stabs_; i++) {
            if (sched.stabilisers[i].type == 'X') {
                stab_side_[i] = 0;
                side_index_[i] = n_x_++;
            } else {
                stab_side_[i] = 1;
                side_index_[i] = n_z_++;
            }
        }
    }

    int num_x_stabs() const {
        return n_x_;
    }
    int num_z_stabs() const {
        return n_z_;
    }

    // Noisy Monte Carlo trial. Deterministic given (seed, trial_id).
    SyndromeRecord run(const NoiseParams &noise, int rounds, uint64_t seed, uint64_t trial_id,
                       const PauliOperator &logical_x, const PauliOperator &logical_z) const {
        auto rng = trial_rng(seed, trial_id);
        SyndromeRecord rec = execute(&noise, rounds, &rng, {}, logical_x, logical_z);
        rec.trial_id = trial_id;
        return rec;
    }

    // Noiseless run with explicit injected faults.
    SyndromeRecord run_injected(int rounds, const std::vector<Fault> &faults,
                                const PauliOperator &logical_x,
                                const PauliOperator &logical_z) const {
        return execute(nullptr, rounds, nullptr, faults, logical_x, logical_z);
    }

   private:
    struct Depolarize1 {
        std::mt19937_64 *rng;
        double rate;
    };

    void apply_one_qubit_noise(PauliFrame &f, uint32_t q, double rate, std::mt19937_64 &rng) const {
        if (rate <= 0.0) {
            return;
        }
        if (uniform01(rng) < rate) {
            switch (rng() % 3) {
                case 0:
                    f.x.flip(q);
                    break;
                case 1:
                    f.x.flip(q);
                    f.z.flip(q);
                    break;
                default:
                    f.z.flip(q);
            }
        }
    }

    void apply_two_qubit_noise(PauliFrame &f, uint32_t a, uint32_t b, double rate,
                               std::mt19937_64 &rng) const {
        if (rate <= 0.0) {
            return;
        }
        if (uniform01(rng) < rate) {
            uint64_t v = rng() % 15 + 1;
            uint64_t pa = v / 4, pb = v % 4;
            if (pa == 1 || pa == 2) {
                f.x.flip(a);
            }
            if (pa == 2 || pa == 3) {
                f.z.flip(a);
            }
            if (pb == 1 || pb == 2) {
                f.x.flip(b);
            }
            if (pb == 2 || pb == 3) {
                f.z.flip(b);
            }
        }
    }

    SyndromeRecord execute(const NoiseParams *noise, int rounds, std::mt19937_64 *rng,
                           const std::vector<Fault> &faults, const PauliOperator &logical_x,
                           const PauliOperator &logical_z) const {
        const auto &steps = sched_->steps;
        PauliFrame frame(lay_->num_qubits);
        SyndromeRecord rec;
        rec.rounds = rounds;
        std::vector<uint8_t> prev_flip(n_stabs_, 0), cur_flip(n_stabs_, 0);

        for (int r = 0; r <= rounds; r++) {
            bool perfect = (r == rounds);
            std::fill(cur_flip.begin(), cur_flip.end(), 0);
            for (size_t t = 0; t < steps.size(); t++) {
                const auto &ops = steps[t].ops;
                for (size_t oi = 0; oi < ops.size(); oi++) {
                    const StepOp &op = ops[oi];
                    uint8_t meas_flip = 0;
                    switch (op.kind) {
                        case OpKind::Init: {
                            frame.x.set(op.q0, false);
                            frame.z.set(op.q0, false);
                            if (!perfect && noise) {
                                if (uniform01(*rng) < noise->epsI) {
                                    // Flipped init: Z after |+>, X after |0>.
                                    if (op.basis == Basis::X) {
                                        frame.z.flip(op.q0);
                                    } else {
                                        frame.x.flip(op.q0);
                                    }
                                }
                                if (op.basis == Basis::X) {
                                    apply_one_qubit_noise(frame, op.q0, noise->eps1, *rng);
                                }
                            }
                            break;
                        }
                        case OpKind::Cnot: {
                            if (frame.x.get(op.q0)) {
                                frame.x.flip(op.q1);
                            }
                            if (frame.z.get(op.q1)) {
                                frame.z.flip(op.q0);
                            }
                            if (!perfect && noise) {
                                apply_two_qubit_noise(frame, op.q0, op.q1, noise->eps2, *rng);
                            }
                            break;
                        }
                        case OpKind::Measure: {
                            if (!perfect && noise && op.basis == Basis::X) {
                                // Basis Hadamard before the readout.
                                apply_one_qubit_noise(frame, op.q0, noise->eps1, *rng);
                            }
                            meas_flip = (op.basis == Basis::X) ? frame.z.get(op.q0)
                                                               : frame.x.get(op.q0);
                            if (!perfect && noise && uniform01(*rng) < noise->epsM) {
                                meas_flip ^= 1;
                            }
                            break;
                        }
                        case OpKind::Idle: {
                            if (!perfect && noise) {
                                apply_one_qubit_noise(frame, op.q0, noise->eps0, *rng);
                            }
                            break;
                        }
                        case OpKind::ShuttleMove:
                            break;
                    }
                    if (!perfect && !faults.empty()) {
                        for (const Fault &f : faults) {
                            if (f.round == r && f.step == static_cast<int>(t) &&
                                f.op_index == static_cast<int>(oi)) {
                                if (f.kind == Fault::Kind::AfterOp) {
                                    frame.x ^= f.pauli.x;
                                    frame.z ^= f.pauli.z;
                                } else {
                                    meas_flip ^= 1;
                                }
                            }
                        }
                    }
                    if (op.kind == OpKind::Measure && op.counted) {
                        cur_flip[op.stab_id] ^= meas_flip;
                    }
                }
            }
            for (int s = 0; s < n_stabs_; s++) {
                uint8_t ev = cur_flip[s] ^ prev_flip[s];
                if (ev) {
                    DetectionEvent e{static_cast<uint32_t>(side_index_[s]), r};
                    if (stab_side_[s] == 0) {
                        rec.events_z.push_back(e);
                    } else {
                        rec.events_x.push_back(e);
                    }
                }
            }
            prev_flip = cur_flip;
        }
        rec.boundary_outcomes = cur_flip;
        rec.final_frame = frame;
        rec.cross_x_logical = BitVec::and_parity(frame.z, logical_x.x);
        rec.cross_z_logical = BitVec::and_parity(frame.x, logical_z.z);
        return rec;
    }

    const ChainLayout *lay_;
    const RoundSchedule *sched_;
    int n_stabs_ = 0, n_x_ = 0, n_z_ = 0;
    std::vector<uint8_t> stab_side_;
    std::vector<int> side_index_;
};

}  // namespace qsegsim
