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

#include <array>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "qsegsim/frame_sim.hpp"

namespace qsegsim {

// Effect of one fault mechanism on one error side (z-type errors are seen
// by X stabilisers, x-type errors by Z stabilisers). Detection events are
// stored relative to the fault round; every mechanism of this circuit
// family touches at most two rounds and two stabilisers per side.
struct SideSig {
    uint8_t n_ev = 0;
    uint32_t ev_stab[2] = {0, 0};
    uint8_t ev_dr[2] = {0, 0};
    bool cross = false;                // residual anticommutes with the tracked logical
    std::vector<uint32_t> res;         // residual data qubits

    bool empty() const {
        return n_ev == 0 && !cross && res.empty();
    }
};

struct OneQubitLoc {
    int step = 0, op = 0;
    uint32_t qubit = kNoQubit;
    SideSig z, x;
};

struct CnotLoc {
    int step = 0, op = 0;
    uint32_t q0 = kNoQubit, q1 = kNoQubit;
    // Indexed by mask-1; mask bit0 = control, bit1 = target.
    std::array<SideSig, 3> z, x;
};

struct FlipLoc {
    int step = 0, op = 0;
    uint32_t qubit = kNoQubit;
    bool meas_flip = false;  // true: measurement flip; false: Pauli after init
    bool z_side = false;     // which side the flip feeds
    SideSig sig;
};

// Exhaustive single-fault table for one round template, derived by
// propagating each fault through the scheduled circuit. Drives both the
// fast trial sampler and the decoder's edge weights.
class MechanismTable {
   public:
    MechanismTable() = default;

    static MechanismTable build(const ChainLayout &lay, const RoundSchedule &sched,
                                const PauliOperator &logical_x, const PauliOperator &logical_z) {
        MechanismTable tab;
        tab.lay_ = &lay;
        tab.sched_ = &sched;
        ReferenceSim probe(lay, sched);
        tab.n_x_ = probe.num_x_stabs();
        tab.n_z_ = probe.num_z_stabs();
        const int probe_round = 1, probe_rounds = 3;
        size_t n = lay.num_qubits;

        auto probe_fault = [&](const Fault &f) -> std::pair<SideSig, SideSig> {
            auto rec = probe.run_injected(probe_rounds, {f}, logical_x, logical_z);
            SideSig zs, xs;
            auto fill = [&](SideSig &s, const std::vector<DetectionEvent> &evs, bool cross,
                            const BitVec &mask) {
                for (const auto &e : evs) {
                    if (e.round < probe_round || e.round > probe_round + 1) {
                        throw std::logic_error("fault signature spans more than two rounds");
                    }
                    if (s.n_ev >= 2) {
                        throw std::logic_error("fault produces >2 detection events of one type");
                    }
                    s.ev_stab[s.n_ev] = e.stab;
                    s.ev_dr[s.n_ev] = static_cast<uint8_t>(e.round - probe_round);
                    s.n_ev++;
                }
                s.cross = cross;
                for (size_t q = 0; q < mask.size(); q++) {
                    if (mask.get(q) && !lay.is_shuttle(static_cast<uint32_t>(q))) {
                        s.res.push_back(static_cast<uint32_t>(q));
                    }
                }
                if (s.n_ev == 0 && s.cross) {
                    throw std::logic_error("undetectable fault with logical action");
                }
            };
            fill(zs, rec.events_z, rec.cross_x_logical, rec.final_frame.z);
            fill(xs, rec.events_x, rec.cross_z_logical, rec.final_frame.x);
            return {zs, xs};
        };

        auto make_pauli = [&](std::initializer_list<std::pair<uint32_t, char>> terms) {
            PauliOperator p(n);
            for (auto [q, c] : terms) {
                if (c == 'X' || c == 'Y') {
                    p.x.set(q, true);
                }
                if (c == 'Z' || c == 'Y') {
                    p.z.set(q, true);
                }
            }
            return p;
        };

        const auto &steps = sched.steps;
        for (size_t t = 0; t < steps.size(); t++) {
            for (size_t oi = 0; oi < steps[t].ops.size(); oi++) {
                const StepOp &op = steps[t].ops[oi];
                Fault f;
                f.round = probe_round;
                f.step = static_cast<int>(t);
                f.op_index = static_cast<int>(oi);
                switch (op.kind) {
                    case OpKind::Cnot: {
                        CnotLoc loc;
                        loc.step = f.step;
                        loc.op = f.op_index;
                        loc.q0 = op.q0;
                        loc.q1 = op.q1;
                        for (int mask = 1; mask <= 3; mask++) {
                            f.pauli = make_pauli({{op.q0, (mask & 1) ? 'Z' : '_'},
                                                  {op.q1, (mask & 2) ? 'Z' : '_'}});
                            auto [zs, xs] = probe_fault(f);
                            if (!xs.empty()) {
                                throw std::logic_error("z fault leaked to x side");
                            }
                            loc.z[mask - 1] = zs;
                            f.pauli = make_pauli({{op.q0, (mask & 1) ? 'X' : '_'},
                                                  {op.q1, (mask & 2) ? 'X' : '_'}});
                            auto [zs2, xs2] = probe_fault(f);
                            if (!zs2.empty()) {
                                throw std::logic_error("x fault leaked to z side");
                            }
                            loc.x[mask - 1] = xs2;
                        }
                        tab.cnots.push_back(std::move(loc));
                        break;
                    }
                    case OpKind::Idle: {
                        OneQubitLoc loc;
                        loc.step = f.step;
                        loc.op = f.op_index;
                        loc.qubit = op.q0;
                        f.pauli = make_pauli({{op.q0, 'Z'}});
                        loc.z = probe_fault(f).first;
                        f.pauli = make_pauli({{op.q0, 'X'}});
                        loc.x = probe_fault(f).second;
                        if (!loc.z.empty() || !loc.x.empty()) {
                            tab.idles.push_back(std::move(loc));
                        }
                        break;
                    }
                    case OpKind::Init: {
                        // Init flip: Z after |+>, X after |0>.
                        FlipLoc fl;
                        fl.step = f.step;
                        fl.op = f.op_index;
                        fl.qubit = op.q0;
                        fl.meas_flip = false;
                        f.pauli = make_pauli({{op.q0, op.basis == Basis::X ? 'Z' : 'X'}});
                        auto [zs, xs] = probe_fault(f);
                        fl.z_side = (op.basis == Basis::X);
                        fl.sig = fl.z_side ? zs : xs;
                        if (!fl.sig.empty()) {
                            tab.init_flips.push_back(fl);
                        }
                        if (op.basis == Basis::X) {
                            // Fused basis Hadamard: one eps1 channel.
                            OneQubitLoc loc;
                            loc.step = f.step;
                            loc.op = f.op_index;
                            loc.qubit = op.q0;
                            f.pauli = make_pauli({{op.q0, 'Z'}});
                            loc.z = probe_fault(f).first;
                            f.pauli = make_pauli({{op.q0, 'X'}});
                            loc.x = probe_fault(f).second;
                            if (!loc.z.empty() || !loc.x.empty()) {
                                tab.init_h.push_back(std::move(loc));
                            }
                        }
                        break;
                    }
                    case OpKind::Measure: {
                        if (!op.counted) {
                            break;
                        }
                        FlipLoc fl;
                        fl.step = f.step;
                        fl.op = f.op_index;
                        fl.qubit = op.q0;
                        fl.meas_flip = true;
                        Fault mf = f;
                        mf.kind = Fault::Kind::MeasFlip;
                        auto [zs, xs] = probe_fault(mf);
                        fl.z_side = (op.basis == Basis::X);
                        fl.sig = fl.z_side ? zs : xs;
                        if (!fl.sig.empty()) {
                            if (op.basis == Basis::X) {
                                tab.measx_flips.push_back(fl);
                            } else {
                                tab.measz_flips.push_back(fl);
                            }
                        }
                        break;
                    }
                    case OpKind::ShuttleMove:
                        break;
                }
            }
        }
        return tab;
    }

    int num_x_stabs() const {
        return n_x_;
    }
    int num_z_stabs() const {
        return n_z_;
    }
    const ChainLayout &layout() const {
        return *lay_;
    }
    const RoundSchedule &schedule() const {
        return *sched_;
    }

    // Per-round template locations.
    std::vector<CnotLoc> cnots;            // eps2
    std::vector<OneQubitLoc> idles;        // eps0
    std::vector<OneQubitLoc> init_h;       // eps1 (|+> init Hadamard)
    std::vector<FlipLoc> init_flips;       // epsI
    std::vector<FlipLoc> measx_flips;      // epsM on X-basis readouts (also carries eps1 flip)
    std::vector<FlipLoc> measz_flips;      // epsM on Z-basis readouts

   private:
    const ChainLayout *lay_ = nullptr;
    const RoundSchedule *sched_ = nullptr;
    int n_x_ = 0, n_z_ = 0;
};

// Result of one fast trial: odd-parity detector nodes per side plus the
// residual logical-crossing parities. Node id = stab * (rounds+1) + round.
struct FastTrial {
    std::vector<uint32_t> defects_z, defects_x;
    bool cross_z = false;  // z residual anticommutes with logical X
    bool cross_x = false;
};

// Samples trials by XOR-composing precomputed single-fault signatures;
// Pauli frames are linear over GF(2), so this is exact and O(#faults).
class TrialSampler {
   public:
    TrialSampler(const MechanismTable &tab, const NoiseParams &noise, int rounds)
        : tab_(&tab), noise_(noise), rounds_(rounds) {
        par_z_.assign(static_cast<size_t>(tab.num_x_stabs()) * (rounds + 1), 0);
        par_x_.assign(static_cast<size_t>(tab.num_z_stabs()) * (rounds + 1), 0);
    }

    int rounds() const {
        return rounds_;
    }

    FastTrial run(uint64_t seed, uint64_t trial_id) {
        return run_impl(seed, trial_id, nullptr);
    }

    // Also returns the sampled faults as injectable objects (test oracle).
    FastTrial run_collecting(uint64_t seed, uint64_t trial_id, std::vector<Fault> &out_faults) {
        return run_impl(seed, trial_id, &out_faults);
    }

   private:
    void apply_sig(const SideSig &s, int r, bool z_side, FastTrial &trial) {
        int R = rounds_ + 1;
        auto &par = z_side ? par_z_ : par_x_;
        auto &touched = z_side ? touched_z_ : touched_x_;
        for (int e = 0; e < s.n_ev; e++) {
            uint32_t node = s.ev_stab[e] * R + (r + s.ev_dr[e]);
            par[node] ^= 1;
            touched.push_back(node);
        }
        if (z_side) {
            trial.cross_z ^= s.cross;
        } else {
            trial.cross_x ^= s.cross;
        }
    }

    template <typename Loc>
    Fault fault_for(const Loc &loc, int r, const PauliOperator &p) const {
        Fault f;
        f.round = r;
        f.step = loc.step;
        f.op_index = loc.op;
        f.pauli = p;
        return f;
    }

    FastTrial run_impl(uint64_t seed, uint64_t trial_id, std::vector<Fault> *collect) {
        auto rng = trial_rng(seed, trial_id);
        FastTrial trial;
        size_t n = tab_->layout().num_qubits;
        const int T = rounds_;

        auto collect_pauli = [&](auto &loc, int r, std::initializer_list<std::pair<uint32_t, char>> terms) {
            if (!collect) {
                return;
            }
            PauliOperator p(n);
            for (auto [q, c] : terms) {
                if (c == 'X' || c == 'Y') {
                    p.x.set(q, true);
                }
                if (c == 'Z' || c == 'Y') {
                    p.z.set(q, true);
                }
            }
            collect->push_back(fault_for(loc, r, p));
        };

        // Two-qubit gate faults.
        if (noise_.eps2 > 0 && !tab_->cnots.empty()) {
            size_t L = tab_->cnots.size();
            sample_bernoulli_hits(rng, L * T, noise_.eps2, [&](size_t i) {
                int r = static_cast<int>(i / L);
                const CnotLoc &loc = tab_->cnots[i % L];
                uint64_t v = rng() % 15 + 1;
                uint64_t a = v / 4, b = v % 4;
                int zmask = ((a == 2 || a == 3) ? 1 : 0) | ((b == 2 || b == 3) ? 2 : 0);
                int xmask = ((a == 1 || a == 2) ? 1 : 0) | ((b == 1 || b == 2) ? 2 : 0);
                if (zmask) {
                    apply_sig(loc.z[zmask - 1], r, true, trial);
                }
                if (xmask) {
                    apply_sig(loc.x[xmask - 1], r, false, trial);
                }
                static const char P[4] = {'_', 'X', 'Y', 'Z'};
                collect_pauli(loc, r, {{loc.q0, P[a]}, {loc.q1, P[b]}});
            });
        }
        // One-qubit depolarizing classes.
        auto run_oneq = [&](const std::vector<OneQubitLoc> &locs, double rate) {
            if (rate <= 0 || locs.empty()) {
                return;
            }
            size_t L = locs.size();
            sample_bernoulli_hits(rng, L * T, rate, [&](size_t i) {
                int r = static_cast<int>(i / L);
                const OneQubitLoc &loc = locs[i % L];
                uint64_t v = rng() % 3;  // 0:X 1:Y 2:Z
                if (v != 0) {
                    apply_sig(loc.z, r, true, trial);
                }
                if (v != 2) {
                    apply_sig(loc.x, r, false, trial);
                }
                static const char P[3] = {'X', 'Y', 'Z'};
                collect_pauli(loc, r, {{loc.qubit, P[v]}});
            });
        };
        run_oneq(tab_->idles, noise_.eps0);
        run_oneq(tab_->init_h, noise_.eps1);

        // Init flips.
        auto run_flips = [&](const std::vector<FlipLoc> &locs, double rate) {
            if (rate <= 0 || locs.empty()) {
                return;
            }
            size_t L = locs.size();
            sample_bernoulli_hits(rng, L * T, rate, [&](size_t i) {
                int r = static_cast<int>(i / L);
                const FlipLoc &loc = locs[i % L];
                apply_sig(loc.sig, r, loc.z_side, trial);
                if (collect) {
                    Fault f;
                    f.round = r;
                    f.step = loc.step;
                    f.op_index = loc.op;
                    if (loc.meas_flip) {
                        f.kind = Fault::Kind::MeasFlip;
                    } else {
                        PauliOperator p(n);
                        if (loc.z_side) {
                            p.z.set(loc.qubit, true);
                        } else {
                            p.x.set(loc.qubit, true);
                        }
                        f.pauli = p;
                    }
                    collect->push_back(f);
                }
            });
        };
        run_flips(tab_->init_flips, noise_.epsI);
        run_flips(tab_->measx_flips, noise_.epsM);
        run_flips(tab_->measz_flips, noise_.epsM);
        // Basis Hadamard before X-basis readouts: flips the outcome for two
        // of the three depolarizing variants.
        if (noise_.eps1 > 0 && !tab_->measx_flips.empty()) {
            size_t L = tab_->measx_flips.size();
            sample_bernoulli_hits(rng, L * T, noise_.eps1, [&](size_t i) {
                int r = static_cast<int>(i / L);
                const FlipLoc &loc = tab_->measx_flips[i % L];
                uint64_t v = rng() % 3;
                if (v != 0) {
                    apply_sig(loc.sig, r, loc.z_side, trial);
                    if (collect) {
                        Fault f;
                        f.kind = Fault::Kind::MeasFlip;
                        f.round = r;
                        f.step = loc.step;
                        f.op_index = loc.op;
                        collect->push_back(f);
                    }
                }
            });
        }

        harvest(par_z_, touched_z_, trial.defects_z);
        harvest(par_x_, touched_x_, trial.defects_x);
        return trial;
    }

    static void harvest(std::vector<uint8_t> &par, std::vector<uint32_t> &touched,
                        std::vector<uint32_t> &out) {
        for (uint32_t node : touched) {
            if (par[node]) {
                out.push_back(node);
                par[node] = 0;
            }
        }
        touched.clear();
    }

    const MechanismTable *tab_;
    NoiseParams noise_;
    int rounds_;
    std::vector<uint8_t> par_z_, par_x_;
    std::vector<uint32_t> touched_z_, touched_x_;
};

}  // namespace qsegsim
