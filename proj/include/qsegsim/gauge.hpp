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
#include <cassert>
#include <cstdint>
#include <functional>
#include <map>
#include <stdexcept>
#include <vector>

#include "qsegsim/rng.hpp"

namespace qsegsim {

// Error rates of operations on surface-code logical qubits, derived from
// the per-round logical rate p_L and the code distance: initialisations
// and measurements cost d rounds, a lattice CNOT 14 d rounds, a SWAP three
// CNOTs. Memory noise scales with the duration of the concurrent step.
struct LogicalRates {
    double p_l = 0;
    double p_im = 0;    // init/measure flip
    double p_cnot = 0;  // two-qubit depolarizing
    double p_swap = 0;
    double p0 = 0;  // memory per init/measure duration; x4 for CNOT, x12 for SWAP

    static LogicalRates from_p_l(double p_l, int d) {
        LogicalRates r;
        r.p_l = p_l;
        r.p_im = d * p_l;
        r.p_cnot = 14.0 * d * p_l;
        r.p_swap = 3.0 * r.p_cnot;
        r.p0 = d * p_l;
        return r;
    }
    // The level curves depend only on p_cnot: every rate is tied to it.
    static LogicalRates from_p_cnot(double p_cnot) {
        LogicalRates r;
        r.p_cnot = p_cnot;
        r.p_im = p_cnot / 14.0;
        r.p_swap = 3.0 * p_cnot;
        r.p0 = p_cnot / 14.0;
        r.p_l = 0;
        return r;
    }
};

struct GaugeConfig {
    int level = 1;
    int distance() const {
        return 1 << level;
    }
    long block_qubits() const {
        long q = 1;
        for (int i = 0; i < level; i++) {
            q *= 6;
        }
        return q;
    }
};

namespace gauge_detail {

enum class GOpKind : uint8_t { InitX, InitZ, MeasX, MeasZ, Cnot, Swap };

struct GOp {
    GOpKind kind;
    int a = -1, b = -1;  // chain ids (CNOT: control a, target b)
    int meas = -1;
};

struct GLayer {
    double idle_mult = 1.0;  // memory-noise multiplier for the step duration
    std::vector<GOp> ops;
};

inline long pow6(int k) {
    long v = 1;
    for (int i = 0; i < k; i++) {
        v *= 6;
    }
    return v;
}

}  // namespace gauge_detail

// One error-corrected CNOT (exRec) of the concatenated four-qubit gauge
// code on a 1D chain: an EC round on both blocks, the transversal CNOT,
// and a trailing EC round. Each level-k block is the sextet
// [D1 A1 D2 D3 A2 D4] of level-(k-1) blocks; gauge operators are measured
// through encoded ancilla blocks, with a block-level SWAP re-pairing the
// data blocks for the Z gauges. Transversal operations between adjacent
// blocks are scheduled as parallel layers: the routing is priced by the
// SWAP layers and the per-step memory multipliers, i.e. the same
// space-time-volume accounting that sets the logical rates themselves.
class GaugeCircuit {
   public:
    using GOp = gauge_detail::GOp;
    using GLayer = gauge_detail::GLayer;
    using GOpKind = gauge_detail::GOpKind;

    int level = 1;
    int n_qubits = 0;  // chain ids: [0, 2*6^n)
    std::vector<GLayer> layers;
    int n_meas = 0;

    struct GaugeMeas {
        int block;  // 0 control, 1 target
        int round;  // 0 pre, 1 post
        int lvl;    // gauge level (1..n)
        int inst;   // instance of the level-lvl sub-block within its block
        char type;  // 'X' or 'Z'
        int idx;    // which of the two gauge operators
        std::vector<int> bits;  // measurement ids (ancilla-block order)
    };
    std::vector<GaugeMeas> gauges;

    struct SubBlock {
        int lvl;
        int inst;
        std::vector<int> x_support;  // bare X logical support (chain ids)
        std::vector<int> z_support;
        std::vector<int> data_tree;
    };
    std::array<std::vector<SubBlock>, 2> subblocks;

    static GaugeCircuit build(int level) {
        if (level < 1 || level > 4) {
            throw std::invalid_argument("gauge concatenation level must be 1..4");
        }
        GaugeCircuit c;
        c.level = level;
        long m = gauge_detail::pow6(level);
        c.n_qubits = static_cast<int>(2 * m);
        for (int block = 0; block < 2; block++) {
            c.index_subblocks(block, level, static_cast<int>(block * m), 0);
        }
        std::vector<int> cb(m), tb(m);
        for (long i = 0; i < m; i++) {
            cb[i] = static_cast<int>(i);
            tb[i] = static_cast<int>(m + i);
        }
        // Syndrome extraction is repeated d/2 times per bracket, the usual
        // repetition scale for a distance-d code with noisy measurements.
        int reps = c.ec_reps();
        for (int r = 0; r < reps; r++) {
            c.append(zip(c.ec_round(level, cb, 0, r, 0), c.ec_round(level, tb, 1, r, 0)));
        }
        // Transversal CNOT over the data trees.
        {
            GLayer l;
            l.idle_mult = 4.0;
            auto cd = c.data_tree_ids(level, cb);
            auto td = c.data_tree_ids(level, tb);
            for (size_t i = 0; i < cd.size(); i++) {
                l.ops.push_back({GOpKind::Cnot, cd[i], td[i], -1});
            }
            c.layers.push_back(std::move(l));
        }
        for (int r = 0; r < reps; r++) {
            c.append(
                zip(c.ec_round(level, cb, 0, reps + r, 0), c.ec_round(level, tb, 1, reps + r, 0)));
        }
        return c;
    }

    // EC rounds per bracket: half the code distance, at least one.
    int ec_reps() const {
        return std::max(1, (1 << level) / 2);
    }
    int total_rounds() const {
        return 2 * ec_reps();
    }

    size_t op_count() const {
        size_t n = 0;
        for (const auto &l : layers) {
            n += l.ops.size();
        }
        return n;
    }

    const SubBlock &get_subblock(int block, int lvl, int inst) const {
        for (const auto &sb : subblocks[block]) {
            if (sb.lvl == lvl && sb.inst == inst) {
                return sb;
            }
        }
        throw std::logic_error("missing sub-block");
    }

   private:
    using Layers = std::vector<GLayer>;

    void append(Layers ls) {
        for (auto &l : ls) {
            layers.push_back(std::move(l));
        }
    }

    static Layers zip(Layers a, Layers b) {
        if (a.size() < b.size()) {
            std::swap(a, b);
        }
        for (size_t i = 0; i < b.size(); i++) {
            if (!b[i].ops.empty() && !a[i].ops.empty() && a[i].idle_mult != b[i].idle_mult) {
                throw std::logic_error("zip of structurally different layer lists");
            }
            if (!b[i].ops.empty() && a[i].ops.empty()) {
                a[i].idle_mult = b[i].idle_mult;
            }
            for (auto &op : b[i].ops) {
                a[i].ops.push_back(op);
            }
        }
        return a;
    }

    void index_subblocks(int block, int lvl, int base, int inst) {
        long m = gauge_detail::pow6(lvl - 1);
        SubBlock sb;
        sb.lvl = lvl;
        sb.inst = inst;
        if (lvl == 0) {
            sb.x_support = {base};
            sb.z_support = {base};
            sb.data_tree = {base};
        } else {
            static const int data_off[4] = {0, 2, 3, 5};
            std::array<std::vector<int>, 4> subx, subz, subd;
            for (int dsub = 0; dsub < 4; dsub++) {
                int sub_base = base + static_cast<int>(data_off[dsub] * m);
                int sub_inst = inst * 4 + dsub;
                index_subblocks(block, lvl - 1, sub_base, sub_inst);
                const SubBlock &child = get_subblock(block, lvl - 1, sub_inst);
                subx[dsub] = child.x_support;
                subz[dsub] = child.z_support;
                subd[dsub] = child.data_tree;
            }
            // Logical supports of the four-qubit code: X = X1 X3, Z = Z1 Z2.
            sb.x_support = subx[0];
            sb.x_support.insert(sb.x_support.end(), subx[2].begin(), subx[2].end());
            sb.z_support = subz[0];
            sb.z_support.insert(sb.z_support.end(), subz[1].begin(), subz[1].end());
            for (auto &v : subd) {
                sb.data_tree.insert(sb.data_tree.end(), v.begin(), v.end());
            }
        }
        subblocks[block].push_back(std::move(sb));
    }

    std::vector<int> data_tree_ids(int lvl, const std::vector<int> &ids) const {
        if (lvl == 0) {
            return ids;
        }
        long m = gauge_detail::pow6(lvl - 1);
        static const int data_off[4] = {0, 2, 3, 5};
        std::vector<int> out;
        for (int dsub = 0; dsub < 4; dsub++) {
            std::vector<int> sub(ids.begin() + data_off[dsub] * m,
                                 ids.begin() + (data_off[dsub] + 1) * m);
            auto s = data_tree_ids(lvl - 1, sub);
            out.insert(out.end(), s.begin(), s.end());
        }
        return out;
    }

    // Prep + transversal CNOTs + transversal readout of one gauge operator
    // through an encoded ancilla block.
    Layers gauge_measure(int lvl, const std::vector<int> &anc, const std::vector<int> &d1,
                         const std::vector<int> &d2, char type, int block, int round, int inst,
                         int idx) {
        Layers out;
        {
            GLayer l;
            l.idle_mult = 1.0;
            auto dt = data_tree_ids(lvl - 1, anc);
            std::vector<uint8_t> isdata(n_qubits, 0);
            for (int q : dt) {
                isdata[q] = 1;
            }
            for (int q : anc) {
                l.ops.push_back(
                    {(isdata[q] && type == 'X') ? GOpKind::InitX : GOpKind::InitZ, q, -1, -1});
            }
            out.push_back(std::move(l));
        }
        GaugeMeas gm;
        gm.block = block;
        gm.round = round;
        gm.lvl = lvl;
        gm.inst = inst;
        gm.type = type;
        gm.idx = idx;
        auto anc_dt = data_tree_ids(lvl - 1, anc);
        for (const std::vector<int> *d : {&d1, &d2}) {
            GLayer l;
            l.idle_mult = 4.0;
            auto d_dt = data_tree_ids(lvl - 1, *d);
            for (size_t i = 0; i < anc_dt.size(); i++) {
                if (type == 'X') {
                    l.ops.push_back({GOpKind::Cnot, anc_dt[i], d_dt[i], -1});
                } else {
                    l.ops.push_back({GOpKind::Cnot, d_dt[i], anc_dt[i], -1});
                }
            }
            out.push_back(std::move(l));
        }
        {
            GLayer l;
            l.idle_mult = 1.0;
            for (int q : anc) {
                GOp op;
                op.kind = (type == 'X') ? GOpKind::MeasX : GOpKind::MeasZ;
                op.a = q;
                op.meas = n_meas++;
                gm.bits.push_back(op.meas);
                l.ops.push_back(op);
            }
            out.push_back(std::move(l));
        }
        gauges.push_back(std::move(gm));
        return out;
    }

    GLayer block_swap_layer(const std::vector<int> &a, const std::vector<int> &b) {
        GLayer l;
        l.idle_mult = 12.0;
        for (size_t i = 0; i < a.size(); i++) {
            l.ops.push_back({GOpKind::Swap, a[i], b[i], -1});
        }
        return l;
    }

    Layers ec_round(int lvl, const std::vector<int> &ids, int block, int round, int inst) {
        Layers out;
        if (lvl == 0) {
            return out;
        }
        long m = gauge_detail::pow6(lvl - 1);
        auto seg = [&](int k) {
            return std::vector<int>(ids.begin() + k * m, ids.begin() + (k + 1) * m);
        };
        std::vector<int> D1 = seg(0), A1 = seg(1), D2 = seg(2), D3 = seg(3), A2 = seg(4),
                         D4 = seg(5);
        if (lvl >= 2) {
            Layers sub = ec_round(lvl - 1, D1, block, round, inst * 4 + 0);
            sub = zip(std::move(sub), ec_round(lvl - 1, D2, block, round, inst * 4 + 1));
            sub = zip(std::move(sub), ec_round(lvl - 1, D3, block, round, inst * 4 + 2));
            sub = zip(std::move(sub), ec_round(lvl - 1, D4, block, round, inst * 4 + 3));
            for (auto &l : sub) {
                out.push_back(std::move(l));
            }
        }
        // X gauges on (D1,D2) and (D3,D4) via A1 and A2; a block SWAP then
        // re-pairs the data blocks so the same pattern measures the Z
        // gauges on (D1,D3) and (D2,D4).
        {
            Layers gx = zip(gauge_measure(lvl, A1, D1, D2, 'X', block, round, inst, 0),
                            gauge_measure(lvl, A2, D3, D4, 'X', block, round, inst, 1));
            for (auto &l : gx) {
                out.push_back(std::move(l));
            }
        }
        out.push_back(block_swap_layer(D2, D3));
        {
            // After the swap, D2's slots hold D3's qubits: the pairings
            // below measure (D1,D3) and (D2,D4) of the original blocks.
            Layers gz = zip(gauge_measure(lvl, A1, D1, D2, 'Z', block, round, inst, 0),
                            gauge_measure(lvl, A2, D3, D4, 'Z', block, round, inst, 1));
            for (auto &l : gz) {
                out.push_back(std::move(l));
            }
        }
        out.push_back(block_swap_layer(D2, D3));
        return out;
    }
};

// Batched Pauli-frame simulator (64 trials per machine word) with the
// hierarchical hard-decision decoder: level-1 blocks only flag, levels >= 2
// correct using the syndrome plus lower-level flags, and trial failure is
// judged by an ideal decode of the post-correction residual against the
// ideal CNOT action.
class GaugeSimulator {
   public:
    GaugeSimulator(const GaugeCircuit &c, const LogicalRates &rates) : c_(&c), rates_(rates) {}

    struct Result {
        long trials = 0;
        long failures = 0;
        double p() const {
            return trials ? static_cast<double>(failures) / trials : 0.0;
        }
        double stderr_() const {
            if (!trials) {
                return 0.0;
            }
            double q = p();
            return std::sqrt(std::max(q * (1 - q), 1e-300) / trials);
        }
    };

    Result run(long trials, uint64_t seed) {
        Result res;
        res.trials = trials;
        long batches = (trials + 63) / 64;
        for (long b = 0; b < batches; b++) {
            int width = static_cast<int>(std::min<long>(64, trials - b * 64));
            res.failures += run_batch(seed, b, width);
        }
        return res;
    }

    // Deterministic single trial with injected single-qubit Paulis before
    // given layers (structure tests).
    struct Injection {
        size_t before_layer;
        int qubit;
        char pauli;  // 'X', 'Y', 'Z'
    };
    bool run_injected(const std::vector<Injection> &faults) {
        int n = c_->n_qubits;
        std::vector<uint64_t> x(n, 0), z(n, 0);
        meas_.assign(c_->n_meas, 0);
        for (size_t li = 0; li < c_->layers.size(); li++) {
            for (const auto &f : faults) {
                if (f.before_layer == li) {
                    if (f.pauli == 'X' || f.pauli == 'Y') {
                        x[f.qubit] ^= 1;
                    }
                    if (f.pauli == 'Z' || f.pauli == 'Y') {
                        z[f.qubit] ^= 1;
                    }
                }
            }
            apply_layer(c_->layers[li], x, z);
        }
        return decode_trial(0, x, z);
    }

    // True iff any gauge outcome of trial 0 deviates from the ideal run
    // (detection signal of the last run_injected call).
    bool last_any_detection() const {
        for (const auto &gm : c_->gauges) {
            auto rv = gauge_value(gm, 0);
            if (rv.value || rv.flag) {
                return true;
            }
        }
        return false;
    }

   private:
    using GOpKind = gauge_detail::GOpKind;

    void apply_layer(const gauge_detail::GLayer &layer, std::vector<uint64_t> &x,
                     std::vector<uint64_t> &z) {
        for (const auto &op : layer.ops) {
            switch (op.kind) {
                case GOpKind::InitX:
                case GOpKind::InitZ:
                    x[op.a] = z[op.a] = 0;
                    break;
                case GOpKind::MeasX:
                    meas_[op.meas] = z[op.a];
                    break;
                case GOpKind::MeasZ:
                    meas_[op.meas] = x[op.a];
                    break;
                case GOpKind::Cnot:
                    x[op.b] ^= x[op.a];
                    z[op.a] ^= z[op.b];
                    break;
                case GOpKind::Swap:
                    std::swap(x[op.a], x[op.b]);
                    std::swap(z[op.a], z[op.b]);
                    break;
            }
        }
    }

    long run_batch(uint64_t seed, long batch, int width) {
        auto rng = trial_rng(seed, static_cast<uint64_t>(batch));
        int n = c_->n_qubits;
        std::vector<uint64_t> x(n, 0), z(n, 0);
        meas_.assign(c_->n_meas, 0);

        for (const auto &layer : c_->layers) {
            std::vector<uint8_t> busy(n, 0);
            for (const auto &op : layer.ops) {
                switch (op.kind) {
                    case GOpKind::InitX:
                        x[op.a] = z[op.a] = 0;
                        z[op.a] ^= mask(rng, rates_.p_im);
                        busy[op.a] = 1;
                        break;
                    case GOpKind::InitZ:
                        x[op.a] = z[op.a] = 0;
                        x[op.a] ^= mask(rng, rates_.p_im);
                        busy[op.a] = 1;
                        break;
                    case GOpKind::MeasX:
                        meas_[op.meas] = z[op.a] ^ mask(rng, rates_.p_im);
                        busy[op.a] = 1;
                        break;
                    case GOpKind::MeasZ:
                        meas_[op.meas] = x[op.a] ^ mask(rng, rates_.p_im);
                        busy[op.a] = 1;
                        break;
                    case GOpKind::Cnot:
                        x[op.b] ^= x[op.a];
                        z[op.a] ^= z[op.b];
                        two_qubit_noise(rng, rates_.p_cnot, x[op.a], z[op.a], x[op.b], z[op.b]);
                        busy[op.a] = busy[op.b] = 1;
                        break;
                    case GOpKind::Swap:
                        std::swap(x[op.a], x[op.b]);
                        std::swap(z[op.a], z[op.b]);
                        two_qubit_noise(rng, rates_.p_swap, x[op.a], z[op.a], x[op.b], z[op.b]);
                        busy[op.a] = busy[op.b] = 1;
                        break;
                }
            }
            double p_idle = rates_.p0 * layer.idle_mult;
            if (p_idle > 0) {
                idle_scratch_.clear();
                for (int q = 0; q < n; q++) {
                    if (!busy[q]) {
                        idle_scratch_.push_back(q);
                    }
                }
                size_t L = idle_scratch_.size() * 64;
                sample_bernoulli_hits(rng, L, p_idle, [&](size_t i) {
                    int q = idle_scratch_[i >> 6];
                    uint64_t bit = uint64_t{1} << (i & 63);
                    switch (rng() % 3) {
                        case 0:
                            x[q] ^= bit;
                            break;
                        case 1:
                            x[q] ^= bit;
                            z[q] ^= bit;
                            break;
                        default:
                            z[q] ^= bit;
                    }
                });
            }
        }

        long failures = 0;
        for (int t = 0; t < width; t++) {
            if (decode_trial(t, x, z)) {
                failures++;
            }
        }
        return failures;
    }

    uint64_t mask(std::mt19937_64 &rng, double p) {
        uint64_t m = 0;
        sample_bernoulli_hits(rng, 64, p, [&](size_t i) {
            m |= uint64_t{1} << i;
        });
        return m;
    }

    void two_qubit_noise(std::mt19937_64 &rng, double p, uint64_t &xa, uint64_t &za,
                         uint64_t &xb, uint64_t &zb) {
        if (p <= 0) {
            return;
        }
        sample_bernoulli_hits(rng, 64, p, [&](size_t i) {
            uint64_t bit = uint64_t{1} << i;
            uint64_t v = rng() % 15 + 1;
            uint64_t pa = v / 4, pb = v % 4;
            if (pa == 1 || pa == 2) {
                xa ^= bit;
            }
            if (pa == 2 || pa == 3) {
                za ^= bit;
            }
            if (pb == 1 || pb == 2) {
                xb ^= bit;
            }
            if (pb == 2 || pb == 3) {
                zb ^= bit;
            }
        });
    }

    struct Readout {
        int value;
        bool flag;
    };
    // Recursive hard decode of a transversal ancilla-block readout. Sub-
    // readouts are per-sub-block logical values; a fired stabiliser parity
    // flips the flagged (else the first) sub-value, and the operator value
    // is read off its support: X = subs {0,2}, Z = subs {0,1}. Internal
    // ancilla positions of the block carry no information.
    Readout decode_readout(int lvl, const std::vector<int> &bits, int t, int base,
                           char type) const {
        if (lvl == 0) {
            int b = static_cast<int>((meas_[bits[base]] >> t) & 1);
            return {b, false};
        }
        long m = gauge_detail::pow6(lvl - 1);
        static const int data_off[4] = {0, 2, 3, 5};
        Readout r[4];
        for (int i = 0; i < 4; i++) {
            r[i] = decode_readout(lvl - 1, bits, t, base + static_cast<int>(data_off[i] * m),
                                  type);
        }
        int v[4] = {r[0].value, r[1].value, r[2].value, r[3].value};
        int s = v[0] ^ v[1] ^ v[2] ^ v[3];
        if (s) {
            int pick = 0;
            for (int i = 0; i < 4; i++) {
                if (r[i].flag) {
                    pick = i;
                    break;
                }
            }
            v[pick] ^= 1;
        }
        int value = (type == 'X') ? (v[0] ^ v[2]) : (v[0] ^ v[1]);
        bool flag = s || r[0].flag || r[1].flag || r[2].flag || r[3].flag;
        return {value, flag};
    }

    Readout gauge_value(const GaugeCircuit::GaugeMeas &gm, int t) const {
        return decode_readout(gm.lvl - 1, gm.bits, t, 0, gm.type);
    }

    bool decode_trial(int t, const std::vector<uint64_t> &x, const std::vector<uint64_t> &z) {
        int n_lvl = c_->level;
        std::map<std::tuple<int, int, int, int, char>, std::array<std::pair<int, bool>, 2>>
            gvals;
        for (const auto &gm : c_->gauges) {
            auto rv = gauge_value(gm, t);
            gvals[{gm.block, gm.round, gm.lvl, gm.inst, gm.type}][gm.idx] = {rv.value, rv.flag};
        }
        std::vector<uint64_t> cx((c_->n_qubits + 63) / 64, 0), cz((c_->n_qubits + 63) / 64, 0);
        auto flip_support = [&](const std::vector<int> &support, bool x_type) {
            auto &m = x_type ? cx : cz;
            for (int q : support) {
                m[q >> 6] ^= uint64_t{1} << (q & 63);
            }
        };
        auto stab_flip = [&](int block, int round, int lvl, int inst, char type) -> int {
            auto it = gvals.find({block, round, lvl, inst, type});
            if (it == gvals.end()) {
                return 0;
            }
            return it->second[0].first ^ it->second[1].first;
        };
        // Detection events: outcome changes between consecutive extraction
        // rounds (round 0 against the ideal input).
        auto stab_event = [&](int block, int round, int lvl, int inst, char type) -> int {
            int s = stab_flip(block, round, lvl, inst, type);
            if (round > 0) {
                s ^= stab_flip(block, round - 1, lvl, inst, type);
            }
            return s;
        };
        std::function<bool(int, int, int, int)> flagged = [&](int block, int round, int lvl,
                                                              int inst) -> bool {
            if (lvl < 1) {
                return false;
            }
            for (char ty : {'X', 'Z'}) {
                if (stab_event(block, round, lvl, inst, ty)) {
                    return true;
                }
            }
            for (int d = 0; d < 4; d++) {
                if (flagged(block, round, lvl - 1, inst * 4 + d)) {
                    return true;
                }
            }
            return false;
        };
        int total_rounds = c_->total_rounds();
        int pre_rounds = c_->ec_reps();
        for (int block = 0; block < 2; block++) {
            for (int round = 0; round < total_rounds; round++) {
                for (int lvl = 2; lvl <= n_lvl; lvl++) {
                    int n_inst = 1;
                    for (int i = 0; i < n_lvl - lvl; i++) {
                        n_inst *= 4;
                    }
                    for (int inst = 0; inst < n_inst; inst++) {
                        for (char ty : {'X', 'Z'}) {
                            if (!stab_event(block, round, lvl, inst, ty)) {
                                continue;
                            }
                            // Correct only when a lower-level flag locates
                            // the faulty sub-block; an unflagged syndrome is
                            // more often a readout artifact, and a blind
                            // correction would inject a half-distance error.
                            int pick = -1;
                            for (int d = 0; d < 4; d++) {
                                if (flagged(block, round, lvl - 1, inst * 4 + d)) {
                                    pick = d;
                                    break;
                                }
                            }
                            if (pick < 0) {
                                continue;
                            }
                            const auto &sb = c_->get_subblock(block, lvl - 1, inst * 4 + pick);
                            // An X-type stabiliser catches phase errors:
                            // correct with a logical Z, and vice versa.
                            bool x_corr = (ty == 'Z');
                            flip_support(x_corr ? sb.x_support : sb.z_support, x_corr);
                            // Corrections deduced before the transversal
                            // CNOT propagate through it.
                            if (round < pre_rounds) {
                                const auto &other =
                                    c_->get_subblock(1 - block, lvl - 1, inst * 4 + pick);
                                if (x_corr && block == 0) {
                                    flip_support(other.x_support, true);
                                } else if (!x_corr && block == 1) {
                                    flip_support(other.z_support, false);
                                }
                            }
                        }
                    }
                }
            }
        }
        auto bit = [&](const std::vector<uint64_t> &words, int id) -> int {
            return static_cast<int>((words[id] >> t) & 1);
        };
        auto corr_bit = [&](const std::vector<uint64_t> &m, int id) -> int {
            return static_cast<int>((m[id >> 6] >> (id & 63)) & 1);
        };
        // Ideal decode of the post-correction residual: per level, the
        // fired stabiliser parity flips the flagged (else first) sub-class;
        // the logical class is the overlap with the dual logical support
        // (x errors against Z = subs {0,1}, z errors against X = {0,2}).
        std::function<std::pair<int, int>(int, int, int, bool)> ideal =
            [&](int block, int lvl, int inst, bool x_type) -> std::pair<int, int> {
            if (lvl == 0) {
                const auto &sb = c_->get_subblock(block, 0, inst);
                int id = sb.data_tree[0];
                int v = x_type ? (bit(x, id) ^ corr_bit(cx, id))
                               : (bit(z, id) ^ corr_bit(cz, id));
                return {v, 0};
            }
            int a[4], f[4];
            for (int d = 0; d < 4; d++) {
                auto [ad, fd] = ideal(block, lvl - 1, inst * 4 + d, x_type);
                a[d] = ad;
                f[d] = fd;
            }
            int s = a[0] ^ a[1] ^ a[2] ^ a[3];
            if (s) {
                int pick = 0;
                for (int d = 0; d < 4; d++) {
                    if (f[d]) {
                        pick = d;
                        break;
                    }
                }
                a[pick] ^= 1;
            }
            int cls = x_type ? (a[0] ^ a[1]) : (a[0] ^ a[2]);
            int fired = s | f[0] | f[1] | f[2] | f[3];
            return {cls, fired};
        };
        for (int block = 0; block < 2; block++) {
            if (ideal(block, n_lvl, 0, true).first || ideal(block, n_lvl, 0, false).first) {
                return true;
            }
        }
        return false;
    }

    const GaugeCircuit *c_;
    LogicalRates rates_;
    std::vector<uint64_t> meas_;
    std::vector<int> idle_scratch_;
};

}  // namespace qsegsim
