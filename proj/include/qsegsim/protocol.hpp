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

#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "qsegsim/deformation.hpp"

namespace qsegsim {

// Logical gates are performed by initialising and measuring patch regions
// to extend, merge and shrink code patches. Rough boundaries move by half
// an edge using the spare qubits of short columns; smooth tops come from
// dropping the top row of long columns; merging two adjacent patches skips
// one junction column so the merged checkerboard stays consistent, and the
// skipped column is restored by teleportation where the protocol needs it
// back.
struct Protocol {
    std::string kind;
    int d = 0, h = 0;
    std::vector<DeformationStep> steps;
    std::map<std::string, PauliOperator> inputs;
    std::map<std::string, PauliOperator> claimed;
    std::vector<uint32_t> transversal_h;  // applied after the last step
    StabilizerGroup initial_group;
};

enum class Mutation {
    None,
    OmitBottomChange,   // second step keeps rough bottoms
    WrongInitBasis,     // |+> where |0> is required
    SkipAncillaInit,    // a required region never joins the lattice
    PinholeBottom,      // one spare qubit missing from a boundary extension
    SkipStabiliser,     // one bulk stabiliser never measured in a step
};

namespace detail {

struct RegionSpec {
    int patch = 0;
    int local_begin = 0, local_end = 0;  // inclusive
    bool top_shrink = false;
    bool bottom_spares = false;
    uint32_t omit_spare = kNoQubit;
};

inline std::vector<ActiveColumn> region_columns(const ChainLayout &lay,
                                                const std::vector<RegionSpec> &regions) {
    std::vector<ActiveColumn> cols;
    int ext = lay.logical_extent();
    for (const auto &r : regions) {
        for (int j = r.local_begin; j <= r.local_end; j++) {
            const auto &c = lay.columns[r.patch * ext + j];
            ActiveColumn a;
            a.col = c.col;
            a.smooth_top = r.top_shrink;
            for (size_t i = 0; i < c.rows.size(); i++) {
                if (r.top_shrink && c.is_long && c.rows[i] == 0) {
                    continue;
                }
                a.ys.push_back(c.rows[i]);
            }
            if (r.bottom_spares && !c.is_long && c.spare_qubit != r.omit_spare) {
                a.ys.push_back(2 * lay.code_distance - 1);
            }
            cols.push_back(std::move(a));
        }
    }
    return cols;
}

inline std::vector<uint32_t> region_qubits(const ChainLayout &lay,
                                           const std::vector<RegionSpec> &regions,
                                           bool spares_only = false) {
    std::vector<uint32_t> out;
    for (const auto &a : region_columns(lay, regions)) {
        for (int y : a.ys) {
            uint32_t q = lay.data_qubit(a.col, y);
            bool is_spare = (y == 2 * lay.code_distance - 1);
            if (spares_only == is_spare) {
                out.push_back(q);
            }
        }
    }
    return out;
}

inline void init_all(DeformationStep &step, const std::vector<uint32_t> &qubits, Basis b) {
    for (uint32_t q : qubits) {
        step.initialized.push_back({q, b});
    }
}

inline void measure_all(DeformationStep &step, const std::vector<uint32_t> &qubits, Basis b) {
    for (uint32_t q : qubits) {
        step.measured.push_back({q, b});
    }
}

inline int count_panels(const ChainLayout &lay, const LatticeConfig &cfg) {
    std::set<int> patches;
    for (const auto &c : cfg.cols) {
        patches.insert(c.col / lay.logical_extent());
    }
    return static_cast<int>(patches.size());
}

inline StabilizerGroup patch_group(const ChainLayout &lay, std::initializer_list<int> patches) {
    StabilizerGroup g;
    int ext = lay.logical_extent();
    for (int p : patches) {
        auto cfg = build_lattice_config(
            lay, region_columns(lay, {RegionSpec{p, 0, ext - 1}}), false);
        for (const auto &s : cfg.stabilisers) {
            g.generators.push_back(s.as_pauli(lay.num_qubits));
        }
    }
    return g;
}

// Teleport one qubit through the shared shuttle: Bell pair on (shuttle,
// dst), then a Bell measurement on (src, shuttle).
inline DeformationStep teleport_step(const ChainLayout &lay, uint32_t src, uint32_t dst,
                                     uint32_t shuttle) {
    DeformationStep st;
    st.name = "teleport";
    st.initialized = {{shuttle, Basis::X}, {dst, Basis::Z}};
    st.unitaries = {CliffordGate::cnot(shuttle, dst), CliffordGate::cnot(src, shuttle)};
    st.measured = {{src, Basis::X}, {shuttle, Basis::Z}};
    st.rounds = 0;
    return st;
}

}  // namespace detail

// Four-step fault-tolerant CNOT between patches Control (0) and Target (4)
// with ancillary patches A1 (1), A2 (2), A3 (3).
inline Protocol make_cnot_protocol(const ChainLayout &lay, int h,
                                   Mutation mutation = Mutation::None) {
    using detail::RegionSpec;
    if (lay.n_logical < 5) {
        throw std::invalid_argument("CNOT protocol needs 5 logical patches");
    }
    int d = lay.code_distance, ext = lay.logical_extent();
    Protocol proto;
    proto.kind = "cnot";
    proto.d = d;
    proto.h = h;
    proto.inputs["Xc"] = lay.logical_x(0);
    proto.inputs["Zc"] = lay.logical_z(0);
    proto.inputs["Xt"] = lay.logical_x(4);
    proto.inputs["Zt"] = lay.logical_z(4);
    proto.claimed["Xc"] = multiply(lay.logical_x(0), lay.logical_x(4));
    proto.claimed["Zc"] = lay.logical_z(0);
    proto.claimed["Xt"] = lay.logical_x(4);
    proto.claimed["Zt"] = multiply(lay.logical_z(0), lay.logical_z(4));
    proto.initial_group = detail::patch_group(lay, {0, 4});

    RegionSpec ctrl{0, 0, ext - 1};
    // The ancilla strips leave out their junction-side columns so the
    // merged checkerboard stays consistent across patch boundaries; A3's
    // left edge is rough (short-column edge), which the |0> merge of A2
    // requires.
    RegionSpec a1{1, 1, ext - 2};
    RegionSpec a2{2, 0, ext - 1};
    RegionSpec a3{3, 1, ext - 2, /*top_shrink=*/true};
    RegionSpec tgt{4, 0, ext - 1};
    bool bottoms = (mutation != Mutation::OmitBottomChange);
    RegionSpec a2b = a2, a3b = a3, tgtb = tgt;
    a2b.bottom_spares = a3b.bottom_spares = tgtb.bottom_spares = bottoms;
    if (mutation == Mutation::PinholeBottom && bottoms) {
        a3b.omit_spare = lay.columns[3 * ext + 1].spare_qubit;
    }

    // Step 1: A3 joins in |+>; the target grows leftward.
    DeformationStep s1;
    s1.name = "grow-A3";
    detail::init_all(s1, detail::region_qubits(lay, {a3}), Basis::X);
    s1.lattice = merge_configs(
        lay,
        {build_lattice_config(lay, detail::region_columns(lay, {ctrl})),
         build_lattice_config(lay, detail::region_columns(lay, {a3, tgt}))},
        "cnot-step1");
    if (mutation == Mutation::SkipStabiliser) {
        // Drop one bulk plaquette of the target patch.
        int want_col = 4 * ext + 1;
        auto &st = s1.lattice.stabilisers;
        for (size_t i = 0; i < st.size(); i++) {
            if (st[i].type == 'Z' && st[i].center_col == want_col && st[i].data.size() == 4) {
                st.erase(st.begin() + i);
                break;
            }
        }
        for (uint32_t i = 0; i < st.size(); i++) {
            st[i].id = i;
        }
    }
    s1.rounds = h;
    s1.panels = detail::count_panels(lay, s1.lattice);
    proto.steps.push_back(std::move(s1));

    // Step 2: A2 joins in |0>; bottoms of A2, A3 and Target turn smooth via
    // the short-column spare qubits.
    DeformationStep s2;
    s2.name = "grow-A2";
    detail::init_all(s2, detail::region_qubits(lay, {a2}),
                     mutation == Mutation::WrongInitBasis ? Basis::X : Basis::Z);
    if (bottoms) {
        detail::init_all(s2, detail::region_qubits(lay, {a2b, a3b, tgtb}, true), Basis::X);
    }
    s2.lattice = merge_configs(
        lay,
        {build_lattice_config(lay, detail::region_columns(lay, {ctrl})),
         build_lattice_config(lay, detail::region_columns(lay, {a2b, a3b, tgtb}))},
        "cnot-step2");
    s2.rounds = h;
    s2.panels = detail::count_panels(lay, s2.lattice);
    proto.steps.push_back(std::move(s2));

    // Step 3: A1 joins in |+>; bottoms revert to rough.
    DeformationStep s3;
    s3.name = "grow-A1";
    if (mutation != Mutation::SkipAncillaInit) {
        detail::init_all(s3, detail::region_qubits(lay, {a1}), Basis::X);
    }
    if (bottoms) {
        detail::measure_all(s3, detail::region_qubits(lay, {a2b, a3b, tgtb}, true), Basis::X);
    }
    {
        std::vector<RegionSpec> all = {ctrl, a1, a2, a3, tgt};
        if (mutation == Mutation::SkipAncillaInit) {
            all = {ctrl, a2, a3, tgt};
            s3.lattice = merge_configs(
                lay,
                {build_lattice_config(lay, detail::region_columns(lay, {ctrl})),
                 build_lattice_config(lay, detail::region_columns(lay, {a2, a3, tgt}))},
                "cnot-step3");
        } else {
            s3.lattice =
                build_lattice_config(lay, detail::region_columns(lay, all), false, "cnot-step3");
        }
    }
    s3.rounds = h;
    s3.panels = detail::count_panels(lay, s3.lattice);
    proto.steps.push_back(std::move(s3));

    // Step 4: ancilla regions are measured in +/-.
    DeformationStep s4;
    s4.name = "split";
    detail::measure_all(s4, detail::region_qubits(lay, {a1, a2, a3}), Basis::X);
    s4.lattice = merge_configs(lay,
                               {build_lattice_config(lay, detail::region_columns(lay, {ctrl})),
                                build_lattice_config(lay, detail::region_columns(lay, {tgt}))},
                               "cnot-step4");
    s4.rounds = h;
    s4.panels = detail::count_panels(lay, s4.lattice);
    proto.steps.push_back(std::move(s4));
    return proto;
}

// State transfer from patch src to the adjacent patch dst by extending the
// lattice across the junction (the dst column next to the junction is
// skipped and restored by teleportation in the final round).
inline Protocol make_state_transfer(const ChainLayout &lay, int src, int dst, int h) {
    using detail::RegionSpec;
    if (std::abs(src - dst) != 1 || src >= lay.n_logical || dst >= lay.n_logical) {
        throw std::invalid_argument("state transfer needs adjacent patches");
    }
    int d = lay.code_distance, ext = lay.logical_extent();
    Protocol proto;
    proto.kind = "state_transfer";
    proto.d = d;
    proto.h = h;
    proto.inputs["X"] = lay.logical_x(src);
    proto.inputs["Z"] = lay.logical_z(src);
    proto.claimed["X"] = lay.logical_x(dst);
    proto.claimed["Z"] = lay.logical_z(dst);
    proto.initial_group = detail::patch_group(lay, {src});

    bool rightward = dst > src;
    // The dst column adjacent to the junction is skipped while the lattice
    // is extended.
    int skip_local = rightward ? 0 : ext - 1;
    RegionSpec dst_partial{dst, rightward ? 1 : 0, rightward ? ext - 1 : ext - 2};
    (void)skip_local;
    RegionSpec src_full{src, 0, ext - 1};
    RegionSpec dst_full{dst, 0, ext - 1};

    // Step i/ii: dst (minus the junction column) is initialised in |+> and
    // the merged lattice is measured for h-1 rounds.
    DeformationStep s1;
    s1.name = "extend";
    detail::init_all(s1, detail::region_qubits(lay, {dst_partial}), Basis::X);
    {
        std::vector<RegionSpec> seq =
            rightward ? std::vector<RegionSpec>{src_full, dst_partial}
                      : std::vector<RegionSpec>{dst_partial, src_full};
        s1.lattice = build_lattice_config(lay, detail::region_columns(lay, seq), false,
                                          "transfer-extend");
    }
    s1.rounds = std::max(1, h - 1);
    s1.panels = detail::count_panels(lay, s1.lattice);
    proto.steps.push_back(std::move(s1));

    // Step iii: the h-th round teleports the junction-adjacent src column
    // onto the skipped dst column.
    int src_junction_local = rightward ? ext - 1 : 0;
    int dst_junction_local = rightward ? 0 : ext - 1;
    int src_col = src * ext + src_junction_local;
    int dst_col = dst * ext + dst_junction_local;
    const auto &src_cs = lay.columns[src_col];
    for (size_t i = 0; i < src_cs.rows.size(); i++) {
        int y = src_cs.rows[i];
        uint32_t sq = lay.data_qubit(src_col, y);
        uint32_t dq = lay.data_qubit(dst_col, y);
        uint32_t sh = lay.shuttle(std::max(src_col, dst_col));
        proto.steps.push_back(detail::teleport_step(lay, sq, dq, sh));
    }
    DeformationStep s2;
    s2.name = "teleport-round";
    RegionSpec src_partial{src, rightward ? 0 : 1, rightward ? ext - 2 : ext - 1};
    {
        std::vector<RegionSpec> seq =
            rightward ? std::vector<RegionSpec>{src_partial, dst_full}
                      : std::vector<RegionSpec>{dst_full, src_partial};
        s2.lattice = build_lattice_config(lay, detail::region_columns(lay, seq), false,
                                          "transfer-teleport-round");
    }
    s2.rounds = 1;
    s2.panels = detail::count_panels(lay, s2.lattice);
    proto.steps.push_back(std::move(s2));

    // Step iv: the rest of the source patch is measured in +/-.
    DeformationStep s3;
    s3.name = "shrink";
    detail::measure_all(s3, detail::region_qubits(lay, {src_partial}), Basis::X);
    s3.lattice = build_lattice_config(lay, detail::region_columns(lay, {dst_full}), false,
                                      "transfer-final");
    s3.rounds = h;
    s3.panels = detail::count_panels(lay, s3.lattice);
    proto.steps.push_back(std::move(s3));
    return proto;
}

// Hadamard: a rotating state transfer from patch 0 to patch 1 (smooth top
// via the long-column shrink, smooth bottoms via spares, rough right via a
// |0> extension), leaving patch 1 in the type-swapped orientation, then a
// transversal Hadamard on every data qubit of patch 1.
inline Protocol make_hadamard_protocol(const ChainLayout &lay, int h,
                                       Mutation mutation = Mutation::None) {
    using detail::RegionSpec;
    if (lay.n_logical < 2) {
        throw std::invalid_argument("hadamard needs 2 logical patches");
    }
    int d = lay.code_distance, ext = lay.logical_extent();
    Protocol proto;
    proto.kind = "hadamard";
    proto.d = d;
    proto.h = h;
    proto.inputs["X"] = lay.logical_x(0);
    proto.inputs["Z"] = lay.logical_z(0);
    // After the transversal Hadamard the patch is standard and the logical
    // state is Hadamard-transformed: X -> Z, Z -> X.
    proto.claimed["X"] = lay.logical_z(1);
    proto.claimed["Z"] = lay.logical_x(1);
    proto.initial_group = detail::patch_group(lay, {0});

    RegionSpec p0{0, 0, ext - 1};
    RegionSpec strip{1, 1, ext - 2, /*top_shrink=*/true};
    RegionSpec p0b = p0, stripb = strip;
    p0b.bottom_spares = stripb.bottom_spares = (mutation != Mutation::OmitBottomChange);

    DeformationStep s1;
    s1.name = "grow-rotated";
    detail::init_all(s1, detail::region_qubits(lay, {strip}), Basis::X);
    s1.lattice =
        build_lattice_config(lay, detail::region_columns(lay, {p0, strip}), false, "had-step1");
    s1.rounds = h;
    s1.panels = detail::count_panels(lay, s1.lattice);
    proto.steps.push_back(std::move(s1));

    DeformationStep s2;
    s2.name = "bottom-smooth";
    if (p0b.bottom_spares) {
        detail::init_all(s2, detail::region_qubits(lay, {p0b, stripb}, true), Basis::X);
    }
    s2.lattice = build_lattice_config(lay, detail::region_columns(lay, {p0b, stripb}), false,
                                      "had-step2");
    s2.rounds = h;
    s2.panels = detail::count_panels(lay, s2.lattice);
    proto.steps.push_back(std::move(s2));

    // Teleport the junction column, then project onto the type-swapped
    // lattice of the full patch 1 (the right column rejoins in |0>).
    int src_col = ext - 1;  // patch 0 rightmost
    int dst_col = ext;      // patch 1 leftmost
    const auto &src_cs = lay.columns[src_col];
    for (size_t i = 0; i < src_cs.rows.size(); i++) {
        int y = src_cs.rows[i];
        proto.steps.push_back(detail::teleport_step(lay, lay.data_qubit(src_col, y),
                                                    lay.data_qubit(dst_col, y),
                                                    lay.shuttle(dst_col)));
    }
    DeformationStep s3;
    s3.name = "swap-orientation";
    {
        // The right column rejoins in |0> (rough-boundary growth); the
        // top-row qubits dropped by the shrink rejoin in |+>.
        const auto &right = lay.columns[2 * ext - 1];
        for (size_t i = 0; i < right.rows.size(); i++) {
            s3.initialized.push_back({right.data_qubits[i], Basis::Z});
        }
        for (int j = 2; j <= ext - 2; j += 2) {
            s3.initialized.push_back({lay.data_qubit(ext + j, 0), Basis::X});
        }
        // The source patch is measured transversally in +/-; the logical Z
        // has already moved across through the teleported column.
        RegionSpec p0_rest{0, 0, ext - 2};
        detail::measure_all(s3, detail::region_qubits(lay, {p0_rest}), Basis::X);
        if (p0b.bottom_spares) {
            detail::measure_all(s3, detail::region_qubits(lay, {p0b, stripb}, true), Basis::X);
        }
        RegionSpec p1{1, 0, ext - 1};
        s3.lattice = build_lattice_config(lay, detail::region_columns(lay, {p1}),
                                          /*type_swapped=*/true, "had-final");
    }
    s3.rounds = h;
    s3.panels = detail::count_panels(lay, s3.lattice);
    proto.steps.push_back(std::move(s3));

    for (uint32_t q : lay.patch_data_qubits(1)) {
        proto.transversal_h.push_back(q);
    }
    return proto;
}

struct ProtocolReport {
    std::string kind;
    int d = 0, h = 0;
    bool verified = false;
    std::string failure;
    std::map<std::string, bool> map_ok;
    std::map<std::string, std::string> final_map;  // input logical -> claimed target
    std::vector<std::pair<std::string, int>> step_distances;
    int min_distance = std::numeric_limits<int>::max();
    int total_blocks = 0;
};

// Runs the protocol symbolically and checks the claimed logical map modulo
// the final stabiliser group, plus the spatial distance of every
// inter-step lattice.
inline ProtocolReport verify_protocol(const ChainLayout &lay, const Protocol &proto,
                                      std::map<std::string, std::string> map_labels = {}) {
    ProtocolReport rep;
    rep.kind = proto.kind;
    rep.d = proto.d;
    rep.h = proto.h;
    DeformationEngine eng(lay.num_qubits);
    for (const auto &g : proto.initial_group.generators) {
        eng.add_generator(g);
    }
    for (const auto &[name, op] : proto.inputs) {
        eng.set_logical(name, op);
    }
    try {
        for (const auto &step : proto.steps) {
            eng.apply_step(step);
            if (step.rounds > 0) {
                auto audit = audit_distance(lay, step.lattice, &eng.group());
                int dist = audit.distance();
                rep.step_distances.push_back({step.name, dist});
                rep.min_distance = std::min(rep.min_distance, dist < 0 ? rep.min_distance : dist);
                rep.total_blocks += step.panels;
            }
        }
        for (uint32_t q : proto.transversal_h) {
            eng.apply_gate(CliffordGate::h(q));
        }
        bool all_ok = true;
        for (const auto &[name, target] : proto.claimed) {
            bool ok = eng.equivalent(eng.logical(name), target);
            rep.map_ok[name] = ok;
            all_ok = all_ok && ok;
            auto it = map_labels.find(name);
            rep.final_map[name] = it == map_labels.end() ? "" : it->second;
        }
        if (!all_ok) {
            rep.failure = "logical map mismatch";
        }
        rep.verified = all_ok && rep.min_distance >= proto.d;
        if (all_ok && rep.min_distance < proto.d) {
            rep.failure = "distance below code distance";
        }
    } catch (const ProtocolBugError &e) {
        rep.verified = false;
        rep.failure = e.what();
    }
    return rep;
}

inline ProtocolReport verify_cnot(const ChainLayout &lay, int h,
                                  Mutation mutation = Mutation::None) {
    return verify_protocol(lay, make_cnot_protocol(lay, h, mutation),
                           {{"Xc", "Xc*Xt"}, {"Zc", "Zc"}, {"Xt", "Xt"}, {"Zt", "Zc*Zt"}});
}

inline ProtocolReport verify_state_transfer(const ChainLayout &lay, int h) {
    return verify_protocol(lay, make_state_transfer(lay, 1, 0, h),
                           {{"X", "X@1"}, {"Z", "Z@1"}});
}

inline ProtocolReport verify_hadamard(const ChainLayout &lay, int h,
                                      Mutation mutation = Mutation::None) {
    return verify_protocol(lay, make_hadamard_protocol(lay, h, mutation),
                           {{"X", "Z@2"}, {"Z", "X@2"}});
}

// Lattice configurations plus their measurement-round schedules, as needed
// to run or inspect a protocol at the circuit level.
struct ProtocolStep {
    DeformationStep step;
    RoundSchedule schedule;
};

inline std::vector<ProtocolStep> schedule_protocol(const ChainLayout &lay,
                                                   const Protocol &proto) {
    std::vector<ProtocolStep> out;
    for (const auto &step : proto.steps) {
        ProtocolStep ps;
        ps.step = step;
        if (step.rounds > 0) {
            ps.schedule = schedule_for_config(lay, step.lattice);
        }
        out.push_back(std::move(ps));
    }
    return out;
}

}  // namespace qsegsim
