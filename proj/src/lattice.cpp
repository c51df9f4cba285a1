// Copyright 2025 The swaplru Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "lattice.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace slru {

std::array<int, 2> ToricLayout::data_coord(int e) const {
    int i = row(e), j = col(e);
    if (e < d * d) return {2 * i, 2 * j + 1};
    return {2 * i + 1, 2 * j};
}

std::array<int, 2> ToricLayout::stab_coord(int s) const {
    int i = row(s), j = col(s);
    if (kind(s) == StabKind::X) return {2 * i, 2 * j};
    return {2 * i + 1, 2 * j + 1};
}

ToricLayout build_layout(int d) {
    if (d < 3 || d % 2 == 0) {
        throw std::invalid_argument("distance must be odd and at least 3");
    }
    ToricLayout L;
    L.d = d;
    int nd = 2 * d * d;
    L.support.resize(nd);
    L.owner.assign(nd, -1);
    L.odd_line.resize(nd);
    for (int e = 0; e < nd; e++) L.odd_line[e] = e < d * d;

    for (int i = 0; i < d; i++) {
        for (int j = 0; j < d; j++) {
            L.support[L.xstab(i, j)] = {L.v(i, j), L.h(i, j - 1), L.h(i, j), L.v(i - 1, j)};
            L.support[L.zstab(i, j)] = {L.h(i + 1, j), L.v(i, j), L.v(i, j + 1), L.h(i, j)};
        }
    }

    std::vector<std::vector<int>> xs(nd), zs(nd);
    for (int s = 0; s < nd; s++) {
        for (int e : L.support[s]) (L.kind(s) == StabKind::X ? xs : zs)[e].push_back(s);
        L.owner[L.support[s][kN]] = s;
    }
    L.x_stabs_of.resize(nd);
    L.z_stabs_of.resize(nd);
    for (int e = 0; e < nd; e++) {
        if (xs[e].size() != 2 || zs[e].size() != 2 || L.owner[e] < 0) {
            throw std::logic_error("malformed toric layout");
        }
        L.x_stabs_of[e] = {xs[e][0], xs[e][1]};
        L.z_stabs_of[e] = {zs[e][0], zs[e][1]};
    }

    for (int k = 0; k < d; k++) {
        L.logical[kX1].push_back(L.v(0, k));
        L.logical[kX2].push_back(L.h(k, 0));
        L.logical[kZ1].push_back(L.v(k, 0));
        L.logical[kZ2].push_back(L.h(0, k));
    }
    return L;
}

RoleSchedule role_schedule(const ToricLayout& layout, int round) {
    if (round < 0) throw std::invalid_argument("round must be non-negative");
    int nd = layout.num_data();
    RoleSchedule rs;
    rs.round = round;
    rs.atom_at.resize(layout.num_sites());
    for (int s = 0; s < layout.num_stabs(); s++) {
        int e = layout.support[s][kN];
        int a = nd + s;
        rs.swap_pairs.push_back({e, a});
        if (round % 2 == 0) {
            rs.atom_at[e] = e;
            rs.atom_at[a] = a;
        } else {
            rs.atom_at[e] = a;
            rs.atom_at[a] = e;
        }
    }
    return rs;
}

GateSequence gate_sequence(const ToricLayout& layout, Variant variant) {
    GateSequence g;
    g.variant = variant;
    g.steps.resize(5);
    int nd = layout.num_data();
    for (int slot = 1; slot <= 5; slot++) {
        for (int s = 0; s < layout.num_stabs(); s++) {
            int a = nd + s;
            const auto& sup = layout.support[s];
            GateSlot gs;
            gs.stab = s;
            gs.slot = slot;
            bool xk = layout.kind(s) == StabKind::X;
            int partner = slot <= 3 ? sup[slot - 1] : sup[kN];
            bool anc_controls;
            if (slot <= 3) {
                anc_controls = xk;
            } else if (slot == 4) {
                anc_controls = !xk;
            } else {
                anc_controls = xk;
            }
            gs.control = anc_controls ? a : partner;
            gs.target = anc_controls ? partner : a;
            gs.virtual_gate = slot == 5 && variant == Variant::FeedForward;
            g.steps[slot - 1].push_back(gs);
        }
    }
    return g;
}

int overlap_parity(const std::vector<int>& a, const std::vector<int>& b) {
    int n = 0;
    for (int x : a) n += std::count(b.begin(), b.end(), x);
    return n & 1;
}

const char* variant_name(Variant v) {
    return v == Variant::FiveCnot ? "five_cnot" : "feed_forward";
}

std::string dump_layout(const ToricLayout& layout, Variant variant) {
    std::ostringstream out;
    int d = layout.d;
    out << "toric d=" << d << " data=" << layout.num_data() << " stabs=" << layout.num_stabs() << "\n";
    for (int e = 0; e < layout.num_data(); e++) {
        auto c = layout.data_coord(e);
        out << "data " << e << " " << (e < d * d ? "h" : "v") << " " << layout.row(e) << " "
            << layout.col(e) << " site " << c[0] << " " << c[1] << " "
            << (layout.odd_line[e] ? "odd" : "even") << "\n";
    }
    for (int s = 0; s < layout.num_stabs(); s++) {
        auto c = layout.stab_coord(s);
        out << "stab " << s << " " << (layout.kind(s) == StabKind::X ? "X" : "Z") << " site " << c[0]
            << " " << c[1] << " SWEN";
        for (int e : layout.support[s]) out << " " << e;
        out << "\n";
    }
    const char* names[4] = {"X1", "X2", "Z1", "Z2"};
    for (int k = 0; k < 4; k++) {
        out << "logical " << names[k];
        for (int e : layout.logical[k]) out << " " << e;
        out << "\n";
    }
    auto seq = gate_sequence(layout, variant);
    out << "variant " << variant_name(variant) << "\n";
    for (const auto& step : seq.steps) {
        for (const auto& g : step) {
            out << "gate t" << g.slot << " stab " << g.stab << " c " << g.control << " t " << g.target
                << (g.virtual_gate ? " virtual" : "") << "\n";
        }
    }
    return out.str();
}

}  // namespace slru
