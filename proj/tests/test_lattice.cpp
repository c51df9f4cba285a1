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


#include <algorithm>
#include <set>

#include "doctest.h"
#include "lattice.hpp"

using namespace slru;

TEST_CASE("layout sizes") {
    for (int d : {3, 5, 7}) {
        auto L = build_layout(d);
        CHECK(L.num_data() == 2 * d * d);
        int nx = 0, nz = 0;
        for (int s = 0; s < L.num_stabs(); s++) (L.kind(s) == StabKind::X ? nx : nz)++;
        CHECK(nx == d * d);
        CHECK(nz == d * d);
    }
    CHECK_THROWS(build_layout(4));
    CHECK_THROWS(build_layout(1));
}

TEST_CASE("each check has four distinct data sites") {
    auto L = build_layout(3);
    for (const auto& sup : L.support) {
        std::set<int> u(sup.begin(), sup.end());
        CHECK(u.size() == 4);
    }
}

TEST_CASE("checks and logicals commute as symplectic vectors") {
    for (int d : {3, 5}) {
        auto L = build_layout(d);
        std::vector<std::vector<int>> xs, zs;
        for (int s = 0; s < L.num_stabs(); s++) {
            std::vector<int> v(L.support[s].begin(), L.support[s].end());
            (L.kind(s) == StabKind::X ? xs : zs).push_back(v);
        }
        for (const auto& a : xs)
            for (const auto& b : zs) CHECK(overlap_parity(a, b) == 0);
        for (int k = 0; k < 4; k++) CHECK(L.logical[k].size() == static_cast<size_t>(d));
        // X logicals against Z checks, Z logicals against X checks.
        for (int k : {kX1, kX2})
            for (const auto& b : zs) CHECK(overlap_parity(L.logical[k], b) == 0);
        for (int k : {kZ1, kZ2})
            for (const auto& b : xs) CHECK(overlap_parity(L.logical[k], b) == 0);
        CHECK(overlap_parity(L.logical[kX1], L.logical[kZ1]) == 1);
        CHECK(overlap_parity(L.logical[kX2], L.logical[kZ2]) == 1);
        CHECK(overlap_parity(L.logical[kX1], L.logical[kZ2]) == 0);
        CHECK(overlap_parity(L.logical[kX2], L.logical[kZ1]) == 0);
    }
}

TEST_CASE("role schedule is a permutation and an involution") {
    auto L = build_layout(5);
    for (int r = 0; r < 4; r++) {
        auto rs = role_schedule(L, r);
        std::vector<int> seen(L.num_sites(), 0);
        for (int a : rs.atom_at) seen[a]++;
        CHECK(std::all_of(seen.begin(), seen.end(), [](int c) { return c == 1; }));
    }
    auto r1 = role_schedule(L, 1);
    for (int k = 0; k < L.num_sites(); k++) CHECK(r1.atom_at[r1.atom_at[k]] == k);
    auto r2 = role_schedule(L, 2);
    for (int k = 0; k < L.num_sites(); k++) CHECK(r2.atom_at[k] == k);
}

TEST_CASE("odd-line data position is taken over by the Z ancilla below it") {
    auto L = build_layout(3);
    auto rs = role_schedule(L, 1);
    int nd = L.num_data();
    for (int e = 0; e < nd; e++) {
        if (!L.odd_line[e]) continue;
        int s = L.owner[e];
        CHECK(L.kind(s) == StabKind::Z);
        CHECK(rs.atom_at[e] == nd + s);
        auto ce = L.data_coord(e);
        auto cs = L.stab_coord(s);
        CHECK(cs[0] == ce[0] + 1);
        CHECK(cs[1] == ce[1]);
    }
}

TEST_CASE("no site is touched twice in one time step") {
    for (auto v : {Variant::FiveCnot, Variant::FeedForward}) {
        auto L = build_layout(5);
        auto seq = gate_sequence(L, v);
        CHECK(seq.steps.size() == 5);
        CHECK(seq.physical_slots() == (v == Variant::FiveCnot ? 5 : 4));
        for (int r = 1; r <= 2; r++) {
            auto rs = role_schedule(L, r - 1);
            for (const auto& step : seq.steps) {
                std::vector<int> use(L.num_sites(), 0);
                for (const auto& g : step) {
                    use[rs.atom_at[g.control]]++;
                    use[rs.atom_at[g.target]]++;
                }
                CHECK(*std::max_element(use.begin(), use.end()) == 1);
            }
        }
        for (const auto& g : seq.steps[4]) CHECK(g.virtual_gate == (v == Variant::FeedForward));
    }
}

TEST_CASE("slot ordering is the same for every check of one type") {
    auto L = build_layout(5);
    auto seq = gate_sequence(L, Variant::FiveCnot);
    int nd = L.num_data();
    for (int k = 0; k < 5; k++) {
        for (const auto& g : seq.steps[k]) {
            const auto& sup = L.support[g.stab];
            int partner = g.control == nd + g.stab ? g.target : g.control;
            int slot_partner = k < 3 ? sup[k] : sup[kN];
            CHECK(partner == slot_partner);
            bool anc_ctrl = g.control == nd + g.stab;
            bool xk = L.kind(g.stab) == StabKind::X;
            CHECK(anc_ctrl == (k == 3 ? !xk : xk));
        }
    }
}

TEST_CASE("layout dump is deterministic") {
    auto a = dump_layout(build_layout(3), Variant::FiveCnot);
    auto b = dump_layout(build_layout(3), Variant::FiveCnot);
    CHECK(a == b);
    CHECK(a.find("toric d=3") == 0);
}
