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


#include <cmath>
#include <set>
#include <tuple>

#include "dem.hpp"
#include "doctest.h"

using namespace slru;

namespace {

NoiseConfig decay_only(double p, double eta) {
    NoiseConfig c;
    c.p = p;
    c.re = 1.0;
    c.eta = eta;
    return c;
}

ShotRecord empty_shot(const DetectorGraph& g) {
    ShotRecord s;
    s.d = g.d;
    s.rounds = g.rounds;
    s.leak.assign(static_cast<size_t>(2 * g.d * g.d) * (g.rounds + 1), 0);
    return s;
}

void check_weights(const DetectorGraph& g) {
    for (size_t e = 0; e < g.edges.size(); e++) {
        double p = g.prob[e];
        if (p <= 0.0) {
            CHECK(g.iweight[e] == -1);
            continue;
        }
        CHECK(g.weight[e] == doctest::Approx(std::log((1.0 - p) / p)).epsilon(1e-12));
    }
}

}  // namespace

TEST_CASE("weights") {
    CHECK(edge_weight(0.1) == doctest::Approx(2.1972245773));
    CHECK(edge_weight(0.5) == 0.0);
    CHECK(std::isinf(edge_weight(0.0)));
    CHECK(xor_prob(0.1, 0.2) == doctest::Approx(0.26));
}

TEST_CASE("base graph is graphlike and consistent") {
    for (auto v : {Variant::FiveCnot, Variant::FeedForward}) {
        auto L = build_layout(3);
        NoiseConfig c = decay_only(0.01, 0.0755);
        c.re = 0.7;
        c.variant = v;
        for (auto b : {Basis::X, Basis::Z}) {
            auto g = build_base_graph(L, c, b);
            CHECK(g.num_detectors == 9 * 4);
            std::set<std::tuple<int, int, int>> keys;
            for (const auto& e : g.edges) {
                CHECK(e.a < e.b);
                CHECK(e.b < g.num_detectors);
                keys.insert(std::make_tuple(e.a, e.b, int(e.obs)));
            }
            CHECK(keys.size() == g.edges.size());
            check_weights(g);
            auto dump = g.dump();
            CHECK(std::count(dump.begin(), dump.end(), '\n') == static_cast<long>(g.edges.size()) + 1);
            CHECK(dump == build_base_graph(L, c, b).dump());
        }
    }
}

TEST_CASE("graph build fails on invalid noise") {
    auto L = build_layout(3);
    NoiseConfig c = decay_only(2.0, 0.0);
    CHECK_THROWS(build_base_graph(L, c, Basis::X));
}

TEST_CASE("leak-free shots leave the graph unchanged") {
    auto L = build_layout(3);
    auto c = decay_only(0.01, 0.0755);
    auto g = build_base_graph(L, c, Basis::X);
    auto s = empty_shot(g);
    CHECK(reweight_located(g, s, c).empty());
    c.detect = DetectMode::OneType;
    CHECK(reweight_critical(g, s, c).empty());
    CHECK(reweight(DecoderKind::Trivial, g, s, c).empty());
}

TEST_CASE("located reweighting uses the per-site posterior") {
    auto L = build_layout(3);
    for (auto v : {Variant::FiveCnot, Variant::FeedForward}) {
        auto c = decay_only(0.02, 0.0);
        c.variant = v;
        auto g = build_base_graph(L, c, Basis::X);
        int R = g.rounds;
        // Readout key of an even-line data position in round 2.
        int e = L.v(1, 1);
        int key = L.owner[e] * (R + 1) + 1;
        int n = v == Variant::FiveCnot ? 10 : 8;
        CHECK(g.located_sites[key] == n);
        double q = 0.01;
        double p_site = q / (1.0 - std::pow(1.0 - q, n));
        if (v == Variant::FiveCnot) CHECK(p_site == doctest::Approx(0.1046).epsilon(1e-3));
        auto s = empty_shot(g);
        s.leak[key] = 1;
        auto ov = reweight_located(g, s, c);
        CHECK_FALSE(ov.empty());
        bool saw_site = false, saw_half = false;
        for (auto [edge, p] : ov.changes) {
            CHECK(p <= 0.5);
            CHECK(p > g.prob[edge]);
            if (std::fabs(p - xor_prob(g.prob[edge], p_site)) < 1e-12) saw_site = true;
            if (p == 0.5) saw_half = true;
        }
        CHECK(saw_site);
        CHECK(saw_half);
        auto before = g.dump();
        auto undo = apply_overlay(g, ov);
        check_weights(g);
        apply_overlay(g, undo);
        CHECK(g.dump() == before);
    }
}

TEST_CASE("critical reweighting erases the correlated data edges") {
    auto L = build_layout(5);
    auto c = decay_only(0.01, 0.0755);
    c.detect = DetectMode::OneType;
    c.detect_ratio = 0.5;
    auto g = build_base_graph(L, c, Basis::X);
    int R = g.rounds;
    int s = L.zstab(2, 2);
    // Keys of the two atoms of the slot-1 gate of round 2.
    int found = 0;
    for (int key = 0; key < static_cast<int>(g.critical.size()); key++) {
        if (g.critical[key].empty()) continue;
        found++;
        std::set<int> data_sites;
        for (int e : g.critical[key]) {
            if (g.edges[e].kind == EdgeKind::Data) data_sites.insert(g.edges[e].site);
        }
        CHECK(data_sites.size() >= 2);
    }
    CHECK(found > 0);
    auto shot = empty_shot(g);
    int key = -1;
    for (int k = s * (R + 1); k < (s + 1) * (R + 1); k++) {
        if (!g.critical[k].empty()) key = k;
    }
    REQUIRE(key >= 0);
    shot.leak[key] = 1;
    auto ov = reweight_critical(g, shot, c);
    CHECK(ov.changes.size() >= 2);
    for (auto [e, p] : ov.changes) CHECK(p == 0.5);
    apply_overlay(g, ov);
    for (int e : g.critical[key]) CHECK(g.weight[e] == 0.0);
}

TEST_CASE("basis graphs are independent objects") {
    auto L = build_layout(3);
    auto c = decay_only(0.01, 0.0755);
    auto gx = build_base_graph(L, c, Basis::X);
    auto gz = build_base_graph(L, c, Basis::Z);
    auto z_before = gz.dump();
    auto s = empty_shot(gx);
    s.leak[3] = 1;
    apply_overlay(gx, reweight_located(gx, s, c));
    CHECK(gz.dump() == z_before);
}

TEST_CASE("double leaks add no mechanisms to the decoder graph") {
    auto L = build_layout(3);
    auto g0 = build_base_graph(L, decay_only(0.01, 0.0), Basis::X);
    auto g1 = build_base_graph(L, decay_only(0.01, 0.0755), Basis::X);
    for (const auto& e : g1.edges) {
        if (e.prior <= 0.0) continue;
        int k = g0.find_edge(e.a, e.b, e.obs);
        REQUIRE(k >= 0);
        // Single-leak priors scale with 1 - eta.
        double q0 = g0.edges[k].prior, q1 = e.prior;
        CHECK(q1 <= q0 + 1e-15);
    }
}
