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
#include <cmath>
#include <functional>
#include <random>

#include "doctest.h"
#include "matching.hpp"

using namespace slru;

namespace {

DetectorGraph small_graph() {
    auto L = build_layout(3);
    NoiseConfig c;
    c.p = 0.01;
    c.re = 0.5;
    c.eta = 0.0755;
    return build_base_graph(L, c, Basis::X);
}

std::vector<int> random_defects(std::mt19937_64& rng, int n, int k) {
    std::vector<int> all(n);
    for (int i = 0; i < n; i++) all[i] = i;
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<int> out(all.begin(), all.begin() + k);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("empty defect set") {
    auto g = small_graph();
    auto c = decode(g, {});
    CHECK(c.pairs.empty());
    CHECK(c.obs == 0);
    CHECK(c.weight == 0.0);
}

TEST_CASE("cheapest single edge wins") {
    auto g = small_graph();
    for (size_t e = 0; e < g.edges.size(); e++) g.set_weight(static_cast<int>(e), 2.0);
    g.set_weight(0, 1.0);
    auto c = decode(g, {g.edges[0].a, g.edges[0].b});
    REQUIRE(c.pairs.size() == 1);
    REQUIRE(c.paths[0].size() == 1);
    CHECK(c.paths[0][0] == 0);
    CHECK(c.weight == doctest::Approx(1.0));
    CHECK(c.obs == g.edges[0].obs);
    auto b = brute_force_decode(g, {g.edges[0].a, g.edges[0].b});
    CHECK(b.weight == doctest::Approx(c.weight));
}

TEST_CASE("blossom against exhaustive pairing on dense random weights") {
    std::mt19937_64 rng(5);
    for (int it = 0; it < 300; it++) {
        int n = 2 * (1 + static_cast<int>(rng() % 5));
        std::vector<int64_t> w(n * n, 0);
        for (int i = 0; i < n; i++)
            for (int j = i + 1; j < n; j++) w[i * n + j] = w[j * n + i] = 1 + static_cast<int64_t>(rng() % 50);
        auto m = max_weight_perfect_matching(n, w);
        int64_t got = 0;
        for (int i = 0; i < n; i++) {
            CHECK(m[m[i]] == i);
            CHECK(m[i] != i);
            if (i < m[i]) got += w[i * n + m[i]];
        }
        // Exhaustive maximum.
        std::function<int64_t(uint32_t)> best = [&](uint32_t left) -> int64_t {
            if (!left) return 0;
            int i = __builtin_ctz(left);
            int64_t b = -1;
            for (int j = i + 1; j < n; j++)
                if (left >> j & 1) b = std::max(b, w[i * n + j] + best(left & ~(1u << i) & ~(1u << j)));
            return b;
        };
        CHECK(got == best((1u << n) - 1));
    }
}

TEST_CASE("decode equals the brute-force oracle with erasure edges") {
    auto g = small_graph();
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int it = 0; it < 1000; it++) {
        for (size_t e = 0; e < g.edges.size(); e++) {
            g.set_weight(static_cast<int>(e), u(rng) < 0.1 ? 0.0 : 5.0 * (1.0 - u(rng)));
        }
        int k = 2 * static_cast<int>(rng() % 5);
        auto def = random_defects(rng, g.num_detectors, k);
        auto a = decode(g, def);
        auto b = brute_force_decode(g, def);
        CHECK(std::fabs(a.weight - b.weight) <= 1e-12);
        CHECK(std::fabs(subset_dp_weight(g, def) - b.weight) <= 1e-12);
    }
}

TEST_CASE("correction paths reproduce the defects") {
    auto g = small_graph();
    std::mt19937_64 rng(3);
    Matcher m(g);
    for (int it = 0; it < 200; it++) {
        auto def = random_defects(rng, g.num_detectors, 6);
        auto c = m.decode(def);
        std::vector<int> parity(g.num_detectors, 0);
        uint8_t obs = 0;
        double w = 0.0;
        for (const auto& path : c.paths) {
            for (int e : path) {
                parity[g.edges[e].a] ^= 1;
                parity[g.edges[e].b] ^= 1;
                obs ^= g.edges[e].obs;
                w += g.weight[e];
            }
        }
        std::vector<int> got;
        for (int i = 0; i < g.num_detectors; i++)
            if (parity[i]) got.push_back(i);
        CHECK(got == def);
        CHECK(obs == c.obs);
        CHECK(w == doctest::Approx(c.weight));
    }
}

TEST_CASE("decoding is deterministic") {
    auto g = small_graph();
    std::mt19937_64 rng(11);
    for (int it = 0; it < 100; it++) {
        auto def = random_defects(rng, g.num_detectors, 8);
        auto a = decode(g, def);
        auto b = decode(g, def);
        CHECK(a.pairs == b.pairs);
        CHECK(a.paths == b.paths);
        CHECK(a.obs == b.obs);
    }
}

TEST_CASE("symmetric square has a unique optimum weight") {
    auto g = small_graph();
    for (size_t e = 0; e < g.edges.size(); e++) g.set_weight(static_cast<int>(e), 1.0);
    // Four defects pairwise joined by edges of equal weight.
    std::vector<int> def;
    const auto& e0 = g.edges[0];
    def = {e0.a, e0.b};
    for (const auto& e : g.edges) {
        if (e.a != e0.a && e.a != e0.b && e.b != e0.a && e.b != e0.b) {
            def.push_back(e.a);
            def.push_back(e.b);
            break;
        }
    }
    std::sort(def.begin(), def.end());
    auto a = decode(g, def);
    CHECK(a.weight == doctest::Approx(brute_force_decode(g, def).weight));
    CHECK(a.weight <= 2.0 + 1e-12);
}

TEST_CASE("zero-weight path makes matching free") {
    auto g = small_graph();
    for (size_t e = 0; e < g.edges.size(); e++) g.set_weight(static_cast<int>(e), 3.0);
    int a = g.edges[0].a;
    int mid = g.edges[0].b;
    int b = -1;
    for (size_t e = 1; e < g.edges.size(); e++) {
        const auto& x = g.edges[e];
        if (x.a == mid && x.b != a) {
            b = x.b;
            g.set_weight(static_cast<int>(e), 0.0);
            break;
        }
    }
    REQUIRE(b >= 0);
    g.set_weight(0, 0.0);
    std::vector<int> def = {std::min(a, b), std::max(a, b)};
    CHECK(decode(g, def).weight == 0.0);
}

TEST_CASE("judging shots") {
    ShotRecord s;
    Correction c;
    Verdict v;
    judge_shot(c, Basis::X, s, v);
    for (bool f : v.fail) CHECK_FALSE(f);
    s.logical[kX2] = 1;
    Verdict w;
    judge_shot(c, Basis::X, s, w);
    CHECK(w.fail[kX2]);
    CHECK_FALSE(w.fail[kX1]);
    c.obs = 2;
    Verdict z;
    judge_shot(c, Basis::X, s, z);
    CHECK_FALSE(z.fail[kX2]);
}

TEST_CASE("decoding without paths gives the same pairs and flips") {
    auto g = small_graph();
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Matcher m(g);
    for (int it = 0; it < 500; it++) {
        for (size_t e = 0; e < g.edges.size(); e++) {
            g.set_weight(static_cast<int>(e), u(rng) < 0.1 ? 0.0 : 1.0 + static_cast<double>(rng() % 4));
        }
        auto def = random_defects(rng, g.num_detectors, 2 * (1 + static_cast<int>(rng() % 6)));
        auto a = m.decode(def, true);
        auto b = m.decode(def, false);
        CHECK(a.pairs == b.pairs);
        CHECK(a.obs == b.obs);
        CHECK(a.weight == b.weight);
        CHECK(b.paths.empty());
    }
}
