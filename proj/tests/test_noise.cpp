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

#include "doctest.h"
#include "noise.hpp"

using namespace slru;

namespace {

// |observed - expected| within 5 binomial standard deviations.
bool within5(int64_t hits, int64_t n, double prob) {
    double mean = prob * n;
    double sd = std::sqrt(n * prob * (1.0 - prob));
    return std::fabs(hits - mean) <= 5.0 * std::max(sd, 1.0);
}

}  // namespace

TEST_CASE("branch probabilities") {
    NoiseConfig c;
    c.p = 0.01;
    c.re = 1.0;
    c.eta = 0.0;
    CHECK(c.pe() * (1.0 - c.eta) / 2.0 == doctest::Approx(0.005));
    CHECK(c.pe() * c.eta == 0.0);
    c.eta = 0.0755;
    CHECK(c.pe() * c.eta == doctest::Approx(7.55e-4));
    c.p = 0.015;
    c.re = 0.0;
    CHECK(c.pp() / 15.0 == doctest::Approx(0.001));
}

TEST_CASE("validation") {
    NoiseConfig c;
    c.p = 1.5;
    CHECK_THROWS(c.validate());
    c.p = 0.1;
    c.eta = -0.1;
    CHECK_THROWS(c.validate());
    c.eta = 0.1;
    CHECK_NOTHROW(c.validate());
}

TEST_CASE("empirical branch frequencies, 1e7 conditional samples") {
    NoiseConfig c;
    c.p = 0.02;
    c.re = 0.6;
    c.eta = 0.0755;
    Rng rng(12345);
    const int64_t n = 10000000;
    int64_t lc = 0, lt = 0, ll = 0, dep = 0, k1c = 0;
    std::array<int64_t, 16> pauli{};
    for (int64_t i = 0; i < n; i++) {
        auto f = sample_fault_given_error(rng, c);
        if (f.kind == FaultKind::Decay) {
            if (f.leaked == Leaked::Control) lc++;
            if (f.leaked == Leaked::Target) lt++;
            if (f.leaked == Leaked::Both) ll++;
            if (f.jump_control == Jump::K1L) k1c++;
        } else {
            dep++;
            pauli[f.pauli_control | (f.pauli_target << 2)]++;
        }
    }
    double re = c.re, eta = c.eta;
    CHECK(within5(lc, n, re * (1 - eta) / 2));
    CHECK(within5(lt, n, re * (1 - eta) / 2));
    CHECK(within5(ll, n, re * eta));
    CHECK(within5(dep, n, 1 - re));
    CHECK(within5(k1c, lc + lt + ll, 0.5));
    CHECK(pauli[0] == 0);
    for (int k = 1; k < 16; k++) CHECK(within5(pauli[k], dep, 1.0 / 15.0));
}

TEST_CASE("pure decay and pure Pauli limits") {
    Rng rng(7);
    NoiseConfig c;
    c.p = 0.5;
    c.re = 1.0;
    c.eta = 0.0;
    for (int i = 0; i < 200000; i++) {
        auto f = sample_gate_fault(rng, c);
        CHECK_FALSE(f.kind == FaultKind::Depolarize);
        if (f.kind == FaultKind::Decay) CHECK_FALSE(f.leaked == Leaked::Both);
    }
    c.re = 0.0;
    for (int i = 0; i < 200000; i++) CHECK_FALSE(sample_gate_fault(rng, c).kind == FaultKind::Decay);
}

TEST_CASE("one-type detection ratio") {
    Rng rng(99);
    NoiseConfig c;
    c.p = 1.0;
    c.re = 1.0;
    c.eta = 0.5;
    c.detect = DetectMode::OneType;
    c.detect_ratio = 0.5;
    int64_t single = 0, seen = 0;
    for (int i = 0; i < 400000; i++) {
        auto f = sample_fault_given_error(rng, c);
        if (f.leaked == Leaked::Both) {
            CHECK(f.detect_control != f.detect_target);
        } else {
            single++;
            if (f.detect_control) seen++;
        }
    }
    CHECK(within5(seen, single, 0.5));
}

TEST_CASE("Pauli classes") {
    // X-tracking: X or Y on a qubit counts as an X error.
    CHECK(classify_pauli(kX, kY, kX) == PauliClass::XX);
    CHECK(classify_pauli(kZ, kZ, kX) == PauliClass::Trivial);
    CHECK(classify_pauli(kY, kI, kX) == PauliClass::XI);
    CHECK(classify_pauli(kZ, kX, kX) == PauliClass::IX);
    int count[4] = {0, 0, 0, 0};
    for (int a = 0; a < 4; a++)
        for (int b = 0; b < 4; b++) {
            if (a == 0 && b == 0) continue;
            count[static_cast<int>(classify_pauli(Pauli(a), Pauli(b), kX))]++;
        }
    CHECK(count[static_cast<int>(PauliClass::XX)] == 4);
    CHECK(count[static_cast<int>(PauliClass::XI)] == 4);
    CHECK(count[static_cast<int>(PauliClass::IX)] == 4);
}
