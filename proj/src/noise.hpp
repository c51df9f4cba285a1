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

#ifndef SWAPLRU_NOISE_HPP
#define SWAPLRU_NOISE_HPP

#include <cstdint>
#include <random>

#include "lattice.hpp"

namespace slru {

enum class DetectMode { Both, OneType };

struct NoiseConfig {
    double p = 0.0;
    double re = 1.0;
    double eta = 0.0;
    DetectMode detect = DetectMode::Both;
    double detect_ratio = 1.0;
    Variant variant = Variant::FiveCnot;

    double pe() const { return re * p; }
    double pp() const { return (1.0 - re) * p; }
    // Probability that one given gate leaks one given participant.
    double leak_per_side() const { return pe() * (1.0 + eta) / 2.0; }
    void validate() const;
};

enum class Jump : uint8_t { K0L, K1L };
enum class Leaked : uint8_t { Control, Target, Both };
enum class FaultKind : uint8_t { None, Decay, Depolarize };

// Single-qubit Pauli as (x, z) bits: I=0, X=1, Z=2, Y=3.
enum Pauli : uint8_t { kI = 0, kX = 1, kZ = 2, kY = 3 };

struct GateFault {
    FaultKind kind = FaultKind::None;
    Leaked leaked = Leaked::Control;
    Jump jump_control = Jump::K0L;
    Jump jump_target = Jump::K0L;
    // Companion Pauli on the surviving partner: Z on a control end, X on a target end.
    bool companion = false;
    // Detectability of each leaked end (one-type detection).
    bool detect_control = true;
    bool detect_target = true;
    Pauli pauli_control = kI;
    Pauli pauli_target = kI;
};

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) from 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
inline bool coin(Rng& rng) { return (rng() >> 63) != 0; }

GateFault sample_gate_fault(Rng& rng, const NoiseConfig& cfg);

/// Samples a fault conditioned on one occurring (used with geometric skipping).
GateFault sample_fault_given_error(Rng& rng, const NoiseConfig& cfg);

enum class PauliClass { XX, XI, IX, Trivial };

/// Classifies a two-qubit Pauli (ancilla end, data end) by which ends carry a
/// component of the tracked error type (kX or kZ).
PauliClass classify_pauli(Pauli ancilla, Pauli data, Pauli tracked);

const char* pauli_class_name(PauliClass c);

}  // namespace slru

#endif
