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

#include "noise.hpp"

#include <stdexcept>

namespace slru {

void NoiseConfig::validate() const {
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    if (!unit(p)) throw std::invalid_argument("p must lie in [0, 1]");
    if (!unit(re)) throw std::invalid_argument("R_e must lie in [0, 1]");
    if (!unit(eta)) throw std::invalid_argument("eta must lie in [0, 1]");
    if (!unit(detect_ratio)) throw std::invalid_argument("detect ratio must lie in [0, 1]");
}

static void assign_detection(Rng& rng, const NoiseConfig& cfg, GateFault& f) {
    if (cfg.detect == DetectMode::Both) {
        f.detect_control = f.detect_target = true;
        return;
    }
    bool first = uniform01(rng) < cfg.detect_ratio;
    if (f.leaked == Leaked::Both) {
        // One end decays, the other is lost; exactly one is visible.
        f.detect_control = first;
        f.detect_target = !first;
    } else {
        f.detect_control = f.detect_target = first;
    }
}

GateFault sample_fault_given_error(Rng& rng, const NoiseConfig& cfg) {
    GateFault f;
    double u = uniform01(rng) * cfg.p;
    double pe = cfg.pe();
    if (u < pe) {
        f.kind = FaultKind::Decay;
        double single = pe * (1.0 - cfg.eta) / 2.0;
        if (u < single) {
            f.leaked = Leaked::Control;
        } else if (u < 2.0 * single) {
            f.leaked = Leaked::Target;
        } else {
            f.leaked = Leaked::Both;
        }
        f.jump_control = coin(rng) ? Jump::K1L : Jump::K0L;
        f.jump_target = coin(rng) ? Jump::K1L : Jump::K0L;
        f.companion = coin(rng);
        assign_detection(rng, cfg, f);
        return f;
    }
    f.kind = FaultKind::Depolarize;
    int k = 1 + static_cast<int>(uniform01(rng) * 15.0);
    if (k > 15) k = 15;
    f.pauli_control = static_cast<Pauli>(k & 3);
    f.pauli_target = static_cast<Pauli>(k >> 2);
    return f;
}

GateFault sample_gate_fault(Rng& rng, const NoiseConfig& cfg) {
    if (uniform01(rng) >= cfg.p) return GateFault{};
    return sample_fault_given_error(rng, cfg);
}

PauliClass classify_pauli(Pauli ancilla, Pauli data, Pauli tracked) {
    uint8_t bit = tracked == kZ ? 2 : 1;
    bool a = (ancilla & bit) != 0;
    bool b = (data & bit) != 0;
    if (a && b) return PauliClass::XX;
    if (a) return PauliClass::XI;
    if (b) return PauliClass::IX;
    return PauliClass::Trivial;
}

const char* pauli_class_name(PauliClass c) {
    switch (c) {
        case PauliClass::XX: return "XX";
        case PauliClass::XI: return "XI";
        case PauliClass::IX: return "IX";
        default: return "I";
    }
}

}  // namespace slru
