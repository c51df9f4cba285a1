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

#ifndef SWAPLRU_PROPAGATION_HPP
#define SWAPLRU_PROPAGATION_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "lattice.hpp"
#include "noise.hpp"

namespace slru {

enum class Side { Control, Target };

struct KrausOutcome {
    Jump jump;
    bool x_on_target;
    bool z_on_control;
    double probability;
};

/// Pushes a leaked qubit's jump operator through one CNOT.
std::vector<KrausOutcome> propagate_kraus_cnot(Jump jump, Side side);

/// Per-atom Pauli frame. Bit is uint8_t for sampled shots and a uint64_t
/// coin mask for symbolic propagation. A leaked atom carries a jump label:
/// label_x == false means K0L/K1L (Z basis), true means K+L/K-L.
template <class Bit>
struct AtomFrame {
    Bit x{};
    Bit z{};
    Bit label{};
    bool leaked = false;
    bool label_x = false;
    bool visible = true;
};

/// Coin source for sampled shots.
struct RandomCoins {
    Rng* rng;
    uint8_t fresh() { return coin(*rng) ? 1 : 0; }
};

/// Coin source for symbolic propagation: every draw is a new GF(2) variable.
struct SymbolicCoins {
    int used = 0;
    uint64_t fresh() {
        if (used >= 64) throw std::runtime_error("symbolic coin budget exhausted");
        return uint64_t{1} << used++;
    }
};

template <class Bit>
class FrameEngine {
   public:
    FrameEngine(const ToricLayout& layout, const GateSequence& seq)
        : layout_(&layout), seq_(&seq), atoms_(layout.num_sites()) {
        int nd = layout.num_data();
        partner_.resize(layout.num_sites());
        for (int s = 0; s < layout.num_stabs(); s++) {
            int e = layout.support[s][kN];
            partner_[e] = nd + s;
            partner_[nd + s] = e;
        }
    }

    void clear() {
        for (auto& a : atoms_) a = AtomFrame<Bit>{};
    }

    // Atom holding a role position in a 1-based round.
    int atom_at(int position, int round) const {
        return (round - 1) % 2 == 0 ? position : partner_[position];
    }

    AtomFrame<Bit>& atom(int k) { return atoms_[k]; }
    const AtomFrame<Bit>& atom(int k) const { return atoms_[k]; }
    bool any_leaked() const {
        for (const auto& a : atoms_) if (a.leaked) return true;
        return false;
    }

    template <class Coins>
    void cnot(int c, int t, Coins& coins) {
        auto& C = atoms_[c];
        auto& T = atoms_[t];
        if (!C.leaked && !T.leaked) {
            T.x ^= C.x;
            C.z ^= T.z;
        } else if (C.leaked && !T.leaked) {
            if (C.label_x) {
                C.label_x = false;
                C.label = coins.fresh();
            }
            T.x ^= C.label;
        } else if (!C.leaked && T.leaked) {
            if (!T.label_x) {
                T.label_x = true;
                T.label = coins.fresh();
            }
            C.z ^= T.label;
        }
    }

    void leak(int k, Bit jump, bool visible) {
        auto& A = atoms_[k];
        A.leaked = true;
        A.label_x = false;
        A.label = jump;
        A.visible = visible;
    }

    /// Runs one round. after_gate(step, index, control_atom, target_atom) fires
    /// after every physical CNOT; on_measure(stab, outcome, leaked, visible)
    /// fires for every measured atom.
    template <class Coins, class AfterGate, class OnMeasure>
    void run_round(int round, Coins& coins, AfterGate&& after_gate, OnMeasure&& on_measure) {
        const auto& L = *layout_;
        int nd = L.num_data();
        bool ff = seq_->variant == Variant::FeedForward;
        for (int step = 0; step < 5; step++) {
            if (step == 4 && ff) break;
            const auto& gates = seq_->steps[step];
            for (int i = 0; i < static_cast<int>(gates.size()); i++) {
                int c = atom_at(gates[i].control, round);
                int t = atom_at(gates[i].target, round);
                cnot(c, t, coins);
                after_gate(step, i, c, t);
            }
        }
        for (int s = 0; s < L.num_stabs(); s++) {
            int m = atom_at(L.support[s][kN], round);
            auto& M = atoms_[m];
            bool xk = L.kind(s) == StabKind::X;
            Bit outcome;
            if (M.leaked) {
                outcome = coins.fresh();
            } else {
                outcome = xk ? M.z : M.x;
            }
            on_measure(s, outcome, M.leaked, M.visible);
            if (ff) {
                auto& A = atoms_[atom_at(nd + s, round)];
                if (!A.leaked) {
                    Bit kick = M.leaked ? coins.fresh() : outcome;
                    if (xk) {
                        A.z ^= kick;
                    } else {
                        A.x ^= kick;
                    }
                }
            }
            M = AtomFrame<Bit>{};
        }
    }

    /// Ideal readout of every data position after `rounds` rounds.
    template <class Coins, class OnData>
    void read_data(int rounds, Coins& coins, OnData&& on_data) {
        for (int e = 0; e < layout_->num_data(); e++) {
            auto& A = atoms_[atom_at(e, rounds + 1)];
            if (A.leaked) {
                Bit x = coins.fresh();
                Bit z = coins.fresh();
                on_data(e, x, z, true, A.visible);
            } else {
                on_data(e, A.x, A.z, false, A.visible);
            }
        }
    }

   private:
    const ToricLayout* layout_;
    const GateSequence* seq_;
    std::vector<AtomFrame<Bit>> atoms_;
    std::vector<int> partner_;
};

/// Three-outcome measurement record of one shot.
struct ShotRecord {
    int d = 0;
    int rounds = 0;
    // meas[s * rounds + (r - 1)]: syndrome flip of stabilizer s in round r.
    std::vector<uint8_t> meas;
    // leak[s * (rounds + 1) + (r - 1)]: visible L outcome; slot r = rounds + 1
    // is the final ideal readout of data position N(s).
    std::vector<uint8_t> leak;
    std::vector<uint8_t> final_x;
    std::vector<uint8_t> final_z;
    // Realized logical flips X1, X2, Z1, Z2.
    uint8_t logical[4] = {0, 0, 0, 0};
    int num_faults = 0;

    bool any_leak() const {
        for (auto b : leak) if (b) return true;
        return false;
    }
    std::string to_csv_trace() const;
};

struct ScheduledFault {
    int64_t gate = 0;  // flat gate index, see gate_index()
    GateFault fault;
};

/// Flat index of a physical gate: ((round - 1) * slots + step) * 2d^2 + i.
inline int64_t gate_index(const ToricLayout& L, const GateSequence& seq, int round, int step, int i) {
    return (static_cast<int64_t>(round - 1) * seq.physical_slots() + step) * L.num_stabs() + i;
}

/// Applies a sampled fault after the gate on atoms (c, t). Gates touching an
/// atom that is already leaked do not fault again.
void apply_fault(FrameEngine<uint8_t>& eng, int c, int t, const GateFault& f);

/// Samples gate faults for a whole shot with geometric skipping.
void sample_shot_faults(Rng& rng, const NoiseConfig& cfg, int64_t num_gates, std::vector<ScheduledFault>& out);

/// Runs a shot given its faults; faults must be sorted by gate index.
void run_shot(const ToricLayout& L, const GateSequence& seq, int rounds, const std::vector<ScheduledFault>& faults,
              Rng& rng, FrameEngine<uint8_t>& eng, ShotRecord& rec);

ShotRecord simulate_shot(const ToricLayout& L, const NoiseConfig& cfg, Rng& rng, int rounds = 0);

// ---------------------------------------------------------------------------
// Symbolic single-fault propagation.

/// A sparse GF(2) vector over detector ids plus an observable mask.
struct SparseEffect {
    std::vector<int> dets;  // sorted
    uint8_t obs = 0;
    bool operator==(const SparseEffect& o) const { return dets == o.dets && obs == o.obs; }
    bool operator<(const SparseEffect& o) const {
        if (dets.size() != o.dets.size()) return dets.size() < o.dets.size();
        if (dets != o.dets) return dets < o.dets;
        return obs < o.obs;
    }
    bool empty() const { return dets.empty() && obs == 0; }
    void add(const SparseEffect& o);
};

/// Detector numbering for one basis. basis X tracks X errors with Z checks.
struct DetectorIndex {
    int d = 0;
    int rounds = 0;
    StabKind checks = StabKind::Z;
    int num_detectors() const { return d * d * (rounds + 1); }
    // t in 1..rounds + 1
    int id(int stab_local, int t) const { return stab_local * (rounds + 1) + (t - 1); }
    int stab_of(int det) const { return det / (rounds + 1); }
    int time_of(int det) const { return det % (rounds + 1) + 1; }
};

enum class Basis { X = 0, Z = 1 };

struct InjectedFault {
    int round = 1;
    int step = 0;   // 0-based time step
    int index = 0;  // gate index inside the step (the stabilizer id)
    // Decay branch, or Pauli generators when pauli_generators is set.
    bool pauli_generators = false;
    Leaked leaked = Leaked::Control;
    bool with_companion = true;
    bool visible_control = true;
    bool visible_target = true;
    // Fixed Pauli pair (control = k & 3, target = k >> 2) instead of generators.
    int fixed_pauli = -1;
};

/// Symbolic result: per coin, its effect in each basis; leak bookkeeping.
struct SymbolicEffect {
    int num_coins = 0;
    std::vector<SparseEffect> columns[2];
    // Keys (stab * (rounds + 1) + (r - 1)) of visible L outcomes.
    std::vector<int> leak_keys;
    // Coin standing for the constant 1 when fixed Paulis were injected, else -1.
    int constant = -1;
};

/// Propagates one injected fault from a clean frame. When stop_early is set
/// the run halts at the first round boundary without leaked atoms and maps
/// residual data errors to the next detectors.
SymbolicEffect propagate_symbolic(const ToricLayout& L, const GateSequence& seq, int rounds, const InjectedFault& f,
                                  bool stop_early = true);
/// Several faults in one run; they share the coin budget.
SymbolicEffect propagate_symbolic(const ToricLayout& L, const GateSequence& seq, int rounds,
                                  const std::vector<InjectedFault>& faults, bool stop_early = true);

/// Effect of a residual data error on position e after round t (0..rounds).
SparseEffect data_error_effect(const ToricLayout& L, int rounds, Basis basis, int e, int t);
/// Effect of a flipped syndrome of stabilizer s in round t.
SparseEffect meas_error_effect(const ToricLayout& L, int rounds, int s, int t);

/// Row-reduced span of a set of columns.
std::vector<SparseEffect> span_basis(const std::vector<SparseEffect>& cols);
bool same_span(const std::vector<SparseEffect>& a, const std::vector<SparseEffect>& b);
std::vector<SparseEffect> enumerate_span(const std::vector<SparseEffect>& basis);

}  // namespace slru

#endif
