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

#ifndef SWAPLRU_LATTICE_HPP
#define SWAPLRU_LATTICE_HPP

#include <array>
#include <string>
#include <vector>

namespace slru {

enum class Variant { FiveCnot, FeedForward };
enum class StabKind { X, Z };

// Partner slots of a stabilizer, in the order the ancilla meets them.
enum Partner : int { kS = 0, kW = 1, kE = 2, kN = 3 };

enum Logical : int { kX1 = 0, kX2 = 1, kZ1 = 2, kZ2 = 3 };

/// Distance-d toric code.
///
/// Vertices (i, j) carry X stabilizers, plaquettes carry Z stabilizers.
/// Horizontal edge h(i, j) joins vertex (i, j) and (i, j + 1); vertical edge
/// v(i, j) joins vertex (i, j) and (i + 1, j). Rows grow downward.
///
/// Indices: data h(i, j) = i*d + j, data v(i, j) = d*d + i*d + j,
/// X stabilizer at vertex (i, j) = i*d + j, Z stabilizer p(i, j) = d*d + i*d + j.
struct ToricLayout {
    int d = 0;

    // support[s] = data index of partners S, W, E, N.
    std::vector<std::array<int, 4>> support;
    // x_stabs_of[e], z_stabs_of[e]: the two stabilizers of each type touching e.
    std::vector<std::array<int, 2>> x_stabs_of;
    std::vector<std::array<int, 2>> z_stabs_of;
    // owner[e]: the stabilizer whose N partner is e.
    std::vector<int> owner;
    // odd_line[e]: horizontal edges sit on odd lines of the physical grid.
    std::vector<bool> odd_line;
    std::array<std::vector<int>, 4> logical;

    int num_data() const { return 2 * d * d; }
    int num_stabs() const { return 2 * d * d; }
    int num_sites() const { return 4 * d * d; }
    int h(int i, int j) const { return wrap(i) * d + wrap(j); }
    int v(int i, int j) const { return d * d + wrap(i) * d + wrap(j); }
    int xstab(int i, int j) const { return wrap(i) * d + wrap(j); }
    int zstab(int i, int j) const { return d * d + wrap(i) * d + wrap(j); }
    StabKind kind(int s) const { return s < d * d ? StabKind::X : StabKind::Z; }
    int row(int s_or_e) const { return (s_or_e % (d * d)) / d; }
    int col(int s_or_e) const { return (s_or_e % (d * d)) % d; }
    int wrap(int k) const { return ((k % d) + d) % d; }

    // Physical grid coordinates (row, col) in a 2d x 2d grid.
    std::array<int, 2> data_coord(int e) const;
    std::array<int, 2> stab_coord(int s) const;
};

ToricLayout build_layout(int d);

/// Role positions: data e is position e, the ancilla of stabilizer s is
/// position 2d^2 + s. In round 0 the atom at physical site k holds position k.
struct RoleSchedule {
    int round = 0;
    // atom_at[position] = physical site holding that role this round.
    std::vector<int> atom_at;
    // swap_pairs: (data position, ancilla position) exchanged before the next round.
    std::vector<std::array<int, 2>> swap_pairs;
};

RoleSchedule role_schedule(const ToricLayout& layout, int round);

/// One CNOT of the extraction circuit, in role positions.
struct GateSlot {
    int stab = 0;
    int slot = 0;  // 1..5
    int control = 0;
    int target = 0;
    bool virtual_gate = false;
};

/// steps[t] holds every CNOT of time step t + 1.
struct GateSequence {
    Variant variant = Variant::FiveCnot;
    std::vector<std::vector<GateSlot>> steps;
    int physical_slots() const { return variant == Variant::FiveCnot ? 5 : 4; }
};

GateSequence gate_sequence(const ToricLayout& layout, Variant variant);

/// Symplectic overlap parity between two supports.
int overlap_parity(const std::vector<int>& a, const std::vector<int>& b);

std::string dump_layout(const ToricLayout& layout, Variant variant);

const char* variant_name(Variant v);

}  // namespace slru

#endif
