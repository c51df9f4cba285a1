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

#ifndef SWAPLRU_FAULT_TABLES_HPP
#define SWAPLRU_FAULT_TABLES_HPP

#include <string>
#include <vector>

#include "lattice.hpp"
#include "noise.hpp"
#include "propagation.hpp"

namespace slru {

enum class TableId { A1, A2, A3, A4 };

const char* table_name(TableId t);

/// One row (leakage tables) or cell (depolarization tables).
///
/// Leakage terms: D<k><e|o>(t) is a 50% X error on data partner k of the
/// atom's stabilizer after round t (0 = before the ancilla round, 1 = after
/// it, 2 = after the data round). Do(t) names the atom's own data edge.
/// M<k>z(t) flips the Z check whose partner k is the atom's data edge;
/// M<k>o(t) flips the Z check that swaps with data partner k. V(...) groups
/// terms sharing one coin. A parenthesized term only matters in the last round.
///
/// Depolarization terms are deterministic: D<k><e|o> after this round,
/// D<k><e|o>(-1) before it, M<k> the check that swaps with data partner k.
struct FaultTableEntry {
    TableId table = TableId::A1;
    bool final_round = false;
    int site = 0;
    PauliClass type = PauliClass::Trivial;
    std::string golden;
    std::vector<SparseEffect> golden_span;
    std::vector<SparseEffect> derived_span;
    // match compares 50% marginals; joint_match also requires independent terms.
    bool match = false;
    bool joint_match = false;
};

/// Embedded golden text for a row or cell; empty string when not present.
std::string golden_leak_row(TableId table, int site);
std::string golden_pauli_cell(TableId table, PauliClass type, int site);

struct TermContext {
    const ToricLayout* layout = nullptr;
    int rounds = 0;
    int stab = 0;
    int base_round = 1;
    bool pauli = false;
    bool final_round = false;
};

/// Parses table text into effect columns (one per independent coin, or one
/// deterministic vector for depolarization cells).
std::vector<SparseEffect> parse_terms(const std::string& text, const TermContext& ctx);

/// Derives every entry by symbolic propagation and compares it with the
/// embedded tables. Throws std::runtime_error on the first mismatch when
/// strict is set.
std::vector<FaultTableEntry> derive_fault_tables(const ToricLayout& layout, Variant variant, bool strict = false);

/// Deterministic effect of a two-qubit Pauli class at an X- or Z-check slot.
SparseEffect depolarization_effect(const ToricLayout& layout, Variant variant, PauliClass type, StabKind ancilla_kind,
                                   int site);

std::string describe(const FaultTableEntry& e);

}  // namespace slru

#endif
