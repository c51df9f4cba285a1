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

#include "fault_tables.hpp"

#include <cctype>
#include <sstream>
#include <stdexcept>

namespace slru {

namespace {

const char* kA1[10] = {
    "D1e(0) D4e(1)",
    "V(D2o(1) M2o(1)) V(D3o(1) M3o(1)) D4e(1)",
    "V(D3o(1) M3o(1)) D4e(1)",
    "D4e(1)",
    "D4e(1)",
    "D4e(1)",
    "D4e(1) M2z(2)",
    "D4e(2) M3z(2)",
    "D4e(2)",
    "0",
};

const char* kA2[10] = {
    "M4z(1) M4z(2) M1z(2) (Do(1)) Do(2)",
    "M4z(1) M4z(2) M1z(2) (Do(1)) Do(2)",
    "M4z(1) M4z(2) M1z(2) (Do(1)) Do(2)",
    "M4z(1) M4z(2) M1z(2) (Do(1)) Do(2)",
    "M4z(2) M1z(2) (Do(1)) Do(2)",
    "M4z(2) M1z(2) Do(2)",
    "M4z(2) Do(2)",
    "M4z(2) Do(2)",
    "M4z(2) Do(2)",
    "M4z(2) Do(2)",
};

// Rows XX, XI, IX.
const char* kA3[3][5] = {
    {"I", "D1e(-1)", "D3o M3 D4e", "D4e", "D4e"},
    {"D1e(-1)", "D3o M3 D4e", "D4e", "D4e", "D4e"},
    {"D1e(-1)", "D2o M2", "D3o M3", "I", "I"},
};

const char* kA4[3][5] = {
    {"D1o(-1)", "D2e(-1)", "D3e M4", "M4", "D4o M4"},
    {"M4", "M4", "M4", "D4o", "D4o"},
    {"M1 D1o", "D2e(-1) M4", "D3e", "D4o M4", "M4"},
};

int type_row(PauliClass t) {
    switch (t) {
        case PauliClass::XX: return 0;
        case PauliClass::XI: return 1;
        case PauliClass::IX: return 2;
        default: throw std::invalid_argument("trivial Pauli class has no table row");
    }
}

class TermParser {
   public:
    TermParser(const std::string& s, const TermContext& ctx) : s_(s), ctx_(ctx) {}

    std::vector<SparseEffect> parse_all() {
        std::vector<SparseEffect> cols;
        skip();
        while (i_ < s_.size()) {
            bool conditional = false;
            SparseEffect eff;
            if (s_.compare(i_, 2, "V(") == 0) {
                i_ += 2;
                skip();
                in_group_ = true;
                while (peek() != ')') {
                    eff.add(atom());
                    skip();
                }
                in_group_ = false;
                i_++;
            } else if (peek() == '(') {
                i_++;
                eff = atom();
                expect(')');
                conditional = true;
            } else if (peek() == 'I' || peek() == '0') {
                i_++;
                skip();
                continue;
            } else {
                eff = atom();
            }
            if (dropped_) {
                dropped_ = false;
            } else if (!conditional || ctx_.final_round) {
                if (ctx_.pauli && !cols.empty()) {
                    cols[0].add(eff);
                } else {
                    cols.push_back(eff);
                }
            }
            skip();
        }
        return cols;
    }

   private:
    char peek() const { return i_ < s_.size() ? s_[i_] : '\0'; }
    void skip() {
        while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) i_++;
    }
    void expect(char c) {
        if (peek() != c) throw std::invalid_argument("bad table term near '" + s_.substr(i_) + "'");
        i_++;
    }
    int number() {
        bool neg = false;
        if (peek() == '-') {
            neg = true;
            i_++;
        }
        if (!std::isdigit(static_cast<unsigned char>(peek()))) throw std::invalid_argument("expected number");
        int v = 0;
        while (std::isdigit(static_cast<unsigned char>(peek()))) v = v * 10 + (s_[i_++] - '0');
        return neg ? -v : v;
    }
    bool has_epoch() const { return peek() == '(' && i_ + 1 < s_.size() && s_[i_ + 1] != 'D' && s_[i_ + 1] != 'M'; }

    // Absolute round for an epoch label.
    int round_of(bool present, int t) const {
        if (ctx_.pauli) return present ? ctx_.base_round + t : ctx_.base_round;
        if (!present) throw std::invalid_argument("leakage term needs an epoch");
        return ctx_.base_round - 1 + t;
    }

    SparseEffect atom() {
        const auto& L = *ctx_.layout;
        const auto& sup = L.support[ctx_.stab];
        char kind = peek();
        i_++;
        int k = 4;
        if (std::isdigit(static_cast<unsigned char>(peek()))) k = s_[i_++] - '0';
        if (k < 1 || k > 4) throw std::invalid_argument("partner index must be 1..4");
        char tag = ' ';
        if (peek() == 'e' || peek() == 'o' || peek() == 'z') tag = s_[i_++];
        bool present = false;
        int t = 0;
        if (has_epoch()) {
            i_++;
            t = number();
            expect(')');
            present = true;
        }
        if (kind == 'D') {
            int e = sup[k - 1];
            if ((tag == 'o') != L.odd_line[e]) throw std::logic_error("line parity disagrees with partner index");
            int r = round_of(present, t);
            if (r > ctx_.rounds) return drop();
            return data_error_effect(L, ctx_.rounds, Basis::X, e, r);
        }
        if (kind == 'M') {
            int s = -1;
            if (tag == 'z') {
                int edge = sup[kN];
                for (int p = L.d * L.d; p < L.num_stabs(); p++) {
                    if (L.support[p][k - 1] == edge) s = p;
                }
            } else {
                int e = sup[k - 1];
                if (tag == 'o' && !L.odd_line[e]) throw std::logic_error("line parity disagrees with partner index");
                s = L.owner[e];
            }
            if (s < 0 || L.kind(s) != StabKind::Z) throw std::logic_error("measurement term is not a Z check");
            int r = round_of(present, t);
            if (r > ctx_.rounds) return drop();
            return meas_error_effect(L, ctx_.rounds, s, r);
        }
        throw std::invalid_argument("unknown table term");
    }

    // Terms past the last round do not happen; V groups lose only that member.
    SparseEffect drop() {
        if (!in_group_) dropped_ = true;
        return {};
    }

    const std::string& s_;
    const TermContext& ctx_;
    size_t i_ = 0;
    bool dropped_ = false;
    bool in_group_ = false;
};

struct AtomSite {
    int round;
    int step;
    int index;
    Leaked side;
};

// Gates touching the atom that is the ancilla of `stab` in round r0 and then
// holds data N(stab) in round r0 + 1, in error-site order.
std::vector<AtomSite> atom_sites(const ToricLayout& L, const GateSequence& seq, int stab, int r0, bool include_data) {
    std::vector<AtomSite> out;
    int anc = L.num_data() + stab;
    int edge = L.support[stab][kN];
    for (int step = 0; step < 5; step++) {
        const auto& g = seq.steps[step][stab];
        out.push_back({r0, step, stab, g.control == anc ? Leaked::Control : Leaked::Target});
    }
    if (!include_data) return out;
    for (int step = 0; step < 5; step++) {
        const auto& gates = seq.steps[step];
        for (int i = 0; i < static_cast<int>(gates.size()); i++) {
            if (gates[i].control == edge) out.push_back({r0 + 1, step, i, Leaked::Control});
            if (gates[i].target == edge) out.push_back({r0 + 1, step, i, Leaked::Target});
        }
    }
    return out;
}

// Each golden column is one 50% term. The derived coins match the marginal
// form when every derived column is a combination of golden terms and every
// term is driven by a nonzero combination of coins.
bool marginal_match(const std::vector<SparseEffect>& golden, const std::vector<SparseEffect>& derived) {
    size_t k = golden.size();
    if (k > 16) throw std::logic_error("too many table terms");
    if (span_basis(golden).size() != k) return span_basis(golden) == span_basis(derived);
    uint32_t used = 0;
    for (const auto& col : derived) {
        bool found = false;
        for (uint32_t m = 0; m < (1u << k) && !found; m++) {
            SparseEffect acc;
            for (size_t i = 0; i < k; i++) {
                if (m >> i & 1) acc.add(golden[i]);
            }
            if (acc == col) {
                used |= m;
                found = true;
            }
        }
        if (!found) return false;
    }
    return used == (1u << k) - 1;
}

}  // namespace

const char* table_name(TableId t) {
    switch (t) {
        case TableId::A1: return "A1";
        case TableId::A2: return "A2";
        case TableId::A3: return "A3";
        default: return "A4";
    }
}

std::string golden_leak_row(TableId table, int site) {
    if (site < 1 || site > 10) return "";
    if (table == TableId::A1) return kA1[site - 1];
    if (table == TableId::A2) return kA2[site - 1];
    return "";
}

std::string golden_pauli_cell(TableId table, PauliClass type, int site) {
    if (site < 1 || site > 5) return "";
    if (table == TableId::A3) return kA3[type_row(type)][site - 1];
    if (table == TableId::A4) return kA4[type_row(type)][site - 1];
    return "";
}

std::vector<SparseEffect> parse_terms(const std::string& text, const TermContext& ctx) {
    TermParser p(text, ctx);
    return p.parse_all();
}

SparseEffect depolarization_effect(const ToricLayout& L, Variant variant, PauliClass type, StabKind ancilla_kind,
                                   int site) {
    if (site < 1 || site > 5) throw std::invalid_argument("site must be 1..5");
    auto seq = gate_sequence(L, variant);
    if (site > seq.physical_slots()) throw std::invalid_argument("site is virtual in this variant");
    int rounds = 4, r0 = 2;
    int stab = ancilla_kind == StabKind::X ? L.xstab(1, 1) : L.zstab(1, 1);
    InjectedFault f;
    f.round = r0;
    f.step = site - 1;
    f.index = stab;
    f.pauli_generators = true;
    auto eff = propagate_symbolic(L, seq, rounds, f);
    const auto& g = seq.steps[site - 1][stab];
    bool anc_is_control = g.control == L.num_data() + stab;
    // Generator coins: x_control, z_control, x_target, z_target.
    const auto& cols = eff.columns[0];
    const SparseEffect& xa = cols[anc_is_control ? 0 : 2];
    const SparseEffect& xd = cols[anc_is_control ? 2 : 0];
    SparseEffect out;
    if (type == PauliClass::XX || type == PauliClass::XI) out.add(xa);
    if (type == PauliClass::XX || type == PauliClass::IX) out.add(xd);
    return out;
}

std::vector<FaultTableEntry> derive_fault_tables(const ToricLayout& L, Variant variant, bool strict) {
    auto seq = gate_sequence(L, variant);
    std::vector<FaultTableEntry> out;
    int physical = seq.physical_slots();

    for (TableId table : {TableId::A1, TableId::A2}) {
        int stab = table == TableId::A1 ? L.xstab(1, 1) : L.zstab(1, 1);
        for (bool final_round : {false, true}) {
            int rounds = final_round ? 2 : 4;
            int r0 = 2;
            auto sites = atom_sites(L, seq, stab, r0, !final_round);
            for (int idx = 0; idx < static_cast<int>(sites.size()); idx++) {
                int site = idx + 1;
                int slot = idx % 5 + 1;
                if (slot > physical) continue;
                const auto& as = sites[idx];
                InjectedFault f;
                f.round = as.round;
                f.step = as.step;
                f.index = as.index;
                f.leaked = as.side;
                auto eff = propagate_symbolic(L, seq, rounds, f);
                FaultTableEntry e;
                e.table = table;
                e.final_round = final_round;
                e.site = site;
                e.golden = golden_leak_row(table, site);
                TermContext ctx{&L, rounds, stab, r0, false, final_round};
                auto cols = parse_terms(e.golden, ctx);
                e.golden_span = span_basis(cols);
                e.derived_span = span_basis(eff.columns[0]);
                e.joint_match = e.golden_span == e.derived_span;
                e.match = marginal_match(cols, eff.columns[0]);
                if (strict && !e.match) throw std::runtime_error("fault table mismatch: " + describe(e));
                out.push_back(std::move(e));
            }
        }
    }

    for (TableId table : {TableId::A3, TableId::A4}) {
        StabKind kind = table == TableId::A3 ? StabKind::X : StabKind::Z;
        int stab = kind == StabKind::X ? L.xstab(1, 1) : L.zstab(1, 1);
        for (PauliClass type : {PauliClass::XX, PauliClass::XI, PauliClass::IX}) {
            for (int site = 1; site <= physical; site++) {
                FaultTableEntry e;
                e.table = table;
                e.site = site;
                e.type = type;
                e.golden = golden_pauli_cell(table, type, site);
                TermContext ctx{&L, 4, stab, 2, true, false};
                auto cols = parse_terms(e.golden, ctx);
                SparseEffect want;
                for (auto& c : cols) want.add(c);
                SparseEffect got = depolarization_effect(L, variant, type, kind, site);
                if (!want.empty()) e.golden_span = {want};
                if (!got.empty()) e.derived_span = {got};
                e.match = want == got;
                e.joint_match = e.match;
                if (strict && !e.match) throw std::runtime_error("fault table mismatch: " + describe(e));
                out.push_back(std::move(e));
            }
        }
    }
    return out;
}

static std::string effects_text(const std::vector<SparseEffect>& v) {
    std::ostringstream out;
    out << "{";
    for (size_t i = 0; i < v.size(); i++) {
        if (i) out << "; ";
        for (size_t j = 0; j < v[i].dets.size(); j++) out << (j ? " " : "") << v[i].dets[j];
        if (v[i].obs) out << " L" << int(v[i].obs);
    }
    out << "}";
    return out.str();
}

std::string describe(const FaultTableEntry& e) {
    std::ostringstream out;
    out << table_name(e.table);
    if (e.table == TableId::A3 || e.table == TableId::A4) out << " " << pauli_class_name(e.type);
    out << " site " << e.site << (e.final_round ? " (last round)" : "") << ": " << e.golden << "  "
        << (e.match ? "OK" : "MISMATCH");
    if (e.match && !e.joint_match) out << " (terms share coins)";
    if (!e.match) {
        out << "  golden " << effects_text(e.golden_span) << " derived " << effects_text(e.derived_span);
    }
    return out.str();
}

}  // namespace slru
