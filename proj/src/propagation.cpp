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

#include "propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace slru {

std::vector<KrausOutcome> propagate_kraus_cnot(Jump jump, Side side) {
    if (side == Side::Control) {
        return {{jump, jump == Jump::K1L, false, 1.0}};
    }
    std::vector<KrausOutcome> out;
    for (Jump j : {Jump::K0L, Jump::K1L}) {
        for (bool z : {false, true}) out.push_back({j, false, z, 0.25});
    }
    return out;
}

void apply_fault(FrameEngine<uint8_t>& eng, int c, int t, const GateFault& f) {
    auto& C = eng.atom(c);
    auto& T = eng.atom(t);
    if (f.kind == FaultKind::None || C.leaked || T.leaked) return;
    if (f.kind == FaultKind::Depolarize) {
        C.x ^= f.pauli_control & 1;
        C.z ^= f.pauli_control >> 1;
        T.x ^= f.pauli_target & 1;
        T.z ^= f.pauli_target >> 1;
        return;
    }
    uint8_t jc = f.jump_control == Jump::K1L;
    uint8_t jt = f.jump_target == Jump::K1L;
    switch (f.leaked) {
        case Leaked::Control:
            eng.leak(c, jc, f.detect_control);
            T.x ^= f.companion;
            break;
        case Leaked::Target:
            eng.leak(t, jt, f.detect_target);
            C.z ^= f.companion;
            break;
        case Leaked::Both:
            eng.leak(c, jc, f.detect_control);
            eng.leak(t, jt, f.detect_target);
            break;
    }
}

void sample_shot_faults(Rng& rng, const NoiseConfig& cfg, int64_t num_gates, std::vector<ScheduledFault>& out) {
    out.clear();
    if (cfg.p <= 0.0) return;
    if (cfg.p >= 1.0) {
        for (int64_t g = 0; g < num_gates; g++) out.push_back({g, sample_fault_given_error(rng, cfg)});
        return;
    }
    double lq = std::log1p(-cfg.p);
    int64_t g = -1;
    for (;;) {
        double u = 1.0 - uniform01(rng);
        double skip = std::floor(std::log(u) / lq);
        if (skip >= static_cast<double>(num_gates)) break;
        g += 1 + static_cast<int64_t>(skip);
        if (g >= num_gates) break;
        out.push_back({g, sample_fault_given_error(rng, cfg)});
    }
}

static uint8_t parity_over(const std::vector<uint8_t>& bits, const std::vector<int>& support) {
    uint8_t p = 0;
    for (int e : support) p ^= bits[e];
    return p;
}

void run_shot(const ToricLayout& L, const GateSequence& seq, int rounds, const std::vector<ScheduledFault>& faults,
              Rng& rng, FrameEngine<uint8_t>& eng, ShotRecord& rec) {
    int ns = L.num_stabs();
    rec.d = L.d;
    rec.rounds = rounds;
    rec.meas.assign(static_cast<size_t>(ns) * rounds, 0);
    rec.leak.assign(static_cast<size_t>(ns) * (rounds + 1), 0);
    rec.final_x.assign(L.num_data(), 0);
    rec.final_z.assign(L.num_data(), 0);
    rec.num_faults = static_cast<int>(faults.size());
    eng.clear();
    RandomCoins coins{&rng};
    size_t fi = 0;
    for (int r = 1; r <= rounds; r++) {
        eng.run_round(
            r, coins,
            [&](int step, int i, int c, int t) {
                if (fi >= faults.size()) return;
                int64_t g = gate_index(L, seq, r, step, i);
                while (fi < faults.size() && faults[fi].gate == g) {
                    apply_fault(eng, c, t, faults[fi].fault);
                    fi++;
                }
            },
            [&](int s, uint8_t outcome, bool leaked, bool visible) {
                rec.meas[static_cast<size_t>(s) * rounds + (r - 1)] = outcome;
                rec.leak[static_cast<size_t>(s) * (rounds + 1) + (r - 1)] = leaked && visible;
            });
    }
    eng.read_data(rounds, coins, [&](int e, uint8_t x, uint8_t z, bool leaked, bool visible) {
        rec.final_x[e] = x;
        rec.final_z[e] = z;
        rec.leak[static_cast<size_t>(L.owner[e]) * (rounds + 1) + rounds] = leaked && visible;
    });
    rec.logical[kX1] = parity_over(rec.final_x, L.logical[kZ1]);
    rec.logical[kX2] = parity_over(rec.final_x, L.logical[kZ2]);
    rec.logical[kZ1] = parity_over(rec.final_z, L.logical[kX1]);
    rec.logical[kZ2] = parity_over(rec.final_z, L.logical[kX2]);
}

ShotRecord simulate_shot(const ToricLayout& L, const NoiseConfig& cfg, Rng& rng, int rounds) {
    if (rounds <= 0) rounds = L.d;
    auto seq = gate_sequence(L, cfg.variant);
    FrameEngine<uint8_t> eng(L, seq);
    std::vector<ScheduledFault> faults;
    int64_t num_gates = static_cast<int64_t>(rounds) * seq.physical_slots() * L.num_stabs();
    sample_shot_faults(rng, cfg, num_gates, faults);
    ShotRecord rec;
    run_shot(L, seq, rounds, faults, rng, eng, rec);
    return rec;
}

std::string ShotRecord::to_csv_trace() const {
    std::ostringstream out;
    out << "kind,stab_or_data,round,value,leak\n";
    int ns = 2 * d * d;
    for (int s = 0; s < ns; s++) {
        for (int r = 1; r <= rounds; r++) {
            out << "meas," << s << "," << r << "," << int(meas[s * rounds + r - 1]) << ","
                << int(leak[s * (rounds + 1) + r - 1]) << "\n";
        }
    }
    for (size_t e = 0; e < final_x.size(); e++) {
        out << "final," << e << "," << rounds + 1 << "," << int(final_x[e]) + 2 * int(final_z[e]) << ",\n";
    }
    out << "logical,X1X2Z1Z2,," << int(logical[0]) << int(logical[1]) << int(logical[2]) << int(logical[3])
        << ",\n";
    return out.str();
}

// ---------------------------------------------------------------------------

static void xor_sorted(std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    out.reserve(a.size() + b.size());
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    a.swap(out);
}

void SparseEffect::add(const SparseEffect& o) {
    xor_sorted(dets, o.dets);
    obs ^= o.obs;
}

SparseEffect data_error_effect(const ToricLayout& L, int rounds, Basis basis, int e, int t) {
    DetectorIndex idx{L.d, rounds, basis == Basis::X ? StabKind::Z : StabKind::X};
    SparseEffect out;
    int dd = L.d * L.d;
    const auto& stabs = basis == Basis::X ? L.z_stabs_of[e] : L.x_stabs_of[e];
    for (int s : stabs) out.dets.push_back(idx.id(s % dd, t + 1));
    std::sort(out.dets.begin(), out.dets.end());
    const auto& l1 = L.logical[basis == Basis::X ? kZ1 : kX1];
    const auto& l2 = L.logical[basis == Basis::X ? kZ2 : kX2];
    if (std::find(l1.begin(), l1.end(), e) != l1.end()) out.obs |= 1;
    if (std::find(l2.begin(), l2.end(), e) != l2.end()) out.obs |= 2;
    return out;
}

SparseEffect meas_error_effect(const ToricLayout& L, int rounds, int s, int t) {
    DetectorIndex idx{L.d, rounds, L.kind(s)};
    int dd = L.d * L.d;
    SparseEffect out;
    out.dets = {idx.id(s % dd, t), idx.id(s % dd, t + 1)};
    return out;
}

namespace {

struct ColumnBuilder {
    std::vector<std::vector<int>> dets[2];
    std::vector<uint8_t> obs[2];

    void ensure(int n) {
        for (int b = 0; b < 2; b++) {
            if (static_cast<int>(dets[b].size()) < n) {
                dets[b].resize(n);
                obs[b].resize(n, 0);
            }
        }
    }
    void add(uint64_t mask, int b, const SparseEffect& eff) {
        while (mask) {
            int k = __builtin_ctzll(mask);
            mask &= mask - 1;
            ensure(k + 1);
            for (int x : eff.dets) dets[b][k].push_back(x);
            obs[b][k] ^= eff.obs;
        }
    }
};

// Gates touching an atom that is already leaked do not fault again.
void inject(FrameEngine<uint64_t>& eng, SymbolicCoins& coins, int c, int t, const InjectedFault& f, int& one) {
    auto& C = eng.atom(c);
    auto& T = eng.atom(t);
    if (C.leaked || T.leaked) return;
    if (f.fixed_pauli >= 0) {
        if (one < 0) {
            one = coins.used;
            coins.fresh();
        }
        uint64_t m = uint64_t{1} << one;
        if (f.fixed_pauli & 1) C.x ^= m;
        if (f.fixed_pauli & 2) C.z ^= m;
        if (f.fixed_pauli & 4) T.x ^= m;
        if (f.fixed_pauli & 8) T.z ^= m;
        return;
    }
    if (f.pauli_generators) {
        C.x ^= coins.fresh();
        C.z ^= coins.fresh();
        T.x ^= coins.fresh();
        T.z ^= coins.fresh();
        return;
    }
    switch (f.leaked) {
        case Leaked::Control:
            eng.leak(c, coins.fresh(), f.visible_control);
            if (f.with_companion) T.x ^= coins.fresh();
            break;
        case Leaked::Target:
            eng.leak(t, coins.fresh(), f.visible_target);
            if (f.with_companion) C.z ^= coins.fresh();
            break;
        case Leaked::Both:
            eng.leak(c, coins.fresh(), f.visible_control);
            eng.leak(t, coins.fresh(), f.visible_target);
            break;
    }
}

}  // namespace

SymbolicEffect propagate_symbolic(const ToricLayout& L, const GateSequence& seq, int rounds, const InjectedFault& f,
                                  bool stop_early) {
    return propagate_symbolic(L, seq, rounds, std::vector<InjectedFault>{f}, stop_early);
}

SymbolicEffect propagate_symbolic(const ToricLayout& L, const GateSequence& seq, int rounds,
                                  const std::vector<InjectedFault>& faults, bool stop_early) {
    if (faults.empty()) throw std::invalid_argument("no fault to propagate");
    int first = rounds + 1;
    for (const auto& f : faults) {
        if (f.round < 1 || f.round > rounds) throw std::invalid_argument("fault round out of range");
        if (f.step < 0 || f.step >= seq.physical_slots()) {
            throw std::invalid_argument("fault slot is not a physical gate");
        }
        if (f.index < 0 || f.index >= L.num_stabs()) throw std::invalid_argument("fault gate index out of range");
        first = std::min(first, f.round);
    }
    int last = first;
    for (const auto& f : faults) last = std::max(last, f.round);
    FrameEngine<uint64_t> eng(L, seq);
    SymbolicCoins coins;
    ColumnBuilder cb;
    SymbolicEffect result;
    int one = -1;

    auto residual = [&](int e, uint64_t x, uint64_t z, int epoch) {
        if (x) cb.add(x, 0, data_error_effect(L, rounds, Basis::X, e, epoch));
        if (z) cb.add(z, 1, data_error_effect(L, rounds, Basis::Z, e, epoch));
    };

    for (int r = first; r <= rounds; r++) {
        eng.run_round(
            r, coins,
            [&](int step, int i, int c, int t) {
                for (const auto& f : faults) {
                    if (r == f.round && step == f.step && i == f.index) inject(eng, coins, c, t, f, one);
                }
            },
            [&](int s, uint64_t outcome, bool leaked, bool visible) {
                if (outcome) {
                    int b = L.kind(s) == StabKind::Z ? 0 : 1;
                    cb.add(outcome, b, meas_error_effect(L, rounds, s, r));
                }
                if (leaked && visible) result.leak_keys.push_back(s * (rounds + 1) + (r - 1));
            });
        if (r == rounds) {
            eng.read_data(rounds, coins, [&](int e, uint64_t x, uint64_t z, bool leaked, bool visible) {
                residual(e, x, z, rounds);
                if (leaked && visible) result.leak_keys.push_back(L.owner[e] * (rounds + 1) + rounds);
            });
            break;
        }
        if (stop_early && r >= last && !eng.any_leaked()) {
            for (int e = 0; e < L.num_data(); e++) {
                const auto& A = eng.atom(eng.atom_at(e, r + 1));
                residual(e, A.x, A.z, r);
            }
            break;
        }
    }

    result.num_coins = coins.used;
    result.constant = one;
    cb.ensure(coins.used);
    for (int b = 0; b < 2; b++) {
        result.columns[b].resize(coins.used);
        for (int k = 0; k < coins.used; k++) {
            auto& v = cb.dets[b][k];
            std::sort(v.begin(), v.end());
            std::vector<int> out;
            for (size_t i = 0; i < v.size();) {
                size_t j = i;
                while (j < v.size() && v[j] == v[i]) j++;
                if ((j - i) & 1) out.push_back(v[i]);
                i = j;
            }
            result.columns[b][k].dets = std::move(out);
            result.columns[b][k].obs = cb.obs[b][k];
        }
    }
    std::sort(result.leak_keys.begin(), result.leak_keys.end());
    return result;
}

namespace {

// Elements: observable bit k maps to -1 - k, detectors keep their ids.
std::vector<int> to_elems(const SparseEffect& e) {
    std::vector<int> v;
    for (int k = 1; k >= 0; k--) if (e.obs >> k & 1) v.push_back(-1 - k);
    v.insert(v.end(), e.dets.begin(), e.dets.end());
    return v;
}

SparseEffect from_elems(const std::vector<int>& v) {
    SparseEffect e;
    for (int x : v) {
        if (x < 0) {
            e.obs |= static_cast<uint8_t>(1 << (-1 - x));
        } else {
            e.dets.push_back(x);
        }
    }
    return e;
}

}  // namespace

std::vector<SparseEffect> span_basis(const std::vector<SparseEffect>& cols) {
    std::vector<std::vector<int>> basis;
    for (const auto& c : cols) {
        auto v = to_elems(c);
        for (const auto& b : basis) {
            if (std::binary_search(v.begin(), v.end(), b.front())) xor_sorted(v, b);
        }
        if (v.empty()) continue;
        for (auto& b : basis) {
            if (std::binary_search(b.begin(), b.end(), v.front())) xor_sorted(b, v);
        }
        basis.push_back(std::move(v));
    }
    std::sort(basis.begin(), basis.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    std::vector<SparseEffect> out;
    for (const auto& b : basis) out.push_back(from_elems(b));
    return out;
}

bool same_span(const std::vector<SparseEffect>& a, const std::vector<SparseEffect>& b) {
    return span_basis(a) == span_basis(b);
}

std::vector<SparseEffect> enumerate_span(const std::vector<SparseEffect>& basis) {
    size_t k = basis.size();
    if (k > 20) throw std::runtime_error("span too large to enumerate");
    std::vector<SparseEffect> out;
    SparseEffect cur;
    for (uint64_t i = 1; i < (uint64_t{1} << k); i++) {
        int bit = __builtin_ctzll(i);
        cur.add(basis[bit]);
        out.push_back(cur);
    }
    return out;
}

}  // namespace slru
