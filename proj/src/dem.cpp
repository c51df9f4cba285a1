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

#include "dem.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace slru {

const char* decoder_name(DecoderKind k) {
    switch (k) {
        case DecoderKind::Trivial: return "trivial";
        case DecoderKind::Located: return "located";
        default: return "critical";
    }
}

DecoderKind parse_decoder(const std::string& s) {
    if (s == "trivial") return DecoderKind::Trivial;
    if (s == "located") return DecoderKind::Located;
    if (s == "critical") return DecoderKind::Critical;
    throw std::invalid_argument("unknown decoder '" + s + "'");
}

double edge_weight(double p) {
    if (p <= 0.0) return std::numeric_limits<double>::infinity();
    if (p >= 0.5) return 0.0;
    return std::log((1.0 - p) / p);
}

int DetectorGraph::find_edge(int a, int b, uint8_t obs) const {
    if (a > b) std::swap(a, b);
    if (a < 0 || a >= static_cast<int>(lookup_.size())) return -1;
    for (auto [other, e] : lookup_[a]) {
        if (other == b && edges[e].obs == obs) return e;
    }
    return -1;
}

int DetectorGraph::add_edge(const SparseEffect& eff, double p) {
    if (eff.dets.size() != 2) throw std::logic_error("edge needs exactly two detectors");
    int a = eff.dets[0], b = eff.dets[1];
    if (lookup_.empty()) lookup_.resize(num_detectors);
    int e = find_edge(a, b, eff.obs);
    if (e >= 0) {
        edges[e].prior = xor_prob(edges[e].prior, p);
        return e;
    }
    GraphEdge g;
    g.a = a;
    g.b = b;
    g.obs = eff.obs;
    g.prior = p;
    DetectorIndex idx{d, rounds, basis == Basis::X ? StabKind::Z : StabKind::X};
    int sa = idx.stab_of(a), sb = idx.stab_of(b);
    int ta = idx.time_of(a), tb = idx.time_of(b);
    int offset = basis == Basis::X ? d * d : 0;
    if (sa == sb && tb == ta + 1) {
        g.kind = EdgeKind::Measurement;
        g.site = offset + sa;
        g.time = ta;
    } else if (ta == tb) {
        g.kind = EdgeKind::Data;
        g.time = ta - 1;
    }
    e = static_cast<int>(edges.size());
    edges.push_back(g);
    lookup_[a].push_back({b, e});
    return e;
}

void DetectorGraph::finalize() {
    int n = num_detectors;
    adj_start.assign(n + 1, 0);
    for (const auto& e : edges) {
        adj_start[e.a + 1]++;
        adj_start[e.b + 1]++;
    }
    for (int u = 0; u < n; u++) adj_start[u + 1] += adj_start[u];
    adj.assign(adj_start[n], 0);
    std::vector<int> fill(adj_start.begin(), adj_start.end() - 1);
    for (int e = 0; e < static_cast<int>(edges.size()); e++) {
        adj[fill[edges[e].a]++] = e;
        adj[fill[edges[e].b]++] = e;
    }
    double wmax = 1.0;
    for (const auto& e : edges) {
        double w = edge_weight(e.prior);
        if (std::isfinite(w)) wmax = std::max(wmax, w);
    }
    // Leave headroom so that sums over any path and the matching duals fit.
    int bits = 40;
    while (bits > 20 && std::ldexp(wmax * std::max(n, 1), bits) > std::ldexp(1.0, 48)) bits--;
    scale = std::ldexp(1.0, bits);
    prob.resize(edges.size());
    weight.resize(edges.size());
    iweight.resize(edges.size());
    for (int e = 0; e < static_cast<int>(edges.size()); e++) set_prob(e, edges[e].prior);
}

void DetectorGraph::set_prob(int e, double p) {
    prob[e] = p;
    weight[e] = edge_weight(p);
    iweight[e] = std::isfinite(weight[e]) ? std::llround(weight[e] * scale) : -1;
}

void DetectorGraph::set_weight(int e, double w) {
    if (w < 0.0) throw std::invalid_argument("negative edge weight");
    prob[e] = 1.0 / (1.0 + std::exp(w));
    weight[e] = w;
    iweight[e] = std::llround(w * scale);
}

std::string DetectorGraph::dump() const {
    std::ostringstream out;
    out << "# graph basis=" << (basis == Basis::X ? "X" : "Z") << " d=" << d << " rounds=" << rounds
        << " detectors=" << num_detectors << " edges=" << edges.size() << "\n";
    out << std::setprecision(10);
    for (int e = 0; e < static_cast<int>(edges.size()); e++) {
        const auto& g = edges[e];
        out << g.a << " " << g.b << " " << prob[e] << " " << weight[e] << " " << int(g.obs) << " ";
        switch (g.kind) {
            case EdgeKind::Data: out << "D" << g.site << "@" << g.time; break;
            case EdgeKind::Measurement: out << "M" << g.site << "@" << g.time; break;
            default: out << "J"; break;
        }
        out << "\n";
    }
    return out.str();
}

int detector_of(const ToricLayout& L, const DetectorGraph& g, int stab, int t) {
    DetectorIndex idx{L.d, g.rounds, L.kind(stab)};
    return idx.id(stab % (L.d * L.d), t);
}

namespace {

std::vector<int> elems(const SparseEffect& e) {
    std::vector<int> v;
    for (int k = 1; k >= 0; k--) {
        if (e.obs >> k & 1) v.push_back(-1 - k);
    }
    v.insert(v.end(), e.dets.begin(), e.dets.end());
    return v;
}

void xor_into(std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_symmetric_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    a.swap(out);
}

// Incremental GF(2) independence test.
struct Reducer {
    std::vector<std::vector<int>> rows;
    bool insert(const SparseEffect& e) {
        auto v = elems(e);
        for (const auto& r : rows) {
            if (std::binary_search(v.begin(), v.end(), r.front())) xor_into(v, r);
        }
        if (v.empty()) return false;
        for (auto& r : rows) {
            if (std::binary_search(r.begin(), r.end(), v.front())) xor_into(r, v);
        }
        rows.push_back(std::move(v));
        return true;
    }
};

void check_detectable(const SparseEffect& e) {
    if (e.dets.empty() && e.obs) throw std::runtime_error("single fault flips a logical without any detector");
}

// Every coin is its own 50% mechanism; combinations arise from independence.
std::vector<SparseEffect> coin_mechanisms(const std::vector<SparseEffect>& cols) {
    std::vector<SparseEffect> out;
    for (const auto& c : cols) {
        if (c.empty()) continue;
        check_detectable(c);
        out.push_back(c);
    }
    return out;
}

bool decompose_rec(const DetectorGraph& g, std::vector<int> dets, uint8_t obs, std::vector<int>& out) {
    if (dets.empty()) return obs == 0;
    int a = dets[0];
    for (size_t j = 1; j < dets.size(); j++) {
        int b = dets[j];
        std::vector<int> rest;
        for (size_t k = 1; k < dets.size(); k++) {
            if (k != j) rest.push_back(dets[k]);
        }
        for (uint8_t o = 0; o < 4; o++) {
            int e = g.find_edge(a, b, o);
            if (e < 0) continue;
            out.push_back(e);
            if (decompose_rec(g, rest, obs ^ o, out)) return true;
            out.pop_back();
        }
    }
    return false;
}

// Splits a multi-detector vector into existing edges.
std::vector<int> decompose(const DetectorGraph& g, const SparseEffect& eff) {
    if (eff.dets.size() % 2 || eff.dets.size() > 10) {
        throw std::runtime_error("fault effect is not a union of graph edges");
    }
    std::vector<int> out;
    if (!decompose_rec(g, eff.dets, eff.obs, out)) {
        throw std::runtime_error("fault effect is not a union of graph edges");
    }
    return out;
}

struct Pending {
    SparseEffect eff;
    double p;
    int site;  // index into the site records or -1
};

struct SiteRecord {
    int key;
    std::vector<int> edges;
};

}  // namespace

DetectorGraph build_base_graph(const ToricLayout& L, const NoiseConfig& cfg, Basis basis, int rounds) {
    cfg.validate();
    if (rounds <= 0) rounds = L.d;
    auto seq = gate_sequence(L, cfg.variant);
    DetectorGraph g;
    g.d = L.d;
    g.rounds = rounds;
    g.basis = basis;
    g.num_detectors = L.d * L.d * (rounds + 1);
    int nkeys = L.num_stabs() * (rounds + 1);
    g.located.assign(nkeys, {});
    g.located_sites.assign(nkeys, 0);
    g.critical.assign(nkeys, {});
    int b = basis == Basis::X ? 0 : 1;
    StabKind critical_kind = basis == Basis::X ? StabKind::Z : StabKind::X;

    double pp = cfg.pp();
    double single = cfg.pe() * (1.0 - cfg.eta) / 2.0;

    std::vector<Pending> pending;
    std::vector<SiteRecord> sites;

    auto place = [&](const SparseEffect& v, double p, int site) {
        if (v.empty()) return;
        if (v.dets.size() == 2) {
            int e = g.add_edge(v, p);
            if (site >= 0) sites[site].edges.push_back(e);
        } else {
            pending.push_back({v, p, site});
        }
    };

    for (int r = 1; r <= rounds; r++) {
        for (int step = 0; step < seq.physical_slots(); step++) {
            for (int i = 0; i < L.num_stabs(); i++) {
                InjectedFault f;
                f.round = r;
                f.step = step;
                f.index = i;
                if (pp > 0.0) {
                    f.pauli_generators = true;
                    auto eff = propagate_symbolic(L, seq, rounds, f);
                    const auto& cols = eff.columns[b];
                    for (int k = 1; k < 16; k++) {
                        SparseEffect v;
                        for (int c = 0; c < 4; c++) {
                            if (k >> c & 1) v.add(cols[c]);
                        }
                        check_detectable(v);
                        place(v, pp / 15.0, -1);
                    }
                    f.pauli_generators = false;
                }
                if (cfg.pe() <= 0.0) continue;
                // Double leaks are sampled but not modeled by the decoders; the
                // critical decoder only learns where their data errors land.
                for (Leaked side : {Leaked::Control, Leaked::Target, Leaked::Both}) {
                    bool crit = side == Leaked::Both && step == 0 && L.kind(i) == critical_kind;
                    if (side == Leaked::Both && !crit) continue;
                    f.leaked = side;
                    auto eff = propagate_symbolic(L, seq, rounds, f);
                    if (side != Leaked::Both) {
                        if (eff.leak_keys.size() != 1) throw std::logic_error("single leak must be read out once");
                        int key = eff.leak_keys[0];
                        g.located_sites[key]++;
                        int site = static_cast<int>(sites.size());
                        sites.push_back({key, {}});
                        for (const auto& v : coin_mechanisms(eff.columns[b])) place(v, single / 2.0, site);
                    } else {
                        // The S and N partners take the data errors, surfacing in the
                        // first epoch from this round on. Either atom may be the visible one.
                        auto span = enumerate_span(span_basis(eff.columns[b]));
                        for (int x : {L.support[i][0], L.support[i][3]}) {
                            int t = r;
                            SparseEffect v;
                            for (; t <= rounds; t++) {
                                v = data_error_effect(L, rounds, basis, x, t);
                                if (std::find(span.begin(), span.end(), v) != span.end()) break;
                            }
                            if (t > rounds) throw std::logic_error("critical fault misses its data edge");
                            int e = g.add_edge(v, 0.0);
                            for (int key : eff.leak_keys) g.critical[key].push_back(e);
                        }
                        // An L outcome carries no syndrome bit: its comparison edge is erased.
                        for (int key : eff.leak_keys) {
                            int s = key / (rounds + 1), t = key % (rounds + 1) + 1;
                            if (L.kind(s) != critical_kind || t > rounds) continue;
                            g.critical[key].push_back(g.add_edge(meas_error_effect(L, rounds, s, t), 0.0));
                        }
                    }
                }
            }
        }
    }

    for (const auto& pd : pending) {
        for (int e : decompose(g, pd.eff)) {
            g.edges[e].prior = xor_prob(g.edges[e].prior, pd.p);
            if (pd.site >= 0) sites[pd.site].edges.push_back(e);
        }
    }
    std::vector<std::map<int, int>> key_edges(nkeys);
    for (auto& sr : sites) {
        std::sort(sr.edges.begin(), sr.edges.end());
        sr.edges.erase(std::unique(sr.edges.begin(), sr.edges.end()), sr.edges.end());
        for (int e : sr.edges) key_edges[sr.key][e]++;
    }
    for (int key = 0; key < nkeys; key++) {
        for (auto [e, c] : key_edges[key]) g.located[key].push_back({e, c});
        auto& cr = g.critical[key];
        std::sort(cr.begin(), cr.end());
        cr.erase(std::unique(cr.begin(), cr.end()), cr.end());
    }
    // Name the data qubit behind each spacelike edge.
    DetectorIndex idx{L.d, rounds, critical_kind};
    int offset = basis == Basis::X ? L.d * L.d : 0;
    for (auto& e : g.edges) {
        if (e.kind != EdgeKind::Data) continue;
        const auto& sa = L.support[offset + idx.stab_of(e.a)];
        const auto& sb = L.support[offset + idx.stab_of(e.b)];
        for (int x : sa) {
            if (std::find(sb.begin(), sb.end(), x) != sb.end()) e.site = x;
        }
        if (e.site < 0) e.kind = EdgeKind::Hook;
    }
    g.finalize();
    return g;
}

std::vector<int> shot_defects(const ToricLayout& L, const DetectorGraph& g, const ShotRecord& shot) {
    std::vector<int> out;
    int dd = L.d * L.d;
    int R = shot.rounds;
    if (R != g.rounds) throw std::invalid_argument("shot and graph disagree on the number of rounds");
    bool xb = g.basis == Basis::X;
    int offset = xb ? dd : 0;
    const auto& fin = xb ? shot.final_x : shot.final_z;
    for (int local = 0; local < dd; local++) {
        int s = offset + local;
        uint8_t prev = 0;
        for (int t = 1; t <= R + 1; t++) {
            uint8_t m;
            if (t <= R) {
                m = shot.meas[static_cast<size_t>(s) * R + (t - 1)];
            } else {
                m = 0;
                for (int e : L.support[s]) m ^= fin[e];
            }
            if (m != prev) out.push_back(local * (R + 1) + (t - 1));
            prev = m;
        }
    }
    return out;
}

namespace {

Overlay collect(const DetectorGraph& g, std::map<int, double>& next) {
    Overlay ov;
    for (auto [e, p] : next) {
        if (p != g.prob[e]) ov.changes.push_back({e, p});
    }
    return ov;
}

}  // namespace

Overlay reweight_located(const DetectorGraph& g, const ShotRecord& shot, const NoiseConfig& cfg) {
    std::map<int, double> next;
    double q = cfg.pe() * (1.0 + cfg.eta) / 2.0;
    for (size_t key = 0; key < shot.leak.size(); key++) {
        if (!shot.leak[key]) continue;
        int n = g.located_sites[key];
        if (n == 0) continue;
        double p_site = q > 0.0 ? q / (1.0 - std::pow(1.0 - q, n)) : 1.0 / n;
        for (auto [e, c] : g.located[key]) {
            double add = std::min(0.5, c * p_site);
            auto it = next.find(e);
            double cur = it == next.end() ? g.prob[e] : it->second;
            next[e] = std::min(0.5, xor_prob(cur, add));
        }
    }
    return collect(g, next);
}

Overlay reweight_critical(const DetectorGraph& g, const ShotRecord& shot, const NoiseConfig& /*cfg*/) {
    std::map<int, double> next;
    for (size_t key = 0; key < shot.leak.size(); key++) {
        if (!shot.leak[key]) continue;
        for (int e : g.critical[key]) next[e] = 0.5;
    }
    return collect(g, next);
}

Overlay reweight(DecoderKind kind, const DetectorGraph& g, const ShotRecord& shot, const NoiseConfig& cfg) {
    switch (kind) {
        case DecoderKind::Located: return reweight_located(g, shot, cfg);
        case DecoderKind::Critical: return reweight_critical(g, shot, cfg);
        default: return {};
    }
}

Overlay apply_overlay(DetectorGraph& g, const Overlay& ov) {
    Overlay undo;
    for (auto [e, p] : ov.changes) {
        undo.changes.push_back({e, g.prob[e]});
        g.set_prob(e, p);
    }
    std::reverse(undo.changes.begin(), undo.changes.end());
    return undo;
}

}  // namespace slru
