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

#include "experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <iomanip>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace slru {

NoiseConfig RunConfig::noise(double p) const {
    NoiseConfig n;
    n.p = p;
    n.re = re;
    n.eta = eta;
    n.detect = detect;
    n.detect_ratio = detect_ratio;
    n.variant = variant;
    return n;
}

void RunConfig::validate() const {
    if (distances.empty()) throw std::invalid_argument("no distance given");
    for (int d : distances) {
        if (d < 3 || d % 2 == 0) throw std::invalid_argument("distance must be odd and at least 3");
    }
    if (ps.empty()) throw std::invalid_argument("no error rate given");
    for (double p : ps) noise(p).validate();
    if (shots < 1) throw std::invalid_argument("shots must be at least 1");
    if (rounds < 0) throw std::invalid_argument("rounds must be non-negative");
    if (decoders.empty()) throw std::invalid_argument("no decoder given");
    if (max_shots != 0 && max_shots < shots) throw std::invalid_argument("max shots below the batch size");
}

int default_workers() {
    if (const char* env = std::getenv("SWAPLRU_WORKERS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned h = std::thread::hardware_concurrency();
    return h ? static_cast<int>(h) : 1;
}

namespace {

uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

uint64_t bits_of(double v) {
    uint64_t b;
    std::memcpy(&b, &v, sizeof b);
    return b;
}

// Per-worker decoding state: private graph copies for overlays.
struct Worker {
    std::vector<DetectorGraph> graphs;  // X basis, then Z basis when run
    std::vector<std::unique_ptr<Matcher>> matchers;
    FrameEngine<uint8_t> engine;
    std::vector<ScheduledFault> faults;
    ShotRecord rec;
    std::vector<std::array<int64_t, 4>> fail;

    Worker(const ToricLayout& L, const GateSequence& seq, const std::vector<DetectorGraph>& base, size_t ndec)
        : graphs(base), engine(L, seq), fail(ndec, {0, 0, 0, 0}) {
        for (auto& g : graphs) matchers.push_back(std::make_unique<Matcher>(g));
    }
};

void run_shots(const ToricLayout& L, const GateSequence& seq, const RunConfig& cfg, const NoiseConfig& nc, int rounds,
               int64_t begin, int64_t end, int64_t stride, Worker& w) {
    int64_t num_gates = static_cast<int64_t>(rounds) * seq.physical_slots() * L.num_stabs();
    for (int64_t shot = begin; shot < end; shot += stride) {
        Rng rng(shot_seed(cfg.seed, L.d, rounds, nc.p, shot));
        sample_shot_faults(rng, nc, num_gates, w.faults);
        if (w.faults.empty()) continue;  // a clean shot cannot fail
        run_shot(L, seq, rounds, w.faults, rng, w.engine, w.rec);
        for (size_t gi = 0; gi < w.graphs.size(); gi++) {
            auto& g = w.graphs[gi];
            auto defects = shot_defects(L, g, w.rec);
            for (size_t k = 0; k < cfg.decoders.size(); k++) {
                Overlay undo;
                if (cfg.decoders[k] != DecoderKind::Trivial && w.rec.any_leak()) {
                    undo = apply_overlay(g, reweight(cfg.decoders[k], g, w.rec, nc));
                }
                Correction c = w.matchers[gi]->decode(defects, false);
                if (!undo.empty()) apply_overlay(g, undo);
                Verdict v;
                judge_shot(c, g.basis, w.rec, v);
                int k1 = g.basis == Basis::X ? kX1 : kZ1;
                int k2 = g.basis == Basis::X ? kX2 : kZ2;
                w.fail[k][k1] += v.fail[k1];
                w.fail[k][k2] += v.fail[k2];
            }
        }
    }
}

}  // namespace

uint64_t shot_seed(uint64_t master, int d, int rounds, double p, int64_t shot) {
    uint64_t h = splitmix(master);
    h = splitmix(h ^ static_cast<uint64_t>(d));
    h = splitmix(h ^ static_cast<uint64_t>(rounds));
    h = splitmix(h ^ bits_of(p));
    return splitmix(h ^ static_cast<uint64_t>(shot));
}

std::vector<CellResult> run_simulate(const RunConfig& cfg, const ProgressFn& progress) {
    cfg.validate();
    int workers = cfg.workers > 0 ? cfg.workers : default_workers();
    std::vector<CellResult> out;
    for (int d : cfg.distances) {
        auto L = build_layout(d);
        int rounds = cfg.rounds > 0 ? cfg.rounds : d;
        auto seq = gate_sequence(L, cfg.variant);
        for (double p : cfg.ps) {
            auto t0 = std::chrono::steady_clock::now();
            NoiseConfig nc = cfg.noise(p);
            std::vector<DetectorGraph> base;
            if (p > 0.0) {
                base.push_back(build_base_graph(L, nc, Basis::X, rounds));
                if (cfg.z_basis) base.push_back(build_base_graph(L, nc, Basis::Z, rounds));
            }
            size_t ndec = cfg.decoders.size();
            std::vector<std::array<int64_t, 4>> fail(ndec, {0, 0, 0, 0});
            int64_t done = 0;
            int64_t cap = cfg.max_shots > 0 ? cfg.max_shots : cfg.shots;
            while (done < cap) {
                int64_t batch = std::min(cfg.shots, cap - done);
                if (p > 0.0) {
                    int nw = static_cast<int>(std::min<int64_t>(workers, batch));
                    std::vector<std::unique_ptr<Worker>> ws;
                    for (int i = 0; i < nw; i++) ws.push_back(std::make_unique<Worker>(L, seq, base, ndec));
                    std::vector<std::thread> threads;
                    for (int i = 0; i < nw; i++) {
                        auto body = [&, i] { run_shots(L, seq, cfg, nc, rounds, done + i, done + batch, nw, *ws[i]); };
                        if (nw == 1) {
                            body();
                        } else {
                            threads.emplace_back(body);
                        }
                    }
                    for (auto& t : threads) t.join();
                    for (auto& w : ws) {
                        for (size_t k = 0; k < ndec; k++) {
                            for (int o = 0; o < 4; o++) fail[k][o] += w->fail[k][o];
                        }
                    }
                }
                done += batch;
                if (cfg.min_failures <= 0) break;
                bool enough = true;
                for (size_t k = 0; k < ndec; k++) enough = enough && fail[k][kX2] >= cfg.min_failures;
                if (enough) break;
            }
            double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            for (size_t k = 0; k < ndec; k++) {
                CellResult r;
                r.d = d;
                r.rounds = rounds;
                r.p = p;
                r.decoder = cfg.decoders[k];
                r.shots = done;
                for (int o = 0; o < 4; o++) r.fail[o] = fail[k][o];
                r.wall_seconds = wall;
                if (progress) progress(r);
                out.push_back(r);
            }
        }
    }
    return out;
}

std::string csv_header() {
    return "run_id,d,rounds,p,R_e,eta,decoder,variant,detect_mode,detect_ratio,shots,fail_X1,fail_X2,fail_Z1,fail_Z2,"
           "p_L_X2,stderr_X2,wall_seconds,seed";
}

std::string csv_row(const RunConfig& cfg, const CellResult& r) {
    std::ostringstream out;
    out << std::setprecision(10);
    double pl = static_cast<double>(r.fail[kX2]) / static_cast<double>(r.shots);
    double se = std::sqrt(pl * (1.0 - pl) / static_cast<double>(r.shots));
    out << cfg.run_id << "," << r.d << "," << r.rounds << "," << r.p << "," << cfg.re << "," << cfg.eta << ","
        << decoder_name(r.decoder) << "," << variant_name(cfg.variant) << ","
        << (cfg.detect == DetectMode::Both ? "both" : "one") << "," << cfg.detect_ratio << "," << r.shots << ","
        << r.fail[kX1] << "," << r.fail[kX2] << ",";
    if (cfg.z_basis) {
        out << r.fail[kZ1] << "," << r.fail[kZ2] << ",";
    } else {
        out << "NA,NA,";
    }
    out << pl << "," << se << ",";
    if (cfg.timing) {
        out << std::fixed << std::setprecision(3) << r.wall_seconds << std::defaultfloat;
    } else {
        out << "NA";
    }
    out << "," << cfg.seed;
    return out.str();
}

std::string to_csv(const RunConfig& cfg, const std::vector<CellResult>& rows) {
    std::string s = csv_header() + "\n";
    for (const auto& r : rows) s += csv_row(cfg, r) + "\n";
    return s;
}

std::vector<RatePoint> read_rate_points(const std::string& csv_text, const std::string& observable) {
    if (observable != "x2" && observable != "both") throw std::invalid_argument("observable must be x2 or both");
    std::istringstream in(csv_text);
    std::string line;
    std::vector<std::string> header;
    std::vector<RatePoint> out;
    auto split = [](const std::string& l) {
        std::vector<std::string> f;
        std::stringstream ss(l);
        std::string x;
        while (std::getline(ss, x, ',')) f.push_back(x);
        return f;
    };
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto f = split(line);
        if (header.empty()) {
            header = f;
            continue;
        }
        if (f.size() != header.size()) throw std::runtime_error("malformed CSV row: " + line);
        std::map<std::string, std::string> m;
        for (size_t i = 0; i < f.size(); i++) m[header[i]] = f[i];
        auto need = [&](const char* k) -> const std::string& {
            auto it = m.find(k);
            if (it == m.end()) throw std::runtime_error(std::string("CSV lacks column ") + k);
            return it->second;
        };
        RatePoint pt;
        pt.d = std::stoi(need("d"));
        pt.p = std::stod(need("p"));
        pt.re = std::stod(need("R_e"));
        pt.eta = std::stod(need("eta"));
        pt.decoder = need("decoder");
        pt.variant = need("variant");
        pt.shots = std::stoll(need("shots"));
        double f2 = std::stod(need("fail_X2"));
        pt.failures = observable == "x2" ? f2 : 0.5 * (std::stod(need("fail_X1")) + f2);
        out.push_back(pt);
    }
    return out;
}

// ---------------------------------------------------------------------------

FaultSpec parse_fault(const std::string& text) {
    FaultSpec f;
    std::vector<std::string> parts;
    std::stringstream ss(text);
    std::string x;
    while (std::getline(ss, x, ':')) parts.push_back(x);
    if (parts.size() != 4) throw std::invalid_argument("fault must look like round:slot:stab:kind");
    f.round = std::stoi(parts[0]);
    f.slot = std::stoi(parts[1]);
    f.stab = std::stoi(parts[2]);
    const auto& k = parts[3];
    if (k == "lc") {
        f.kind = InjectKind::LeakControl;
    } else if (k == "lt") {
        f.kind = InjectKind::LeakTarget;
    } else if (k == "ll") {
        f.kind = InjectKind::LeakBoth;
    } else if (k.size() == 2) {
        auto one = [](char c) {
            switch (c) {
                case 'I': return 0;
                case 'X': return 1;
                case 'Z': return 2;
                case 'Y': return 3;
                default: throw std::invalid_argument("Pauli letters are I, X, Y, Z");
            }
        };
        f.kind = InjectKind::Pauli;
        f.pauli = one(k[0]) | (one(k[1]) << 2);
        if (f.pauli == 0) throw std::invalid_argument("identity is not a fault");
    } else {
        throw std::invalid_argument("unknown fault kind '" + k + "'");
    }
    return f;
}

std::string fault_text(const FaultSpec& f) {
    std::ostringstream out;
    out << f.round << ":" << f.slot << ":" << f.stab << ":";
    switch (f.kind) {
        case InjectKind::LeakControl: out << "lc"; break;
        case InjectKind::LeakTarget: out << "lt"; break;
        case InjectKind::LeakBoth: out << "ll"; break;
        case InjectKind::Pauli: out << "IXZY"[f.pauli & 3] << "IXZY"[f.pauli >> 2]; break;
    }
    return out.str();
}

namespace {

// Visibility options per fault: bit 0 control visible, bit 1 target visible.
std::vector<int> visibility_options(const FaultSpec& f, const NoiseConfig& nc) {
    if (f.kind == InjectKind::Pauli) return {0};
    bool both = nc.detect == DetectMode::Both;
    double r = nc.detect_ratio;
    if (f.kind == InjectKind::LeakBoth) {
        if (both) return {3};
        std::vector<int> o;
        if (r > 0.0) o.push_back(1);
        if (r < 1.0) o.push_back(2);
        return o;
    }
    int bit = f.kind == InjectKind::LeakControl ? 1 : 2;
    if (both) return {bit};
    std::vector<int> o;
    if (r > 0.0) o.push_back(bit);
    if (r < 1.0) o.push_back(0);
    return o;
}

struct InjectContext {
    const ToricLayout* L;
    GateSequence seq;
    int rounds;
    NoiseConfig nc;
    DetectorGraph graph;
    std::unique_ptr<Matcher> matcher;
};

void inject_once(InjectContext& ctx, const RunConfig& cfg, const std::vector<FaultSpec>& faults,
                 const std::vector<int>& vis, Basis basis, std::vector<InjectOutcome>& outcomes, int* rank_out) {
    const auto& L = *ctx.L;
    std::vector<InjectedFault> inj;
    for (size_t i = 0; i < faults.size(); i++) {
        const auto& fs = faults[i];
        InjectedFault f;
        f.round = fs.round;
        f.step = fs.slot - 1;
        f.index = fs.stab;
        if (fs.kind == InjectKind::Pauli) {
            f.fixed_pauli = fs.pauli;
        } else {
            f.leaked = fs.kind == InjectKind::LeakControl ? Leaked::Control
                       : fs.kind == InjectKind::LeakTarget ? Leaked::Target
                                                           : Leaked::Both;
            f.visible_control = vis[i] & 1;
            f.visible_target = (vis[i] >> 1) & 1;
        }
        inj.push_back(f);
    }
    auto eff = propagate_symbolic(L, ctx.seq, ctx.rounds, inj, false);
    int b = basis == Basis::X ? 0 : 1;
    SparseEffect offset;
    std::vector<SparseEffect> free_cols;
    for (int k = 0; k < eff.num_coins; k++) {
        if (k == eff.constant) {
            offset = eff.columns[b][k];
        } else {
            free_cols.push_back(eff.columns[b][k]);
        }
    }
    auto basis_vecs = span_basis(free_cols);
    if (rank_out) *rank_out = std::max(*rank_out, static_cast<int>(basis_vecs.size()));
    auto span = enumerate_span(basis_vecs);
    span.push_back(SparseEffect{});
    ShotRecord rec;
    rec.d = L.d;
    rec.rounds = ctx.rounds;
    rec.leak.assign(static_cast<size_t>(L.num_stabs()) * (ctx.rounds + 1), 0);
    for (int key : eff.leak_keys) rec.leak[key] = 1;
    for (size_t k = 0; k < cfg.decoders.size(); k++) {
        Overlay undo;
        if (cfg.decoders[k] != DecoderKind::Trivial && rec.any_leak()) {
            undo = apply_overlay(ctx.graph, reweight(cfg.decoders[k], ctx.graph, rec, ctx.nc));
        }
        auto& out = outcomes[k];
        for (const auto& u : span) {
            SparseEffect v = u;
            v.add(offset);
            Correction c = ctx.matcher->decode(v.dets, false);
            uint8_t wrong = c.obs ^ v.obs;
            out.realizations++;
            if (wrong) out.failures++;
            if (wrong & 1) out.fail_obs[0]++;
            if (wrong & 2) out.fail_obs[1]++;
        }
        if (!undo.empty()) apply_overlay(ctx.graph, undo);
    }
}

std::unique_ptr<InjectContext> make_context(const ToricLayout& L, const RunConfig& cfg, double p, Basis basis) {
    auto ctx = std::make_unique<InjectContext>();
    ctx->L = &L;
    ctx->seq = gate_sequence(L, cfg.variant);
    ctx->rounds = cfg.rounds > 0 ? cfg.rounds : L.d;
    ctx->nc = cfg.noise(p);
    ctx->graph = build_base_graph(L, ctx->nc, basis, ctx->rounds);
    ctx->matcher = std::make_unique<Matcher>(ctx->graph);
    return ctx;
}

void for_each_visibility(const std::vector<FaultSpec>& faults, const NoiseConfig& nc,
                         const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<std::vector<int>> opts;
    for (const auto& f : faults) opts.push_back(visibility_options(f, nc));
    std::vector<int> idx(faults.size(), 0), vis(faults.size());
    for (;;) {
        for (size_t i = 0; i < faults.size(); i++) vis[i] = opts[i][idx[i]];
        fn(vis);
        size_t i = 0;
        while (i < faults.size() && ++idx[i] == static_cast<int>(opts[i].size())) idx[i++] = 0;
        if (i == faults.size()) break;
    }
}

}  // namespace

InjectReport run_inject(const ToricLayout& L, const RunConfig& cfg, double p, const std::vector<FaultSpec>& faults,
                        Basis basis) {
    auto ctx = make_context(L, cfg, p, basis);
    int slots = ctx->seq.physical_slots();
    for (const auto& f : faults) {
        if (f.round < 1 || f.round > ctx->rounds) throw std::invalid_argument("fault round out of range");
        if (f.slot < 1 || f.slot > slots) throw std::invalid_argument("fault slot is not a physical gate");
        if (f.stab < 0 || f.stab >= L.num_stabs()) throw std::invalid_argument("fault stabilizer out of range");
    }
    InjectReport rep;
    rep.faults = faults;
    for (auto k : cfg.decoders) rep.outcomes.push_back({k});
    for_each_visibility(faults, ctx->nc, [&](const std::vector<int>& vis) {
        rep.visibility_patterns++;
        inject_once(*ctx, cfg, faults, vis, basis, rep.outcomes, &rep.rank);
    });
    return rep;
}

ScanSummary scan_critical(const ToricLayout& L, const RunConfig& cfg, double p, int k, Basis basis) {
    if (k != 1 && k != 2) throw std::invalid_argument("scan supports one or two faults");
    auto ctx = make_context(L, cfg, p, basis);
    int dd = L.d * L.d;
    int offset = basis == Basis::X ? dd : 0;
    ScanSummary sum;
    sum.faults_per_config = k;
    for (auto dk : cfg.decoders) sum.totals.push_back({dk});
    sum.failing_configurations.assign(cfg.decoders.size(), 0);
    sum.first_failure.assign(cfg.decoders.size(), "");
    int R = ctx->rounds;
    auto run = [&](const std::vector<FaultSpec>& faults) {
        sum.configurations++;
        std::vector<InjectOutcome> local;
        for (auto dk : cfg.decoders) local.push_back({dk});
        for_each_visibility(faults, ctx->nc, [&](const std::vector<int>& vis) {
            inject_once(*ctx, cfg, faults, vis, basis, local, nullptr);
        });
        for (size_t i = 0; i < local.size(); i++) {
            sum.totals[i].realizations += local[i].realizations;
            sum.totals[i].failures += local[i].failures;
            sum.totals[i].fail_obs[0] += local[i].fail_obs[0];
            sum.totals[i].fail_obs[1] += local[i].fail_obs[1];
            if (local[i].failures > 0) {
                if (sum.failing_configurations[i]++ == 0) {
                    std::string s;
                    for (const auto& f : faults) s += (s.empty() ? "" : " ") + fault_text(f);
                    sum.first_failure[i] = s;
                }
            }
        }
    };
    for (int r1 = 1; r1 <= R; r1++) {
        FaultSpec a{r1, 1, offset, InjectKind::LeakBoth, 0};
        if (k == 1) {
            run({a});
            continue;
        }
        for (int r2 = r1; r2 <= R; r2++) {
            for (int s = 0; s < dd; s++) {
                if (r2 == r1 && s == 0) continue;
                FaultSpec b{r2, 1, offset + s, InjectKind::LeakBoth, 0};
                run({a, b});
            }
        }
    }
    return sum;
}

}  // namespace slru
