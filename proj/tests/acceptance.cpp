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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// keeps the raw CSV of every sweep under ./acceptance_out.
//
//   acceptance            run all criteria
//   acceptance 1 2 8      run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "experiment.hpp"
#include "fault_tables.hpp"

using namespace slru;

namespace {

const std::filesystem::path kOut = "acceptance_out";

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

void save(const std::string& name, const std::string& text) {
    std::filesystem::create_directories(kOut);
    std::ofstream(kOut / name, std::ios::binary) << text;
}

std::string sweep(const RunConfig& cfg, const std::string& name) {
    std::fprintf(stderr, "  sweep %s\n", name.c_str());
    auto rows = run_simulate(cfg, [](const CellResult& r) {
        std::fprintf(stderr, "    d=%d p=%g %s shots=%lld fail_X2=%lld\n", r.d, r.p, decoder_name(r.decoder),
                     static_cast<long long>(r.shots), static_cast<long long>(r.fail[1]));
    });
    auto csv = to_csv(cfg, rows);
    save(name + ".csv", csv);
    return csv;
}

std::vector<RatePoint> select(const std::vector<RatePoint>& pts, const std::string& decoder) {
    std::vector<RatePoint> out;
    for (const auto& p : pts) {
        if (p.decoder == decoder) out.push_back(p);
    }
    return out;
}

std::string slope_text(const FitResult& f) {
    return fmt("%.3f", f.slope) + "+-" + fmt("%.3f", f.slope_err) + " (" + std::to_string(f.used) + " pts)";
}

// ---------------------------------------------------------------------------

Outcome table_fidelity() {
    int total = 0, bad = 0;
    auto L = build_layout(5);
    for (auto v : {Variant::FiveCnot, Variant::FeedForward}) {
        for (const auto& e : derive_fault_tables(L, v)) {
            total++;
            if (!e.match) bad++;
        }
    }
    return {total > 0 && bad == 0, std::to_string(total) + " entries, " + std::to_string(bad) + " mismatches"};
}

Outcome matching_exactness() {
    auto L = build_layout(3);
    NoiseConfig c;
    c.p = 0.01;
    c.re = 0.5;
    auto g = build_base_graph(L, c, Basis::X);
    std::mt19937_64 rng(20250601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<int> all(g.num_detectors);
    double worst = 0.0;
    int bad = 0, zero_edges = 0;
    const int instances = 10000;
    for (int it = 0; it < instances; it++) {
        for (size_t e = 0; e < g.edges.size(); e++) {
            bool zero = u(rng) < 0.1;
            zero_edges += zero;
            g.set_weight(static_cast<int>(e), zero ? 0.0 : 5.0 * (1.0 - u(rng)));
        }
        for (int i = 0; i < g.num_detectors; i++) all[i] = i;
        std::shuffle(all.begin(), all.end(), rng);
        int k = 2 * static_cast<int>(rng() % 5);
        std::vector<int> def(all.begin(), all.begin() + k);
        std::sort(def.begin(), def.end());
        double diff = std::fabs(decode(g, def).weight - brute_force_decode(g, def).weight);
        worst = std::max(worst, diff);
        if (!(diff <= 1e-12)) bad++;
    }
    return {bad == 0 && zero_edges > 0, std::to_string(instances) + " instances, max |dw| = " + fmt("%.2e", worst)};
}

Outcome critical_certification() {
    RunConfig cfg;
    cfg.detect = DetectMode::OneType;
    cfg.detect_ratio = 0.5;
    cfg.decoders = {DecoderKind::Trivial, DecoderKind::Critical};
    std::ostringstream det;
    bool ok = true;
    for (auto [d, k] : {std::pair{3, 1}, std::pair{5, 2}}) {
        auto s = scan_critical(build_layout(d), cfg, 0.01, k);
        bool trivial_fails = s.failing_configurations[0] > 0;
        bool critical_clean = s.failing_configurations[1] == 0 && s.totals[1].failures == 0;
        ok = ok && trivial_fails && critical_clean;
        det << "d=" << d << " k=" << k << ": " << s.configurations << " placements, " << s.totals[0].realizations
            << " realizations, trivial fails in " << s.failing_configurations[0] << ", critical in "
            << s.failing_configurations[1] << "; ";
    }
    return {ok, det.str()};
}

// Threshold sweeps: R_e = 1, eta = 0.0755, d = 5, 7, 9, 2e4 shots.
RunConfig threshold_config(DecoderKind dk, Variant v, std::vector<double> ps) {
    RunConfig cfg;
    cfg.distances = {5, 7, 9};
    cfg.ps = std::move(ps);
    cfg.re = 1.0;
    cfg.eta = 0.0755;
    cfg.decoders = {dk};
    cfg.variant = v;
    cfg.shots = 20000;
    cfg.seed = 4;
    return cfg;
}

const std::vector<double> kLocatedPs = {0.019, 0.021, 0.023, 0.025, 0.027, 0.029};
const std::vector<double> kTrivialPs = {0.0055, 0.0062, 0.0069, 0.0076, 0.0083, 0.0090};

Outcome threshold() {
    struct Case {
        const char* name;
        DecoderKind dk;
        Variant v;
        std::vector<double> ps;
        double lo, hi;
    };
    std::vector<Case> cases = {{"located_ff", DecoderKind::Located, Variant::FeedForward, kLocatedPs, 0.020, 0.026},
                               {"trivial_5cnot", DecoderKind::Trivial, Variant::FiveCnot, kTrivialPs, 0.0055, 0.0090}};
    bool ok = true;
    std::string det;
    for (const auto& c : cases) {
        auto csv = sweep(threshold_config(c.dk, c.v, c.ps), std::string("c4_") + c.name);
        auto f = fit_threshold(read_rate_points(csv, "both"));
        save(std::string("c4_") + c.name + ".fit.txt", f.to_text());
        bool in = f.ok && f.p_th >= c.lo && f.p_th <= c.hi;
        ok = ok && in;
        det += std::string(c.name) + " p_th=" + fmt("%.3f", 100 * f.p_th) + "+-" + fmt("%.3f", 100 * f.p_th_err) +
               "% in [" + fmt("%.2f", 100 * c.lo) + "," + fmt("%.2f", 100 * c.hi) + "]; ";
    }
    return {ok, det};
}

// Sub-threshold slopes at d = 3, pure decay.
Outcome distance_slopes() {
    struct Case {
        const char* name;
        DecoderKind dk;
        double p_ref, eta, target;
    };
    std::vector<Case> cases = {{"located_eta0", DecoderKind::Located, 0.020, 0.0, 3.06},
                               {"located_eta", DecoderKind::Located, 0.020, 0.0755, 2.63},
                               {"trivial_eta0", DecoderKind::Trivial, 0.0072, 0.0, 2.00},
                               {"trivial_eta", DecoderKind::Trivial, 0.0072, 0.0755, 1.65}};
    bool ok = true;
    std::string det;
    for (const auto& c : cases) {
        RunConfig cfg;
        cfg.distances = {3};
        cfg.ps = log_window(c.p_ref, 5);
        cfg.re = 1.0;
        cfg.eta = c.eta;
        cfg.decoders = {c.dk};
        cfg.variant = Variant::FiveCnot;
        cfg.shots = 100000;
        cfg.min_failures = 200;
        cfg.max_shots = 1000000;
        cfg.seed = 5;
        auto csv = sweep(cfg, std::string("c5_") + c.name);
        auto f = fit_distance(read_rate_points(csv, "x2"), c.p_ref);
        save(std::string("c5_") + c.name + ".fit.txt", f.to_text());
        bool in = f.ok && std::fabs(f.slope - c.target) <= 0.35;
        ok = ok && in;
        det += std::string(c.name) + " " + slope_text(f) + " vs " + fmt("%.2f", c.target) + (in ? "; " : " (out); ");
    }
    return {ok, det};
}

// Mixed-error window at d = 5 shared by the last two slope criteria.
const std::vector<double> kMixedPs = {0.0035, 0.0043, 0.0053, 0.0066, 0.0081, 0.01};
const double kMixedRef = 0.01;

RunConfig mixed_config(double re, std::vector<DecoderKind> dks) {
    RunConfig cfg;
    cfg.distances = {5};
    cfg.ps = kMixedPs;
    cfg.re = re;
    cfg.eta = 0.0755;
    cfg.decoders = std::move(dks);
    cfg.variant = Variant::FiveCnot;
    cfg.shots = 20000;
    cfg.min_failures = 300;
    cfg.max_shots = 1000000;
    cfg.seed = 6;
    return cfg;
}

FitResult slope_of(const std::string& csv, const std::string& decoder, const std::string& tag) {
    auto f = fit_distance(select(read_rate_points(csv, "x2"), decoder), kMixedRef);
    save(tag + "_" + decoder + ".fit.txt", f.to_text());
    return f;
}

bool above(const FitResult& hi, const FitResult& lo) {
    return hi.ok && lo.ok && hi.slope - lo.slope >= 2.0 * std::hypot(hi.slope_err, lo.slope_err);
}

FitResult pure_pauli_slope() {
    static FitResult cached;
    static bool done = false;
    if (!done) {
        auto csv = sweep(mixed_config(0.0, {DecoderKind::Trivial}), "c6_pure");
        cached = slope_of(csv, "trivial", "c6_pure");
        done = true;
    }
    return cached;
}

Outcome mixed_ordering() {
    auto pure = pure_pauli_slope();
    bool ok = pure.ok;
    std::string det = "pure " + slope_text(pure) + "; ";
    for (double re : {0.5, 0.9}) {
        std::string tag = "c6_re" + fmt("%g", re);
        auto csv = sweep(mixed_config(re, {DecoderKind::Trivial, DecoderKind::Located}), tag);
        auto loc = slope_of(csv, "located", tag);
        auto tri = slope_of(csv, "trivial", tag);
        bool good = above(loc, pure) && above(pure, tri);
        ok = ok && good;
        det += "R_e=" + fmt("%g", re) + " located " + slope_text(loc) + ", trivial " + slope_text(tri) +
               (good ? "; " : " (order not resolved); ");
    }
    return {ok, det};
}

Outcome critical_slope() {
    auto pure = pure_pauli_slope();
    auto cfg = mixed_config(0.9, {DecoderKind::Trivial, DecoderKind::Located, DecoderKind::Critical});
    cfg.detect = DetectMode::OneType;
    cfg.detect_ratio = 0.5;
    auto csv = sweep(cfg, "c7_one_type");
    auto cri = slope_of(csv, "critical", "c7");
    auto tri = slope_of(csv, "trivial", "c7");
    auto loc = slope_of(csv, "located", "c7");
    bool gap = cri.ok && tri.ok && cri.slope >= tri.slope + 0.3;
    bool near = cri.ok && pure.ok && std::fabs(cri.slope - pure.slope) <= 0.35;
    return {gap && near, "critical " + slope_text(cri) + ", trivial " + slope_text(tri) + ", located " +
                             slope_text(loc) + ", pure " + slope_text(pure)};
}

Outcome determinism() {
    auto cfg = threshold_config(DecoderKind::Located, Variant::FeedForward, {kLocatedPs.front()});
    cfg.distances = {5};
    int many = std::max(4, default_workers());
    std::vector<std::string> runs;
    for (int w : {1, many, 1, many}) {
        cfg.workers = w;
        runs.push_back(to_csv(cfg, run_simulate(cfg)));
    }
    save("c8_cell.csv", runs[0]);
    bool same = runs[0] == runs[1] && runs[0] == runs[2] && runs[0] == runs[3];
    return {same, "d=5 p=" + fmt("%g", kLocatedPs.front()) + " located, workers 1 and " + std::to_string(many) +
                      ", two runs each: " + (same ? "byte-identical" : "outputs differ")};
}

}  // namespace

int main(int argc, char** argv) {
    std::map<int, std::pair<const char*, std::function<Outcome()>>> all = {
        {1, {"fault tables", table_fidelity}},
        {2, {"matching exactness", matching_exactness}},
        {3, {"critical fault distance", critical_certification}},
        {4, {"threshold", threshold}},
        {5, {"distance slopes", distance_slopes}},
        {6, {"mixed error ordering", mixed_ordering}},
        {7, {"critical decoder slope", critical_slope}},
        {8, {"determinism", determinism}},
    };
    std::set<int> chosen;
    for (int i = 1; i < argc; i++) chosen.insert(std::atoi(argv[i]));
    if (chosen.empty()) {
        for (const auto& [k, v] : all) chosen.insert(k);
    }
    int failed = 0;
    for (int k : chosen) {
        auto it = all.find(k);
        if (it == all.end()) {
            std::fprintf(stderr, "unknown criterion %d\n", k);
            return 2;
        }
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = it->second.second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %d %s: %s (%.0f s)\n", o.pass ? "PASS" : "FAIL", k, it->second.first,
                    o.detail.c_str(), secs);
        std::fflush(stdout);
        failed += !o.pass;
    }
    return failed ? 1 : 0;
}
