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

// swaplru: command line driver over the C interface.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "swaplru/swaplru.h"

namespace {

struct Text {
    slru_text* t = nullptr;
    ~Text() { slru_text_free(t); }
    std::string str() const { return slru_text_data(t); }
};

struct Config {
    slru_config* c = nullptr;
    Config() {
        if (slru_config_new(&c) != SLRU_OK) throw std::runtime_error(slru_last_error());
    }
    ~Config() { slru_config_free(c); }
};

std::string join(const std::vector<std::string>& v) {
    std::string s;
    for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
    return s;
}

int report_error(slru_status s) {
    std::cerr << "error: " << slru_status_string(s) << ": " << slru_last_error() << "\n";
    return static_cast<int>(s);
}

bool write_output(const std::string& path, const std::string& data) {
    if (path.empty() || path == "-") {
        std::cout << data;
        return true;
    }
    std::ofstream out(path, std::ios::binary);
    out << data;
    if (!out) {
        std::cerr << "error: cannot write " << path << "\n";
        return false;
    }
    return true;
}

bool read_file(const std::string& path, std::string& data) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    std::ostringstream ss;
    ss << in.rdbuf();
    data = ss.str();
    return true;
}

// Experiment flags shared by simulate and inject. Strings keep the exact
// text handed to the library; empty means "not given".
struct RunFlags {
    std::string config_file;
    std::map<std::string, std::string> values;
    std::vector<std::string> d, p, decoder;
    bool z_basis = false, timing = false;

    void attach(CLI::App* app) {
        app->add_option("--config", config_file, "flat key = value file; flags override it");
        app->add_option("--d", d, "code distances")->delimiter(',');
        app->add_option("--p", p, "physical error rates")->delimiter(',');
        app->add_option("--decoder", decoder, "trivial, located, critical")->delimiter(',');
        add(app, "--rounds", "rounds", "syndrome rounds (default d)");
        add(app, "--re", "re", "fraction of errors that are decay");
        add(app, "--eta", "eta", "branching ratio of double leakage");
        add(app, "--variant", "variant", "five_cnot or feed_forward");
        add(app, "--detect", "detect", "both or one");
        add(app, "--detect-ratio", "detect_ratio", "share of detectable leakage in one-type mode");
        add(app, "--shots", "shots", "shots per cell (batch size when adaptive)");
        add(app, "--min-failures", "min_failures", "keep sampling until every decoder has this many X2 failures");
        add(app, "--max-shots", "max_shots", "cap for adaptive sampling");
        add(app, "--seed", "seed", "master seed");
        add(app, "--workers", "workers", "worker threads (default SWAPLRU_WORKERS or all cores)");
        add(app, "--run-id", "run_id", "label written to every row");
        app->add_flag("--z-basis", z_basis, "also run the Z-basis memory experiment");
        app->add_flag("--timing", timing, "record wall-clock seconds (makes output nondeterministic)");
    }

    void add(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
        app->add_option(flag, values[key], help);
    }

    // Returns SLRU_OK or the failing status; file values first, then flags.
    slru_status apply(slru_config* c) const {
        if (!config_file.empty()) {
            std::string text;
            if (!read_file(config_file, text)) {
                std::cerr << "error: cannot read " << config_file << "\n";
                return SLRU_ERR_IO;
            }
            std::istringstream in(text);
            std::string line;
            int n = 0;
            while (std::getline(in, line)) {
                n++;
                auto hash = line.find('#');
                if (hash != std::string::npos) line.erase(hash);
                auto eq = line.find('=');
                auto trim = [](std::string s) {
                    auto b = s.find_first_not_of(" \t\r");
                    auto e = s.find_last_not_of(" \t\r");
                    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
                };
                if (trim(line).empty()) continue;
                if (eq == std::string::npos) {
                    std::cerr << "error: " << config_file << ":" << n << ": expected key = value\n";
                    return SLRU_ERR_CONFIG;
                }
                auto s = slru_config_set(c, trim(line.substr(0, eq)).c_str(), trim(line.substr(eq + 1)).c_str());
                if (s != SLRU_OK) {
                    std::cerr << config_file << ":" << n << ": ";
                    return s;
                }
            }
        }
        std::vector<std::pair<std::string, std::string>> kv;
        for (const auto& [k, v] : values) {
            if (!v.empty()) kv.push_back({k, v});
        }
        if (!d.empty()) kv.push_back({"d", join(d)});
        if (!p.empty()) kv.push_back({"p", join(p)});
        if (!decoder.empty()) kv.push_back({"decoder", join(decoder)});
        if (z_basis) kv.push_back({"z_basis", "1"});
        if (timing) kv.push_back({"timing", "1"});
        for (const auto& [k, v] : kv) {
            auto s = slru_config_set(c, k.c_str(), v.c_str());
            if (s != SLRU_OK) return s;
        }
        return slru_config_validate(c);
    }
};

void progress(const slru_cell* c, void*) {
    std::fprintf(stderr, "d=%d p=%g %s shots=%lld fail_X2=%lld\n", c->d, c->p, c->decoder,
                 static_cast<long long>(c->shots), static_cast<long long>(c->fail[1]));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"SWAP-LRU toric code leakage simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", slru_version());

    RunFlags sim_flags;
    std::string sim_out;
    bool quiet = false;
    auto* sim = app.add_subcommand("simulate", "Monte Carlo logical error rates as CSV");
    sim_flags.attach(sim);
    sim->add_option("--out", sim_out, "CSV path (default stdout)");
    sim->add_flag("--quiet", quiet, "no progress on stderr");

    std::vector<std::string> fit_in;
    std::string fit_out, fit_obs;
    double p_ref = 0.0;
    auto* fth = app.add_subcommand("fit-threshold", "fit the finite-size scaling ansatz");
    fth->add_option("--in", fit_in, "CSV files from simulate")->required()->check(CLI::ExistingFile);
    fth->add_option("--observable", fit_obs, "x2 or both (default both)");
    fth->add_option("--out", fit_out, "report path (default stdout)");
    auto* fdi = app.add_subcommand("fit-distance", "log-log slope of logical error rate");
    fdi->add_option("--in", fit_in, "CSV files from simulate")->required()->check(CLI::ExistingFile);
    fdi->add_option("--p-ref", p_ref, "reference error rate")->required();
    fdi->add_option("--observable", fit_obs, "x2 or both (default x2)");
    fdi->add_option("--out", fit_out, "report path (default stdout)");

    std::string vt_out;
    auto* vt = app.add_subcommand("verify-tables", "compare derived fault tables with the reference");
    vt->add_option("--out", vt_out, "report path (default stdout)");

    RunFlags inj_flags;
    std::vector<std::string> faults;
    std::string basis = "X", inj_out;
    int scan = 0;
    auto* inj = app.add_subcommand("inject", "exhaustive fault injection on a noiseless background");
    inj_flags.attach(inj);
    inj->add_option("--fault", faults, "round:slot:stab:kind with kind lc, lt, ll or a Pauli pair");
    inj->add_option("--scan", scan, "scan all placements of 1 or 2 correlated slot-1 faults instead");
    inj->add_option("--basis", basis, "X or Z")->check(CLI::IsMember({"X", "Z", "x", "z"}));
    inj->add_option("--out", inj_out, "report path (default stdout)");
    inj->add_flag("--dump-graph", "print the matching graph instead");

    CLI11_PARSE(app, argc, argv);

    if (*sim) {
        Config c;
        if (auto s = sim_flags.apply(c.c); s != SLRU_OK) return report_error(s);
        Text csv;
        auto s = slru_simulate(c.c, quiet ? nullptr : progress, nullptr, &csv.t);
        if (s != SLRU_OK) return report_error(s);
        return write_output(sim_out, csv.str()) ? 0 : SLRU_ERR_IO;
    }
    if (*fth || *fdi) {
        std::string all;
        for (const auto& path : fit_in) {
            std::string text;
            if (!read_file(path, text)) {
                std::cerr << "error: cannot read " << path << "\n";
                return SLRU_ERR_IO;
            }
            // Keep one header.
            if (!all.empty()) text = text.substr(text.find('\n') + 1);
            all += text;
        }
        Text rep;
        slru_status s;
        if (*fth) {
            s = slru_fit_threshold(all.c_str(), fit_obs.empty() ? "both" : fit_obs.c_str(), &rep.t);
        } else {
            s = slru_fit_distance(all.c_str(), fit_obs.empty() ? "x2" : fit_obs.c_str(), p_ref, &rep.t);
        }
        if (rep.t && !write_output(fit_out, rep.str())) return SLRU_ERR_IO;
        return s == SLRU_OK ? 0 : report_error(s);
    }
    if (*vt) {
        Text rep;
        auto s = slru_verify_tables(&rep.t);
        if (rep.t && !write_output(vt_out, rep.str())) return SLRU_ERR_IO;
        return s == SLRU_OK ? 0 : report_error(s);
    }
    if (*inj) {
        Config c;
        if (auto s = inj_flags.apply(c.c); s != SLRU_OK) return report_error(s);
        Text rep;
        slru_status s;
        if (inj->get_option("--dump-graph")->count()) {
            s = slru_dump_graph(c.c, basis.c_str(), &rep.t);
        } else if (scan) {
            s = slru_scan_critical(c.c, scan, basis.c_str(), &rep.t);
        } else {
            if (faults.empty()) {
                std::cerr << "error: give --fault or --scan\n";
                return SLRU_ERR_ARGUMENT;
            }
            std::vector<const char*> ptrs;
            for (const auto& f : faults) ptrs.push_back(f.c_str());
            s = slru_inject(c.c, ptrs.data(), ptrs.size(), basis.c_str(), &rep.t);
        }
        if (s != SLRU_OK) return report_error(s);
        return write_output(inj_out, rep.str()) ? 0 : SLRU_ERR_IO;
    }
    return 0;
}
