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

#include "swaplru/swaplru.h"

#include <charconv>
#include <new>
#include <sstream>
#include <stdexcept>
#include <string>

#include "experiment.hpp"
#include "fault_tables.hpp"

struct slru_config {
    slru::RunConfig run;
};

struct slru_text {
    std::string data;
};

namespace {

thread_local std::string g_error;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

template <class F>
slru_status guard(F&& f) {
    try {
        g_error.clear();
        return f();
    } catch (const ConfigError& e) {
        g_error = e.what();
        return SLRU_ERR_CONFIG;
    } catch (const std::invalid_argument& e) {
        g_error = e.what();
        return SLRU_ERR_ARGUMENT;
    } catch (const std::out_of_range& e) {
        g_error = std::string("value out of range: ") + e.what();
        return SLRU_ERR_ARGUMENT;
    } catch (const std::bad_alloc&) {
        g_error = "out of memory";
        return SLRU_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_error = e.what();
        return SLRU_ERR_INTERNAL;
    }
}

slru_status fail(slru_status s, const char* msg) {
    g_error = msg;
    return s;
}

slru_text* make_text(std::string s) { return new slru_text{std::move(s)}; }

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string x;
    while (std::getline(ss, x, ',')) {
        auto b = x.find_first_not_of(" \t");
        auto e = x.find_last_not_of(" \t");
        if (b != std::string::npos) out.push_back(x.substr(b, e - b + 1));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

template <class T>
T parse_num(const std::string& s) {
    T v{};
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) throw std::invalid_argument("not a number: '" + s + "'");
    return v;
}

bool parse_bool(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes" || s == "on") return true;
    if (s == "0" || s == "false" || s == "no" || s == "off") return false;
    throw std::invalid_argument("not a boolean: '" + s + "'");
}

slru::Variant parse_variant(const std::string& s) {
    if (s == "five_cnot" || s == "fivecnot" || s == "5cnot") return slru::Variant::FiveCnot;
    if (s == "feed_forward" || s == "feedforward" || s == "ff") return slru::Variant::FeedForward;
    throw std::invalid_argument("unknown variant '" + s + "'");
}

slru::Basis parse_basis(const char* s) {
    std::string b = s ? s : "X";
    if (b == "X" || b == "x") return slru::Basis::X;
    if (b == "Z" || b == "z") return slru::Basis::Z;
    throw std::invalid_argument("basis must be X or Z");
}

void set_key(slru::RunConfig& c, const std::string& key, const std::string& v) {
    if (key == "run_id") {
        if (v.find(',') != std::string::npos) throw std::invalid_argument("run_id may not contain commas");
        c.run_id = v;
    } else if (key == "d") {
        c.distances.clear();
        for (const auto& x : split_list(v)) c.distances.push_back(parse_num<int>(x));
    } else if (key == "rounds") {
        c.rounds = parse_num<int>(v);
    } else if (key == "p") {
        c.ps.clear();
        for (const auto& x : split_list(v)) c.ps.push_back(parse_num<double>(x));
    } else if (key == "re") {
        c.re = parse_num<double>(v);
    } else if (key == "eta") {
        c.eta = parse_num<double>(v);
    } else if (key == "decoder") {
        c.decoders.clear();
        for (const auto& x : split_list(v)) c.decoders.push_back(slru::parse_decoder(x));
    } else if (key == "variant") {
        c.variant = parse_variant(v);
    } else if (key == "detect") {
        if (v == "both") {
            c.detect = slru::DetectMode::Both;
        } else if (v == "one") {
            c.detect = slru::DetectMode::OneType;
        } else {
            throw std::invalid_argument("detect must be both or one");
        }
    } else if (key == "detect_ratio") {
        c.detect_ratio = parse_num<double>(v);
    } else if (key == "shots") {
        c.shots = parse_num<int64_t>(v);
    } else if (key == "min_failures") {
        c.min_failures = parse_num<int64_t>(v);
    } else if (key == "max_shots") {
        c.max_shots = parse_num<int64_t>(v);
    } else if (key == "seed") {
        c.seed = parse_num<uint64_t>(v);
    } else if (key == "workers") {
        c.workers = parse_num<int>(v);
    } else if (key == "z_basis") {
        c.z_basis = parse_bool(v);
    } else if (key == "timing") {
        c.timing = parse_bool(v);
    } else {
        throw std::invalid_argument("unknown config key '" + key + "'");
    }
}

void validate(const slru::RunConfig& c) {
    try {
        c.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
}

std::string outcome_text(const std::vector<slru::InjectOutcome>& outs, slru::Basis basis) {
    const char* o1 = basis == slru::Basis::X ? "X1" : "Z1";
    const char* o2 = basis == slru::Basis::X ? "X2" : "Z2";
    std::ostringstream out;
    for (const auto& o : outs) {
        out << slru::decoder_name(o.decoder) << ".realizations=" << o.realizations << "\n"
            << slru::decoder_name(o.decoder) << ".failures=" << o.failures << "\n"
            << slru::decoder_name(o.decoder) << ".fail_" << o1 << "=" << o.fail_obs[0] << "\n"
            << slru::decoder_name(o.decoder) << ".fail_" << o2 << "=" << o.fail_obs[1] << "\n";
    }
    return out.str();
}

}  // namespace

extern "C" {

const char* slru_version(void) { return "0.1.0"; }

const char* slru_last_error(void) { return g_error.c_str(); }

const char* slru_status_string(slru_status s) {
    switch (s) {
        case SLRU_OK: return "ok";
        case SLRU_ERR_ARGUMENT: return "invalid argument";
        case SLRU_ERR_CONFIG: return "invalid configuration";
        case SLRU_ERR_IO: return "i/o error";
        case SLRU_ERR_MISMATCH: return "table mismatch";
        case SLRU_ERR_FIT: return "fit failed";
        case SLRU_ERR_INTERNAL: return "internal error";
    }
    return "unknown status";
}

const char* slru_text_data(const slru_text* t) { return t ? t->data.c_str() : ""; }
size_t slru_text_size(const slru_text* t) { return t ? t->data.size() : 0; }
void slru_text_free(slru_text* t) { delete t; }

slru_status slru_config_new(slru_config** out) {
    if (!out) return fail(SLRU_ERR_ARGUMENT, "null output pointer");
    return guard([&] {
        *out = new slru_config;
        return SLRU_OK;
    });
}

void slru_config_free(slru_config* cfg) { delete cfg; }

slru_status slru_config_set(slru_config* cfg, const char* key, const char* value) {
    if (!cfg || !key || !value) return fail(SLRU_ERR_ARGUMENT, "null argument");
    return guard([&] {
        // Work on a copy so a rejected value leaves the config untouched.
        slru::RunConfig next = cfg->run;
        set_key(next, key, value);
        cfg->run = std::move(next);
        return SLRU_OK;
    });
}

slru_status slru_config_validate(const slru_config* cfg) {
    if (!cfg) return fail(SLRU_ERR_ARGUMENT, "null config");
    return guard([&] {
        validate(cfg->run);
        return SLRU_OK;
    });
}

slru_status slru_simulate(const slru_config* cfg, slru_progress_fn progress, void* user, slru_text** csv) {
    if (!cfg || !csv) return fail(SLRU_ERR_ARGUMENT, "null argument");
    return guard([&] {
        validate(cfg->run);
        slru::ProgressFn fn;
        if (progress) {
            fn = [&](const slru::CellResult& r) {
                slru_cell c{r.d, r.rounds, r.p, slru::decoder_name(r.decoder), r.shots, {}};
                for (int i = 0; i < 4; i++) c.fail[i] = r.fail[i];
                progress(&c, user);
            };
        }
        auto rows = slru::run_simulate(cfg->run, fn);
        *csv = make_text(slru::to_csv(cfg->run, rows));
        return SLRU_OK;
    });
}

slru_status slru_fit_threshold(const char* csv, const char* observable, slru_text** report) {
    if (!csv || !report) return fail(SLRU_ERR_ARGUMENT, "null argument");
    return guard([&] {
        auto pts = slru::read_rate_points(csv, observable ? observable : "both");
        auto r = slru::fit_threshold(pts);
        *report = make_text(r.to_text());
        if (!r.ok) return fail(SLRU_ERR_FIT, r.message.c_str());
        return SLRU_OK;
    });
}

slru_status slru_fit_distance(const char* csv, const char* observable, double p_ref, slru_text** report) {
    if (!csv || !report) return fail(SLRU_ERR_ARGUMENT, "null argument");
    if (!(p_ref > 0.0)) return fail(SLRU_ERR_ARGUMENT, "p_ref must be positive");
    return guard([&] {
        auto pts = slru::read_rate_points(csv, observable ? observable : "x2");
        auto r = slru::fit_distance(pts, p_ref);
        *report = make_text(r.to_text());
        if (!r.ok) return fail(SLRU_ERR_FIT, r.message.c_str());
        return SLRU_OK;
    });
}

slru_status slru_verify_tables(slru_text** report) {
    if (!report) return fail(SLRU_ERR_ARGUMENT, "null argument");
    return guard([&] {
        std::ostringstream out;
        int bad = 0;
        for (auto v : {slru::Variant::FiveCnot, slru::Variant::FeedForward}) {
            auto L = slru::build_layout(5);
            out << "# variant " << slru::variant_name(v) << "\n";
            for (const auto& e : slru::derive_fault_tables(L, v)) {
                out << slru::describe(e) << "\n";
                if (!e.match) bad++;
            }
        }
        out << "mismatches=" << bad << "\n";
        *report = make_text(out.str());
        if (bad) return fail(SLRU_ERR_MISMATCH, "derived tables differ from the reference");
        return SLRU_OK;
    });
}

slru_status slru_inject(const slru_config* cfg, const char* const* faults, size_t count, const char* basis,
                        slru_text** report) {
    if (!cfg || !report || (count && !faults)) return fail(SLRU_ERR_ARGUMENT, "null argument");
    if (count == 0) return fail(SLRU_ERR_ARGUMENT, "no fault given");
    return guard([&] {
        validate(cfg->run);
        auto b = parse_basis(basis);
        std::vector<slru::FaultSpec> specs;
        for (size_t i = 0; i < count; i++) specs.push_back(slru::parse_fault(faults[i]));
        auto L = slru::build_layout(cfg->run.distances.front());
        auto rep = slru::run_inject(L, cfg->run, cfg->run.ps.front(), specs, b);
        std::ostringstream out;
        out << "d=" << L.d << "\nbasis=" << (b == slru::Basis::X ? "X" : "Z") << "\n";
        for (const auto& f : rep.faults) out << "fault=" << slru::fault_text(f) << "\n";
        out << "rank=" << rep.rank << "\nvisibility_patterns=" << rep.visibility_patterns << "\n";
        out << outcome_text(rep.outcomes, b);
        *report = make_text(out.str());
        return SLRU_OK;
    });
}

slru_status slru_scan_critical(const slru_config* cfg, int k, const char* basis, slru_text** report) {
    if (!cfg || !report) return fail(SLRU_ERR_ARGUMENT, "null argument");
    return guard([&] {
        validate(cfg->run);
        auto b = parse_basis(basis);
        auto L = slru::build_layout(cfg->run.distances.front());
        auto s = slru::scan_critical(L, cfg->run, cfg->run.ps.front(), k, b);
        std::ostringstream out;
        out << "d=" << L.d << "\nfaults=" << s.faults_per_config << "\nconfigurations=" << s.configurations << "\n";
        out << outcome_text(s.totals, b);
        for (size_t i = 0; i < s.totals.size(); i++) {
            const char* n = slru::decoder_name(s.totals[i].decoder);
            out << n << ".failing_configurations=" << s.failing_configurations[i] << "\n";
            if (!s.first_failure[i].empty()) out << n << ".first_failure=" << s.first_failure[i] << "\n";
        }
        *report = make_text(out.str());
        return SLRU_OK;
    });
}

slru_status slru_dump_graph(const slru_config* cfg, const char* basis, slru_text** dump) {
    if (!cfg || !dump) return fail(SLRU_ERR_ARGUMENT, "null argument");
    return guard([&] {
        validate(cfg->run);
        auto L = slru::build_layout(cfg->run.distances.front());
        auto g = slru::build_base_graph(L, cfg->run.noise(cfg->run.ps.front()), parse_basis(basis), cfg->run.rounds);
        *dump = make_text(g.dump());
        return SLRU_OK;
    });
}

}  // extern "C"
