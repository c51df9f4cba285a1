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

#ifndef SWAPLRU_EXPERIMENT_HPP
#define SWAPLRU_EXPERIMENT_HPP

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "analysis.hpp"
#include "dem.hpp"
#include "matching.hpp"

namespace slru {

struct RunConfig {
    std::string run_id = "run";
    std::vector<int> distances = {3};
    int rounds = 0;  // 0: d rounds
    std::vector<double> ps = {0.01};
    double re = 1.0;
    double eta = 0.0755;
    std::vector<DecoderKind> decoders = {DecoderKind::Trivial};
    Variant variant = Variant::FiveCnot;
    DetectMode detect = DetectMode::Both;
    double detect_ratio = 1.0;
    int64_t shots = 1000;
    // Adaptive sampling: keep adding batches until every decoder has
    // min_failures X2 failures or max_shots is reached. 0 disables it.
    int64_t min_failures = 0;
    int64_t max_shots = 0;
    uint64_t seed = 1;
    int workers = 0;  // 0: environment default
    bool z_basis = false;
    bool timing = false;

    NoiseConfig noise(double p) const;
    void validate() const;
};

/// Worker count from SWAPLRU_WORKERS, else the hardware concurrency.
int default_workers();

struct CellResult {
    int d = 0;
    int rounds = 0;
    double p = 0.0;
    DecoderKind decoder = DecoderKind::Trivial;
    int64_t shots = 0;
    int64_t fail[4] = {0, 0, 0, 0};
    double wall_seconds = 0.0;
};

/// Seed of one shot, a pure function of (master seed, cell, shot index).
uint64_t shot_seed(uint64_t master, int d, int rounds, double p, int64_t shot);

using ProgressFn = std::function<void(const CellResult&)>;

std::vector<CellResult> run_simulate(const RunConfig& cfg, const ProgressFn& progress = nullptr);

std::string csv_header();
std::string csv_row(const RunConfig& cfg, const CellResult& r);
std::string to_csv(const RunConfig& cfg, const std::vector<CellResult>& rows);

/// Reads rows written by to_csv. observable: "x2" or "both" (mean of X1, X2).
std::vector<RatePoint> read_rate_points(const std::string& csv_text, const std::string& observable = "x2");

// ---------------------------------------------------------------------------
// Exhaustive fault injection.

enum class InjectKind { LeakControl, LeakTarget, LeakBoth, Pauli };

struct FaultSpec {
    int round = 1;
    int slot = 1;  // 1-based time step
    int stab = 0;  // gate index (stabilizer id)
    InjectKind kind = InjectKind::LeakBoth;
    int pauli = 0;  // for Pauli: control = pauli & 3, target = pauli >> 2 (0 I, 1 X, 2 Z, 3 Y)
};

/// Parses "round:slot:stab:kind" with kind in lc, lt, ll or a Pauli pair like XI.
FaultSpec parse_fault(const std::string& text);
std::string fault_text(const FaultSpec& f);

struct InjectOutcome {
    DecoderKind decoder = DecoderKind::Trivial;
    int64_t realizations = 0;
    int64_t failures = 0;  // realizations with any logical failure in the basis
    int64_t fail_obs[2] = {0, 0};
    bool any_failure() const { return failures > 0; }
};

struct InjectReport {
    std::vector<FaultSpec> faults;
    std::vector<InjectOutcome> outcomes;
    int rank = 0;
    int visibility_patterns = 0;
};

/// Enumerates every realization of the faults (all coin values and every
/// allowed leak-visibility pattern) on a noiseless background.
InjectReport run_inject(const ToricLayout& L, const RunConfig& cfg, double p, const std::vector<FaultSpec>& faults,
                        Basis basis = Basis::X);

struct ScanSummary {
    int faults_per_config = 0;
    int64_t configurations = 0;
    std::vector<InjectOutcome> totals;
    std::vector<int64_t> failing_configurations;
    std::vector<std::string> first_failure;
};

/// All placements of k correlated two-atom faults at slot 1 of the checks of
/// the basis (k = 1 or 2). The first fault sits at check (0, 0).
ScanSummary scan_critical(const ToricLayout& L, const RunConfig& cfg, double p, int k, Basis basis = Basis::X);

}  // namespace slru

#endif
