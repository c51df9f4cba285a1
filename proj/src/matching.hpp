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

#ifndef SWAPLRU_MATCHING_HPP
#define SWAPLRU_MATCHING_HPP

#include <array>
#include <cstdint>
#include <tuple>
#include <vector>

#include "dem.hpp"

namespace slru {

struct Correction {
    std::vector<std::array<int, 2>> pairs;  // detector ids
    std::vector<std::vector<int>> paths;    // edge ids per pair
    uint8_t obs = 0;
    double weight = 0.0;
};

/// Maximum-weight perfect matching on a dense complete graph with integer
/// weights (O(n^3) primal-dual blossom). Returns mate[i] for i in 0..n-1.
/// Weights must be positive; 0 means no edge.
std::vector<int> max_weight_perfect_matching(int n, const std::vector<int64_t>& w);

/// Reusable decoder state for one graph.
class Matcher {
   public:
    explicit Matcher(const DetectorGraph& g);
    /// Without paths only pairs, weight and observable flips are filled in.
    Correction decode(const std::vector<int>& defects, bool with_paths = true);

   private:
    static constexpr int kNearDefects = 8;
    int64_t shortest_paths(int src, int need, int64_t limit);
    const DetectorGraph* g_;
    std::vector<int64_t> dist_;
    std::vector<int> hops_;
    std::vector<int> pred_edge_;
    std::vector<double> real_;
    std::vector<uint8_t> obs_;
    std::vector<int> stamp_;
    std::vector<uint8_t> settled_;
    std::vector<std::tuple<int64_t, int, int>> heap_;
    std::vector<int> target_stamp_;
    int epoch_ = 0;
    int tepoch_ = 0;
};

/// Minimum-weight perfect matching of the defects on the graph's current weights.
Correction decode(const DetectorGraph& g, const std::vector<int>& defects, bool with_paths = true);

/// Exhaustive oracle: all-pairs shortest paths and every perfect pairing.
Correction brute_force_decode(const DetectorGraph& g, const std::vector<int>& defects);

/// Second oracle: minimum pairing weight by dynamic programming over subsets.
double subset_dp_weight(const DetectorGraph& g, const std::vector<int>& defects);

struct Verdict {
    bool fail[4] = {false, false, false, false};  // X1, X2, Z1, Z2
};

/// Compares predicted logical bits of one basis with the realized frame.
void judge_shot(const Correction& c, Basis basis, const ShotRecord& shot, Verdict& v);

}  // namespace slru

#endif
