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

#ifndef SWAPLRU_DEM_HPP
#define SWAPLRU_DEM_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "lattice.hpp"
#include "noise.hpp"
#include "propagation.hpp"

namespace slru {

enum class DecoderKind { Trivial, Located, Critical };

const char* decoder_name(DecoderKind k);
DecoderKind parse_decoder(const std::string& s);

// Origin of an edge, recovered from its detector pair.
enum class EdgeKind { Data, Measurement, Hook };

struct GraphEdge {
    int a = 0;  // a < b
    int b = 0;
    uint8_t obs = 0;
    double prior = 0.0;
    EdgeKind kind = EdgeKind::Hook;
    int site = -1;  // data index for Data, stabilizer for Measurement
    int time = 0;   // epoch of the data error or round of the measurement
};

/// Edge probability p -> weight log((1 - p) / p). p = 0 disables the edge.
double edge_weight(double p);
/// Independent union of two flip probabilities.
inline double xor_prob(double a, double b) { return a * (1.0 - b) + b * (1.0 - a); }

struct Overlay {
    std::vector<std::pair<int, double>> changes;  // (edge, new probability)
    bool empty() const { return changes.empty(); }
};

class DetectorGraph {
   public:
    int d = 0;
    int rounds = 0;
    Basis basis = Basis::X;
    int num_detectors = 0;
    std::vector<GraphEdge> edges;
    // Current probability and weights of each edge.
    std::vector<double> prob;
    std::vector<double> weight;
    std::vector<int64_t> iweight;  // fixed point, -1 when disabled
    double scale = 0.0;            // iweight = round(weight * scale)

    // CSR adjacency: for node u, adj[adj_start[u] .. adj_start[u + 1]) are edge ids.
    std::vector<int> adj_start;
    std::vector<int> adj;

    // Leak bookkeeping, indexed by key stab * (rounds + 1) + (r - 1).
    // located[key]: (edge, number of the key's sites whose leak can flip it).
    std::vector<std::vector<std::pair<int, int>>> located;
    std::vector<int> located_sites;
    // critical[key]: data edges of the correlated two-atom fault at slot 1.
    std::vector<std::vector<int>> critical;

    int find_edge(int a, int b, uint8_t obs) const;
    int add_edge(const SparseEffect& eff, double p);
    void finalize();

    /// Sets an edge weight directly (p follows from w).
    void set_weight(int e, double w);
    void set_prob(int e, double p);

    std::string dump() const;

   private:
    std::vector<std::vector<std::pair<int, int>>> lookup_;  // node -> (other, edge)
};

/// Effect of a detector in this graph's basis for the check measuring stab.
int detector_of(const ToricLayout& L, const DetectorGraph& g, int stab, int t);

/// Builds the base graph by injecting every fault branch at every physical gate.
DetectorGraph build_base_graph(const ToricLayout& L, const NoiseConfig& cfg, Basis basis, int rounds = 0);

/// Defects (flipped detectors) of a shot in the graph's basis.
std::vector<int> shot_defects(const ToricLayout& L, const DetectorGraph& g, const ShotRecord& shot);

Overlay reweight_located(const DetectorGraph& g, const ShotRecord& shot, const NoiseConfig& cfg);
Overlay reweight_critical(const DetectorGraph& g, const ShotRecord& shot, const NoiseConfig& cfg);
Overlay reweight(DecoderKind kind, const DetectorGraph& g, const ShotRecord& shot, const NoiseConfig& cfg);

/// Applies an overlay in place and returns the previous values for undo.
Overlay apply_overlay(DetectorGraph& g, const Overlay& ov);

}  // namespace slru

#endif
