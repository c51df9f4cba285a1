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

#include "matching.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <queue>
#include <stdexcept>
#include <tuple>

namespace slru {

namespace {

// Weighted blossom on vertices 1..n, blossoms n+1..2n. Vertex 0 is a sentinel.
class Blossom {
   public:
    Blossom(int n, const std::vector<int64_t>& w) : n_(n), m_(2 * n + 1) {
        g_.assign(m_ * m_, Edge{});
        for (int u = 1; u <= n; u++) {
            for (int v = 1; v <= n; v++) g_[u * m_ + v] = Edge{u, v, u == v ? 0 : w[(u - 1) * n + (v - 1)]};
        }
        lab_.assign(m_, 0);
        match_.assign(m_, 0);
        slack_.assign(m_, 0);
        st_.assign(m_, 0);
        pa_.assign(m_, 0);
        S_.assign(m_, 0);
        vis_.assign(m_, 0);
        flower_from_.assign(m_ * m_, 0);
        flower_.assign(m_, {});
    }

    std::vector<int> solve() {
        n_x_ = n_;
        for (int u = 0; u <= n_; u++) {
            st_[u] = u;
            flower_[u].clear();
        }
        int64_t w_max = 0;
        for (int u = 1; u <= n_; u++) {
            for (int v = 1; v <= n_; v++) {
                ff(u, v) = u == v ? u : 0;
                w_max = std::max(w_max, G(u, v).w);
            }
        }
        for (int u = 1; u <= n_; u++) lab_[u] = w_max;
        while (matching()) {
        }
        std::vector<int> mate(n_, -1);
        for (int u = 1; u <= n_; u++) {
            if (match_[u]) mate[u - 1] = match_[u] - 1;
        }
        return mate;
    }

   private:
    struct Edge {
        int u = 0, v = 0;
        int64_t w = 0;
    };
    Edge& G(int u, int v) { return g_[u * m_ + v]; }
    int& ff(int b, int x) { return flower_from_[b * m_ + x]; }
    int64_t dist(const Edge& e) const { return lab_[e.u] + lab_[e.v] - e.w * 2; }

    void update_slack(int u, int x) {
        if (!slack_[x] || dist(G(u, x)) < dist(G(slack_[x], x))) slack_[x] = u;
    }
    void set_slack(int x) {
        slack_[x] = 0;
        for (int u = 1; u <= n_; u++) {
            if (G(u, x).w > 0 && st_[u] != x && S_[st_[u]] == 0) update_slack(u, x);
        }
    }
    void q_push(int x) {
        if (x <= n_) {
            q_.push_back(x);
        } else {
            for (int y : flower_[x]) q_push(y);
        }
    }
    void set_st(int x, int b) {
        st_[x] = b;
        if (x > n_) {
            for (int y : flower_[x]) set_st(y, b);
        }
    }
    int get_pr(int b, int xr) {
        auto& f = flower_[b];
        int pr = static_cast<int>(std::find(f.begin(), f.end(), xr) - f.begin());
        if (pr % 2 == 1) {
            std::reverse(f.begin() + 1, f.end());
            return static_cast<int>(f.size()) - pr;
        }
        return pr;
    }
    void set_match(int u, int v) {
        match_[u] = G(u, v).v;
        if (u > n_) {
            Edge e = G(u, v);
            int xr = ff(u, e.u), pr = get_pr(u, xr);
            for (int i = 0; i < pr; i++) set_match(flower_[u][i], flower_[u][i ^ 1]);
            set_match(xr, v);
            std::rotate(flower_[u].begin(), flower_[u].begin() + pr, flower_[u].end());
        }
    }
    void augment(int u, int v) {
        for (;;) {
            int xnv = st_[match_[u]];
            set_match(u, v);
            if (!xnv) return;
            set_match(xnv, st_[pa_[xnv]]);
            u = st_[pa_[xnv]];
            v = xnv;
        }
    }
    int get_lca(int u, int v) {
        for (++t_; u || v; std::swap(u, v)) {
            if (u == 0) continue;
            if (vis_[u] == t_) return u;
            vis_[u] = t_;
            u = st_[match_[u]];
            if (u) u = st_[pa_[u]];
        }
        return 0;
    }
    void add_blossom(int u, int lca, int v) {
        int b = n_ + 1;
        while (b <= n_x_ && st_[b]) b++;
        if (b > n_x_) n_x_++;
        lab_[b] = 0;
        S_[b] = 0;
        match_[b] = match_[lca];
        auto& f = flower_[b];
        f.clear();
        f.push_back(lca);
        for (int x = u, y; x != lca; x = st_[pa_[y]]) {
            f.push_back(x);
            f.push_back(y = st_[match_[x]]);
            q_push(y);
        }
        std::reverse(f.begin() + 1, f.end());
        for (int x = v, y; x != lca; x = st_[pa_[y]]) {
            f.push_back(x);
            f.push_back(y = st_[match_[x]]);
            q_push(y);
        }
        set_st(b, b);
        for (int x = 1; x <= n_x_; x++) G(b, x).w = G(x, b).w = 0;
        for (int x = 1; x <= n_; x++) ff(b, x) = 0;
        for (int xs : f) {
            for (int x = 1; x <= n_x_; x++) {
                if (G(b, x).w == 0 || dist(G(xs, x)) < dist(G(b, x))) {
                    G(b, x) = G(xs, x);
                    G(x, b) = G(x, xs);
                }
            }
            for (int x = 1; x <= n_; x++) {
                if (ff(xs, x)) ff(b, x) = xs;
            }
        }
        set_slack(b);
    }
    void expand_blossom(int b) {
        for (int y : flower_[b]) set_st(y, y);
        int xr = ff(b, G(b, pa_[b]).u), pr = get_pr(b, xr);
        for (int i = 0; i < pr; i += 2) {
            int xs = flower_[b][i], xns = flower_[b][i + 1];
            pa_[xs] = G(xns, xs).u;
            S_[xs] = 1;
            S_[xns] = 0;
            slack_[xs] = 0;
            set_slack(xns);
            q_push(xns);
        }
        S_[xr] = 1;
        pa_[xr] = pa_[b];
        for (size_t i = pr + 1; i < flower_[b].size(); i++) {
            int xs = flower_[b][i];
            S_[xs] = -1;
            set_slack(xs);
        }
        st_[b] = 0;
    }
    bool on_found_edge(const Edge& e) {
        int u = st_[e.u], v = st_[e.v];
        if (S_[v] == -1) {
            pa_[v] = e.u;
            S_[v] = 1;
            int nu = st_[match_[v]];
            slack_[v] = slack_[nu] = 0;
            S_[nu] = 0;
            q_push(nu);
        } else if (S_[v] == 0) {
            int lca = get_lca(u, v);
            if (!lca) {
                augment(u, v);
                augment(v, u);
                return true;
            }
            add_blossom(u, lca, v);
        }
        return false;
    }
    bool matching() {
        std::fill(S_.begin() + 1, S_.begin() + n_x_ + 1, -1);
        std::fill(slack_.begin() + 1, slack_.begin() + n_x_ + 1, 0);
        q_.clear();
        for (int x = 1; x <= n_x_; x++) {
            if (st_[x] == x && !match_[x]) {
                pa_[x] = 0;
                S_[x] = 0;
                q_push(x);
            }
        }
        if (q_.empty()) return false;
        const int64_t inf = std::numeric_limits<int64_t>::max();
        for (;;) {
            while (!q_.empty()) {
                int u = q_.front();
                q_.pop_front();
                if (S_[st_[u]] == 1) continue;
                for (int v = 1; v <= n_; v++) {
                    if (G(u, v).w > 0 && st_[u] != st_[v]) {
                        if (dist(G(u, v)) == 0) {
                            if (on_found_edge(G(u, v))) return true;
                        } else {
                            update_slack(u, st_[v]);
                        }
                    }
                }
            }
            int64_t d = inf;
            for (int b = n_ + 1; b <= n_x_; b++) {
                if (st_[b] == b && S_[b] == 1) d = std::min(d, lab_[b] / 2);
            }
            for (int x = 1; x <= n_x_; x++) {
                if (st_[x] == x && slack_[x]) {
                    if (S_[x] == -1) {
                        d = std::min(d, dist(G(slack_[x], x)));
                    } else if (S_[x] == 0) {
                        d = std::min(d, dist(G(slack_[x], x)) / 2);
                    }
                }
            }
            for (int u = 1; u <= n_; u++) {
                if (S_[st_[u]] == 0) {
                    if (lab_[u] <= d) return false;
                    lab_[u] -= d;
                } else if (S_[st_[u]] == 1) {
                    lab_[u] += d;
                }
            }
            for (int b = n_ + 1; b <= n_x_; b++) {
                if (st_[b] == b) {
                    if (S_[st_[b]] == 0) {
                        lab_[b] += d * 2;
                    } else if (S_[st_[b]] == 1) {
                        lab_[b] -= d * 2;
                    }
                }
            }
            q_.clear();
            for (int x = 1; x <= n_x_; x++) {
                if (st_[x] == x && slack_[x] && st_[slack_[x]] != x && dist(G(slack_[x], x)) == 0) {
                    if (on_found_edge(G(slack_[x], x))) return true;
                }
            }
            for (int b = n_ + 1; b <= n_x_; b++) {
                if (st_[b] == b && S_[b] == 1 && lab_[b] == 0) expand_blossom(b);
            }
        }
    }

    int n_, m_, n_x_ = 0, t_ = 0;
    std::vector<Edge> g_;
    std::vector<int64_t> lab_;
    std::vector<int> match_, slack_, st_, pa_, S_, vis_, flower_from_;
    std::vector<std::vector<int>> flower_;
    std::deque<int> q_;
};

}  // namespace

std::vector<int> max_weight_perfect_matching(int n, const std::vector<int64_t>& w) {
    if (n == 0) return {};
    Blossom b(n, w);
    return b.solve();
}

Matcher::Matcher(const DetectorGraph& g) : g_(&g) {
    int n = g.num_detectors;
    dist_.assign(n, 0);
    hops_.assign(n, 0);
    pred_edge_.assign(n, -1);
    real_.assign(n, 0.0);
    obs_.assign(n, 0);
    stamp_.assign(n, 0);
    settled_.assign(n, 0);
    target_stamp_.assign(n, 0);
}

// Dijkstra ordered by (fixed-point weight, hops, node); among equal
// candidates the smaller predecessor id wins. Stops once `need` targets are
// settled and every node up to that distance is settled, or once the
// distance exceeds `limit`. Returns the radius within which all nodes are
// settled.
int64_t Matcher::shortest_paths(int src, int need, int64_t limit) {
    const auto& g = *g_;
    ++epoch_;
    using Key = std::tuple<int64_t, int, int>;
    heap_.clear();
    auto touch = [&](int u) {
        if (stamp_[u] != epoch_) {
            stamp_[u] = epoch_;
            dist_[u] = std::numeric_limits<int64_t>::max();
            hops_[u] = 0;
            pred_edge_[u] = -1;
            settled_[u] = 0;
        }
    };
    touch(src);
    dist_[src] = 0;
    real_[src] = 0.0;
    obs_[src] = 0;
    heap_.push_back({0, 0, src});
    int found = 0;
    while (!heap_.empty()) {
        std::pop_heap(heap_.begin(), heap_.end(), std::greater<Key>());
        auto [du, hu, u] = heap_.back();
        heap_.pop_back();
        if (du != dist_[u] || hu != hops_[u] || settled_[u]) continue;
        if (du > limit) return limit;
        settled_[u] = 1;
        if (u != src && target_stamp_[u] == tepoch_ && ++found == need) limit = du;
        for (int k = g.adj_start[u]; k < g.adj_start[u + 1]; k++) {
            int e = g.adj[k];
            int64_t w = g.iweight[e];
            if (w < 0) continue;
            const auto& E = g.edges[e];
            int v = E.a == u ? E.b : E.a;
            touch(v);
            if (settled_[v]) continue;
            int64_t nd = du + w;
            int nh = hu + 1;
            bool better = nd < dist_[v] || (nd == dist_[v] && nh < hops_[v]);
            if (!better && nd == dist_[v] && nh == hops_[v] && pred_edge_[v] >= 0) {
                const auto& P = g.edges[pred_edge_[v]];
                int pu = P.a == v ? P.b : P.a;
                better = u < pu;
            }
            if (better) {
                dist_[v] = nd;
                hops_[v] = nh;
                pred_edge_[v] = e;
                real_[v] = real_[u] + g.weight[e];
                obs_[v] = obs_[u] ^ E.obs;
                heap_.push_back({nd, nh, v});
                std::push_heap(heap_.begin(), heap_.end(), std::greater<Key>());
            }
        }
    }
    return std::numeric_limits<int64_t>::max();
}

// Exact matching with bounded searches. Each defect first searches out to its
// nearest few defects; an unexplored pair is known to cost more than either
// search radius, which is used as a lower bound. When the optimum of this
// relaxed instance only uses exact pairs it is optimal for the real one;
// otherwise the offending pairs are resolved and the instance solved again.
Correction Matcher::decode(const std::vector<int>& defects, bool with_paths) {
    Correction c;
    int n = static_cast<int>(defects.size());
    if (n % 2) throw std::logic_error("odd number of defects");
    if (n == 0) return c;
    const auto& g = *g_;
    constexpr int64_t kInf = std::numeric_limits<int64_t>::max();
    ++tepoch_;
    for (int v : defects) target_stamp_[v] = tepoch_;
    std::vector<int64_t> D(n * n, -1);  // exact distance, -1 when unknown
    std::vector<int64_t> radius(n, 0);
    // Path summaries seen from the lower index, the root the final answer uses.
    std::vector<double> R(n * n, 0.0);
    std::vector<uint8_t> O(n * n, 0), seen(n * n, 0);
    auto search = [&](int i, int need, int64_t limit) {
        radius[i] = shortest_paths(defects[i], need, limit);
        for (int j = 0; j < n; j++) {
            int v = defects[j];
            if (j == i || stamp_[v] != epoch_ || !settled_[v]) continue;
            D[i * n + j] = D[j * n + i] = dist_[v];
            if (j > i) {
                R[i * n + j] = real_[v];
                O[i * n + j] = obs_[v];
                seen[i * n + j] = 1;
            }
        }
    };
    // Dense syndromes need wider first searches to keep re-solves rare.
    int first = std::clamp(n / 8, kNearDefects, 4 * kNearDefects);
    std::vector<int> need(n, std::min(n - 1, first));
    for (int i = 0; i < n; i++) search(i, need[i], kInf);

    std::vector<int> mate;
    for (;;) {
        int64_t maxd = 0;
        std::vector<int64_t> cost(n * n, -1);
        for (int i = 0; i < n; i++) {
            for (int j = i + 1; j < n; j++) {
                int64_t m = D[i * n + j];
                if (m < 0) {
                    int64_t r = std::max(radius[i], radius[j]);
                    if (r == kInf) continue;  // provably unreachable
                    m = r + 1;
                }
                cost[i * n + j] = cost[j * n + i] = m;
                maxd = std::max(maxd, m);
            }
        }
        int64_t big = maxd * (n / 2 + 1) + 1;
        std::vector<int64_t> W(n * n, 0);
        for (int k = 0; k < n * n; k++) {
            if (cost[k] >= 0) W[k] = big - cost[k];
        }
        mate = max_weight_perfect_matching(n, W);
        bool exact = true;
        for (int i = 0; i < n; i++) {
            int j = mate[i];
            if (j < 0) throw std::runtime_error("defects could not be paired");
            if (j > i && D[i * n + j] < 0) {
                exact = false;
                // Widen both searches.
                for (int k : {i, j}) {
                    need[k] = std::min(n - 1, 2 * need[k]);
                    search(k, need[k], kInf);
                }
            }
        }
        if (exact) break;
    }

    for (int i = 0; i < n; i++) {
        int j = mate[i];
        if (j < i) continue;
        c.pairs.push_back({defects[i], defects[j]});
        if (!with_paths && seen[i * n + j]) {
            c.obs ^= O[i * n + j];
            c.weight += R[i * n + j];
            continue;
        }
        // Recover the path from a search rooted at defect i.
        ++tepoch_;
        target_stamp_[defects[j]] = tepoch_;
        shortest_paths(defects[i], 1, kInf);
        c.obs ^= obs_[defects[j]];
        c.weight += real_[defects[j]];
        if (!with_paths) continue;
        std::vector<int> path;
        int v = defects[j];
        while (v != defects[i]) {
            int e = pred_edge_[v];
            path.push_back(e);
            const auto& E = g.edges[e];
            v = E.a == v ? E.b : E.a;
        }
        c.paths.push_back(std::move(path));
    }
    return c;
}

Correction decode(const DetectorGraph& g, const std::vector<int>& defects, bool with_paths) {
    Matcher m(g);
    return m.decode(defects, with_paths);
}

namespace {

struct AllPairs {
    std::vector<double> w;
    std::vector<uint8_t> obs;
};

AllPairs all_pairs(const DetectorGraph& g, const std::vector<int>& defects) {
    int N = g.num_detectors;
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(static_cast<size_t>(N) * N, inf);
    std::vector<uint8_t> obs(static_cast<size_t>(N) * N, 0);
    for (int u = 0; u < N; u++) dist[static_cast<size_t>(u) * N + u] = 0.0;
    for (int e = 0; e < static_cast<int>(g.edges.size()); e++) {
        if (g.iweight[e] < 0) continue;
        int a = g.edges[e].a, b = g.edges[e].b;
        double w = g.weight[e];
        for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
            size_t k = static_cast<size_t>(x) * N + y;
            if (w < dist[k]) {
                dist[k] = w;
                obs[k] = g.edges[e].obs;
            }
        }
    }
    for (int k = 0; k < N; k++) {
        for (int i = 0; i < N; i++) {
            double dik = dist[static_cast<size_t>(i) * N + k];
            if (dik == inf) continue;
            for (int j = 0; j < N; j++) {
                double cand = dik + dist[static_cast<size_t>(k) * N + j];
                size_t ij = static_cast<size_t>(i) * N + j;
                if (cand < dist[ij]) {
                    dist[ij] = cand;
                    obs[ij] = obs[static_cast<size_t>(i) * N + k] ^ obs[static_cast<size_t>(k) * N + j];
                }
            }
        }
    }
    int n = static_cast<int>(defects.size());
    AllPairs ap;
    ap.w.resize(n * n);
    ap.obs.resize(n * n);
    for (int i = 0; i < n; i++) {
        for (int j = 0; j < n; j++) {
            size_t k = static_cast<size_t>(defects[i]) * N + defects[j];
            ap.w[i * n + j] = dist[k];
            ap.obs[i * n + j] = obs[k];
        }
    }
    return ap;
}

void enumerate(int n, const AllPairs& ap, std::vector<int>& used, std::vector<std::array<int, 2>>& cur, double acc,
               double& best, std::vector<std::array<int, 2>>& best_pairs) {
    int i = 0;
    while (i < n && used[i]) i++;
    if (i == n) {
        if (acc < best) {
            best = acc;
            best_pairs = cur;
        }
        return;
    }
    used[i] = 1;
    for (int j = i + 1; j < n; j++) {
        if (used[j]) continue;
        used[j] = 1;
        cur.push_back({i, j});
        enumerate(n, ap, used, cur, acc + ap.w[i * n + j], best, best_pairs);
        cur.pop_back();
        used[j] = 0;
    }
    used[i] = 0;
}

}  // namespace

Correction brute_force_decode(const DetectorGraph& g, const std::vector<int>& defects) {
    int n = static_cast<int>(defects.size());
    if (n > 10) throw std::invalid_argument("brute force decoding is limited to 10 defects");
    if (n % 2) throw std::logic_error("odd number of defects");
    Correction c;
    if (n == 0) return c;
    auto ap = all_pairs(g, defects);
    std::vector<int> used(n, 0);
    std::vector<std::array<int, 2>> cur, best_pairs;
    double best = std::numeric_limits<double>::infinity();
    enumerate(n, ap, used, cur, 0.0, best, best_pairs);
    for (auto [i, j] : best_pairs) {
        c.pairs.push_back({defects[i], defects[j]});
        c.obs ^= ap.obs[i * n + j];
    }
    c.weight = best;
    return c;
}

double subset_dp_weight(const DetectorGraph& g, const std::vector<int>& defects) {
    int n = static_cast<int>(defects.size());
    if (n > 20) throw std::invalid_argument("subset oracle is limited to 20 defects");
    if (n % 2) throw std::logic_error("odd number of defects");
    auto ap = all_pairs(g, defects);
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dp(size_t{1} << n, inf);
    dp[0] = 0.0;
    for (uint32_t m = 0; m < (1u << n); m++) {
        if (dp[m] == inf) continue;
        int i = 0;
        while (i < n && (m >> i & 1)) i++;
        if (i == n) continue;
        for (int j = i + 1; j < n; j++) {
            if (m >> j & 1) continue;
            uint32_t nm = m | (1u << i) | (1u << j);
            dp[nm] = std::min(dp[nm], dp[m] + ap.w[i * n + j]);
        }
    }
    return dp[(size_t{1} << n) - 1];
}

void judge_shot(const Correction& c, Basis basis, const ShotRecord& shot, Verdict& v) {
    int k1 = basis == Basis::X ? kX1 : kZ1;
    int k2 = basis == Basis::X ? kX2 : kZ2;
    v.fail[k1] = ((c.obs & 1) != 0) != (shot.logical[k1] != 0);
    v.fail[k2] = ((c.obs >> 1 & 1) != 0) != (shot.logical[k2] != 0);
}

}  // namespace slru
