// Shared fixtures and independent oracles for the test suites. Everything
// here is deliberately brute-force and kept separate from the library
// implementation it checks.
#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "hma/gcn.hpp"
#include "hma/hierarchy.hpp"
#include "hma/reassign.hpp"
#include "hma/types.hpp"
#include "hma/util.hpp"

namespace test_helpers {

inline hma::ClassHierarchy make_hierarchy(
    const std::vector<std::pair<std::string, std::string>>& edges, const std::string& root) {
    hma::RawHierarchyDag dag;
    std::set<std::string> seen;
    for (const auto& [c, p] : edges) {
        for (const auto& v : {c, p})
            if (seen.insert(v).second) dag.classes.push_back(v);
        dag.edges.emplace_back(c, p);
    }
    if (seen.insert(root).second) dag.classes.push_back(root);
    return hma::dag_to_tree(dag, root);
}

inline hma::LabelMatrix make_labels(const hma::ClassHierarchy& h, int n_instances,
                                    const std::vector<hma::Pair>& ones = {}) {
    hma::LabelMatrix y;
    for (int i = 0; i < n_instances; ++i) y.instance_ids.push_back("i" + std::to_string(i));
    y.class_ids = h.classes();
    y.values.assign(y.rows() * y.cols(), 0);
    for (const auto& [i, c] : ones) y.at(i, c) = 1;
    return y;
}

inline hma::ProbabilityMatrix make_probs(const hma::LabelMatrix& like,
                                         const std::vector<double>& values) {
    hma::ProbabilityMatrix p;
    p.instance_ids = like.instance_ids;
    p.class_ids = like.class_ids;
    p.values = values;
    return p;
}

// Random tree hierarchy with up to max_classes classes.
inline hma::ClassHierarchy random_hierarchy(hma::Rng& rng, int max_classes) {
    int n = 2 + static_cast<int>(rng.uniform_index(max_classes - 1));
    std::vector<std::pair<std::string, std::string>> edges;
    auto name = [](int k) { return "c" + std::to_string(k); };
    for (int k = 1; k < n; ++k)
        edges.emplace_back(name(k), name(static_cast<int>(rng.uniform_index(k))));
    return make_hierarchy(edges, name(0));
}

// Random ancestor-closed label matrix.
inline hma::LabelMatrix random_labels(hma::Rng& rng, const hma::ClassHierarchy& h,
                                      int n_instances) {
    auto y = make_labels(h, n_instances);
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (std::size_t c = 0; c < y.cols(); ++c) {
            if (rng.uniform_real() < 0.3) {
                for (int v = static_cast<int>(c); v != -1; v = h.parent(v)) y.at(i, v) = 1;
            }
        }
    }
    return y;
}

// Random probability matrix already satisfying parent >= child.
inline hma::ProbabilityMatrix random_monotone_probs(hma::Rng& rng, const hma::LabelMatrix& y,
                                                    const hma::ClassHierarchy& h) {
    hma::ProbabilityMatrix p;
    p.instance_ids = y.instance_ids;
    p.class_ids = y.class_ids;
    p.values.assign(y.rows() * y.cols(), 0.0);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t c = 0; c < p.cols(); ++c) {
            int par = h.parent(static_cast<int>(c));
            double cap = par < 0 ? 1.0 : p.at(i, par);
            // Occasional exact zeros exercise the Y' > 0 eligibility edge.
            double v = rng.uniform_real() < 0.15 ? 0.0 : rng.uniform_real() * cap;
            p.at(i, c) = v;
        }
    }
    return p;
}

// Straight-line transcription of the path-scoring and selection procedure:
// materialize every (instance, path) pair, aggregate, sort, slice, dedup.
inline std::vector<hma::Pair> reassign_oracle(const hma::LabelMatrix& y,
                                              const hma::ProbabilityMatrix& yp,
                                              const hma::ClassHierarchy& h,
                                              hma::Aggregator agg, long n_p) {
    struct Entry {
        double score;
        std::string instance_id;
        std::string leaf_id;
        std::vector<hma::Pair> annot;
    };
    std::vector<Entry> entries;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (const auto& path : h.leaf_paths()) {
            std::vector<double> probs;
            std::vector<hma::Pair> annot;
            for (int c : path) {
                if (y.at(i, c) == 0 && yp.at(i, c) > 0.0) {
                    probs.push_back(yp.at(i, c));
                    annot.emplace_back(static_cast<int>(i), c);
                }
            }
            if (probs.empty()) continue;
            double score = 0.0;
            if (agg == hma::Aggregator::sum || agg == hma::Aggregator::average) {
                for (double v : probs) score += v;
                if (agg == hma::Aggregator::average) score /= probs.size();
            } else {
                score = *std::min_element(probs.begin(), probs.end());
            }
            entries.push_back({score, y.instance_ids[i], h.class_id(path.front()), annot});
        }
    }
    std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.score != b.score) return a.score > b.score;
        if (a.instance_id != b.instance_id) return a.instance_id < b.instance_id;
        return a.leaf_id < b.leaf_id;
    });
    std::vector<hma::Pair> selected;
    std::set<hma::Pair> seen;
    for (long r = 0; r < std::min<long>(n_p, (long)entries.size()); ++r)
        for (const auto& pair : entries[r].annot)
            if (seen.insert(pair).second) selected.push_back(pair);
    return selected;
}

// Checks that selection ∪ Y=1 is ancestor-closed per instance.
inline bool closure_holds(const std::vector<hma::Pair>& selection, const hma::LabelMatrix& y,
                          const hma::ClassHierarchy& h) {
    std::set<hma::Pair> sel(selection.begin(), selection.end());
    for (const auto& [i, c] : sel) {
        for (int a = h.parent(c); a != -1; a = h.parent(a)) {
            if (y.at(i, a) == 0 && !sel.count({i, a})) return false;
        }
    }
    return true;
}

// ---- graph oracles (exhaustive, independent of src/gcn.cpp) ----

struct GraphOracle {
    int n;
    std::vector<std::vector<int>> adj;
    std::vector<std::vector<int>> dist;  // -1 unreachable

    explicit GraphOracle(const hma::CoexpressionGraph& g)
        : n(static_cast<int>(g.size())), adj(g.adjacency), dist(n, std::vector<int>(n, -1)) {
        // Floyd-Warshall style BFS-free all-pairs on the unweighted graph.
        for (int s = 0; s < n; ++s) {
            dist[s][s] = 0;
            std::vector<int> frontier{s};
            int d = 0;
            while (!frontier.empty()) {
                ++d;
                std::vector<int> next;
                for (int v : frontier)
                    for (int w : adj[v])
                        if (dist[s][w] == -1) {
                            dist[s][w] = d;
                            next.push_back(w);
                        }
                frontier = next;
            }
        }
    }

    double eccentricity(int v) const {
        int e = 0;
        for (int w = 0; w < n; ++w)
            if (dist[v][w] > e) e = dist[v][w];
        return e;
    }

    double closeness(int v) const {
        long sum = 0;
        int reached = 0;
        for (int w = 0; w < n; ++w)
            if (w != v && dist[v][w] > 0) {
                sum += dist[v][w];
                ++reached;
            }
        return reached > 0 ? double(reached) / double(sum) : 0.0;
    }

    double clustering(int v) const {
        std::set<int> nb(adj[v].begin(), adj[v].end());
        int d = static_cast<int>(nb.size());
        if (d < 2) return 0.0;
        int tri = 0;
        for (int a : nb)
            for (int b : nb)
                if (a < b && std::find(adj[a].begin(), adj[a].end(), b) != adj[a].end()) ++tri;
        return 2.0 * tri / (double(d) * (d - 1));
    }

    // Betweenness by explicit shortest-path counting over all pairs.
    std::vector<double> betweenness() const {
        std::vector<double> bc(n, 0.0);
        // sigma[s][t]: number of shortest s-t paths; via[s][t][v] computed by
        // the pair-counting identity sigma_sv * sigma_vt when on a geodesic.
        std::vector<std::vector<double>> sigma(n, std::vector<double>(n, 0.0));
        for (int s = 0; s < n; ++s) {
            sigma[s][s] = 1.0;
            // count by dynamic programming over increasing distance
            std::vector<int> order(n);
            for (int v = 0; v < n; ++v) order[v] = v;
            std::sort(order.begin(), order.end(), [&](int a, int b) {
                return dist[s][a] < dist[s][b];
            });
            for (int v : order) {
                if (v == s || dist[s][v] <= 0) continue;
                for (int w : adj[v])
                    if (dist[s][w] == dist[s][v] - 1) sigma[s][v] += sigma[s][w];
            }
        }
        for (int s = 0; s < n; ++s)
            for (int t = s + 1; t < n; ++t) {
                if (dist[s][t] <= 0 || sigma[s][t] == 0) continue;
                for (int v = 0; v < n; ++v) {
                    if (v == s || v == t) continue;
                    if (dist[s][v] >= 0 && dist[v][t] >= 0 &&
                        dist[s][v] + dist[v][t] == dist[s][t])
                        bc[v] += sigma[s][v] * sigma[v][t] / sigma[s][t];
                }
            }
        return bc;
    }

    std::vector<int> coreness() const {
        std::vector<int> deg(n), core(n, 0);
        std::vector<bool> removed(n, false);
        for (int v = 0; v < n; ++v) deg[v] = static_cast<int>(adj[v].size());
        int k = 0;
        for (int step = 0; step < n; ++step) {
            int best = -1;
            for (int v = 0; v < n; ++v)
                if (!removed[v] && (best == -1 || deg[v] < deg[best])) best = v;
            k = std::max(k, deg[best]);
            core[best] = k;
            removed[best] = true;
            for (int w : adj[best])
                if (!removed[w]) --deg[w];
        }
        return core;
    }

    // Dense HITS power iteration to 1e-10, unit-maximum normalization.
    std::pair<std::vector<double>, std::vector<double>> hits() const {
        std::vector<double> hub(n, 1.0), auth(n, 1.0);
        auto unit_max = [&](std::vector<double>& v) {
            double m = 0.0;
            for (double x : v) m = std::max(m, std::abs(x));
            if (m > 0)
                for (double& x : v) x /= m;
        };
        for (int iter = 0; iter < 1000; ++iter) {
            std::vector<double> a(n, 0.0), hnew(n, 0.0);
            for (int v = 0; v < n; ++v)
                for (int w : adj[v]) a[w] += hub[v];
            unit_max(a);
            for (int v = 0; v < n; ++v)
                for (int w : adj[v]) hnew[v] += a[w];
            unit_max(hnew);
            double diff = 0.0;
            for (int v = 0; v < n; ++v) diff = std::max(diff, std::abs(hnew[v] - hub[v]));
            hub = hnew;
            auth = a;
            if (diff < 1e-10) break;
        }
        unit_max(hub);
        unit_max(auth);
        return {hub, auth};
    }
};

inline hma::CoexpressionGraph random_graph(hma::Rng& rng, int max_vertices) {
    int n = 2 + static_cast<int>(rng.uniform_index(max_vertices - 1));
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<double> weights;
    auto name = [](int k) { return "v" + std::to_string(k); };
    double density = 0.05 + rng.uniform_real() * 0.25;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (rng.uniform_real() < density) {
                edges.emplace_back(name(a), name(b));
                weights.push_back(1.0 + rng.uniform_real() * 99.0);
            }
    if (edges.empty()) {
        edges.emplace_back(name(0), name(1));
        weights.push_back(1.0);
    }
    return hma::graph_from_edges(edges, weights, 100.0);
}

}  // namespace test_helpers
