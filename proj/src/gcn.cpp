#include "hma/gcn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "hma/util.hpp"

namespace hma {

CoexpressionGraph graph_from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::vector<double>& weights, double cutoff) {
    std::set<std::string> names;
    for (const auto& [a, b] : edges) {
        names.insert(a);
        names.insert(b);
    }
    CoexpressionGraph g;
    g.vertices.assign(names.begin(), names.end());
    std::map<std::string, int> index;
    for (std::size_t i = 0; i < g.vertices.size(); ++i)
        index[g.vertices[i]] = static_cast<int>(i);

    g.adjacency.assign(g.size(), {});
    std::set<Pair> seen;
    int self_loops = 0, repeats = 0;
    for (std::size_t k = 0; k < edges.size(); ++k) {
        int u = index[edges[k].first];
        int v = index[edges[k].second];
        if (u == v) {
            ++self_loops;
            continue;
        }
        if (u > v) std::swap(u, v);
        if (!seen.insert({u, v}).second) {
            ++repeats;
            continue;
        }
        if (weights[k] > cutoff) continue;
        g.edges.push_back({{u, v}, weights[k]});
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    if (self_loops > 0)
        std::cerr << "[gcn] warning: dropped " << self_loops << " self-loop(s)\n";
    if (repeats > 0)
        std::cerr << "[gcn] warning: " << repeats
                  << " repeated edge(s), first weight kept\n";
    for (auto& adj : g.adjacency) std::sort(adj.begin(), adj.end());
    std::sort(g.edges.begin(), g.edges.end());
    return g;
}

CoexpressionGraph build_graph(const std::string& path, double cutoff) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open edge list: " + path);
    std::vector<std::pair<std::string, std::string>> edges;
    std::vector<double> weights;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split(t, '\t');
        double w = 0;
        bool ok = fields.size() == 3;
        if (ok) {
            try {
                w = std::stod(fields[2]);
            } catch (const std::exception&) {
                ok = false;
            }
        }
        if (!ok || !(w > 0))
            throw InputError(path + ":" + std::to_string(line_no) +
                             ": expected gene_a<TAB>gene_b<TAB>positive_rank");
        edges.emplace_back(fields[0], fields[1]);
        weights.push_back(w);
    }
    return graph_from_edges(edges, weights, cutoff);
}

std::vector<int> connected_components(const CoexpressionGraph& g) {
    std::vector<int> comp(g.size(), -1);
    int next = 0;
    for (std::size_t s = 0; s < g.size(); ++s) {
        if (comp[s] != -1) continue;
        std::deque<int> queue{static_cast<int>(s)};
        comp[s] = next;
        while (!queue.empty()) {
            int v = queue.front();
            queue.pop_front();
            for (int w : g.adjacency[v]) {
                if (comp[w] == -1) {
                    comp[w] = next;
                    queue.push_back(w);
                }
            }
        }
        ++next;
    }
    return comp;
}

namespace {

// Single-source BFS distances; -1 for unreachable.
std::vector<int> bfs_distances(const CoexpressionGraph& g, int s) {
    std::vector<int> dist(g.size(), -1);
    std::deque<int> queue{s};
    dist[s] = 0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        for (int w : g.adjacency[v]) {
            if (dist[w] == -1) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

// Brandes single-source dependency accumulation.
void brandes_accumulate(const CoexpressionGraph& g, int s, std::vector<double>& bc) {
    const int n = static_cast<int>(g.size());
    std::vector<int> dist(n, -1);
    std::vector<double> sigma(n, 0.0), delta(n, 0.0);
    std::vector<std::vector<int>> pred(n);
    std::vector<int> order;
    order.reserve(n);

    std::deque<int> queue{s};
    dist[s] = 0;
    sigma[s] = 1.0;
    while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (int w : g.adjacency[v]) {
            if (dist[w] == -1) {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
            if (dist[w] == dist[v] + 1) {
                sigma[w] += sigma[v];
                pred[w].push_back(v);
            }
        }
    }
    for (auto it = order.rbegin(); it != order.rend(); ++it) {
        int w = *it;
        for (int v : pred[w]) delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
        if (w != s) bc[w] += delta[w];
    }
}

std::vector<int> core_numbers(const CoexpressionGraph& g) {
    const int n = static_cast<int>(g.size());
    std::vector<int> deg(n), core(n, 0);
    for (int v = 0; v < n; ++v) deg[v] = g.degree(v);
    // Peeling in order of current degree (bucket-less O(n log n) variant).
    std::set<std::pair<int, int>> by_degree;
    for (int v = 0; v < n; ++v) by_degree.insert({deg[v], v});
    std::vector<bool> removed(n, false);
    int k = 0;
    while (!by_degree.empty()) {
        auto [d, v] = *by_degree.begin();
        by_degree.erase(by_degree.begin());
        k = std::max(k, d);
        core[v] = k;
        removed[v] = true;
        for (int w : g.adjacency[v]) {
            if (removed[w]) continue;
            by_degree.erase({deg[w], w});
            --deg[w];
            by_degree.insert({deg[w], w});
        }
    }
    return core;
}

// HITS on the undirected adjacency. Returns (hub, authority), both
// normalized to unit maximum.
std::pair<std::vector<double>, std::vector<double>> hits_scores(const CoexpressionGraph& g) {
    const int n = static_cast<int>(g.size());
    std::vector<double> hub(n, 1.0), auth(n, 1.0), next(n, 0.0);
    auto unit_max = [](std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        if (m > 0)
            for (double& x : v) x /= m;
    };
    for (int iter = 0; iter < 1000; ++iter) {
        // auth = A^T hub, hub = A auth; A symmetric here but kept general.
        std::fill(next.begin(), next.end(), 0.0);
        for (int v = 0; v < n; ++v)
            for (int w : g.adjacency[v]) next[w] += hub[v];
        auth = next;
        unit_max(auth);
        std::fill(next.begin(), next.end(), 0.0);
        for (int v = 0; v < n; ++v)
            for (int w : g.adjacency[v]) next[v] += auth[w];
        double diff = 0.0;
        unit_max(next);
        for (int v = 0; v < n; ++v) diff = std::max(diff, std::abs(next[v] - hub[v]));
        hub = next;
        if (diff < 1e-10) break;
    }
    unit_max(hub);
    unit_max(auth);
    return {hub, auth};
}

}  // namespace

FeatureMatrix structural_features(const CoexpressionGraph& g) {
    if (g.size() == 0) throw InputError("structural_features: empty graph");
    const int n = static_cast<int>(g.size());
    FeatureMatrix x;
    x.instance_ids = g.vertices;
    x.feature_names = structural_feature_names();
    x.values.assign(static_cast<std::size_t>(n) * 9, 0.0);

    auto comp = connected_components(g);
    std::vector<int> comp_size(*std::max_element(comp.begin(), comp.end()) + 1, 0);
    for (int c : comp) ++comp_size[c];

    std::vector<double> betweenness(n, 0.0);
    std::vector<double> eccentricity(n, 0.0), closeness(n, 0.0);
    for (int s = 0; s < n; ++s) {
        if (g.degree(s) > 0) brandes_accumulate(g, s, betweenness);
        auto dist = bfs_distances(g, s);
        long sum = 0;
        int ecc = 0, reached = 0;
        for (int v = 0; v < n; ++v) {
            if (v == s || dist[v] < 0) continue;
            sum += dist[v];
            ecc = std::max(ecc, dist[v]);
            ++reached;
        }
        eccentricity[s] = ecc;
        closeness[s] = reached > 0 ? static_cast<double>(reached) / static_cast<double>(sum) : 0.0;
    }
    // Each unordered pair was counted from both endpoints.
    for (double& b : betweenness) b /= 2.0;

    auto core = core_numbers(g);
    auto [hub, auth] = hits_scores(g);

    std::vector<std::set<int>> neighbor_sets(n);
    for (int v = 0; v < n; ++v)
        neighbor_sets[v] = std::set<int>(g.adjacency[v].begin(), g.adjacency[v].end());

    for (int v = 0; v < n; ++v) {
        const double d = g.degree(v);
        double nbr_deg = 0.0;
        long triangles = 0;
        const auto& adj = g.adjacency[v];
        for (std::size_t a = 0; a < adj.size(); ++a) {
            nbr_deg += g.degree(adj[a]);
            for (std::size_t b = a + 1; b < adj.size(); ++b)
                if (neighbor_sets[adj[a]].count(adj[b])) ++triangles;
        }
        double clustering = d >= 2 ? 2.0 * triangles / (d * (d - 1.0)) : 0.0;
        x.at(v, 0) = d;
        x.at(v, 1) = d > 0 ? nbr_deg / d : 0.0;
        x.at(v, 2) = eccentricity[v];
        x.at(v, 3) = clustering;
        x.at(v, 4) = closeness[v];
        x.at(v, 5) = betweenness[v];
        x.at(v, 6) = hub[v];
        x.at(v, 7) = auth[v];
        x.at(v, 8) = core[v];
    }
    return x;
}

FeatureMatrix spectral_embedding(const CoexpressionGraph& g, int dim) {
    if (dim < 1) throw InputError("spectral_embedding: dim must be >= 1");
    if (static_cast<std::size_t>(dim) >= g.size())
        throw InputError("spectral_embedding: dim must be < |vertices|");
    const int n = static_cast<int>(g.size());
    auto comp = connected_components(g);
    int n_comp = *std::max_element(comp.begin(), comp.end()) + 1;

    FeatureMatrix x;
    x.instance_ids = g.vertices;
    for (int j = 0; j < dim; ++j) x.feature_names.push_back("embed_" + std::to_string(j));
    x.values.assign(static_cast<std::size_t>(n) * dim, 0.0);

    for (int c = 0; c < n_comp; ++c) {
        std::vector<int> members;
        for (int v = 0; v < n; ++v)
            if (comp[v] == c) members.push_back(v);
        const int m = static_cast<int>(members.size());
        if (dim >= m)
            throw InputError("spectral_embedding: dim " + std::to_string(dim) +
                             " >= size of component containing " +
                             g.vertices[members[0]]);
        std::vector<int> local(n, -1);
        for (int i = 0; i < m; ++i) local[members[i]] = i;

        Eigen::MatrixXd lap = Eigen::MatrixXd::Identity(m, m);
        for (int i = 0; i < m; ++i) {
            int v = members[i];
            double dv = g.degree(v);
            for (int w : g.adjacency[v]) {
                double dw = g.degree(w);
                lap(i, local[w]) = -1.0 / std::sqrt(dv * dw);
            }
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
        const auto& evals = solver.eigenvalues();
        const auto& evecs = solver.eigenvectors();
        int taken = 0;
        for (int k = 0; k < m && taken < dim; ++k) {
            if (evals(k) < 1e-10) continue;  // skip the trivial eigenvalue
            Eigen::VectorXd vec = evecs.col(k);
            for (int i = 0; i < m; ++i) {
                if (std::abs(vec(i)) > 1e-12) {
                    if (vec(i) < 0) vec = -vec;
                    break;
                }
            }
            for (int i = 0; i < m; ++i) x.at(members[i], taken) = vec(i);
            ++taken;
        }
        if (taken < dim)
            throw InputError("spectral_embedding: component containing " +
                             g.vertices[members[0]] + " has fewer than " +
                             std::to_string(dim) + " nonzero eigenvalues");
    }
    return x;
}

FeatureMatrix join_features(const FeatureMatrix& a, const FeatureMatrix& b) {
    if (a.instance_ids != b.instance_ids)
        throw InputError("join_features: instance id mismatch");
    FeatureMatrix joined;
    joined.instance_ids = a.instance_ids;
    joined.feature_names = a.feature_names;
    joined.feature_names.insert(joined.feature_names.end(), b.feature_names.begin(),
                                b.feature_names.end());
    joined.values.reserve(a.values.size() + b.values.size());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) joined.values.push_back(a.at(i, j));
        for (std::size_t j = 0; j < b.cols(); ++j) joined.values.push_back(b.at(i, j));
    }
    return joined;
}

}  // namespace hma
