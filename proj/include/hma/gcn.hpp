#pragma once

#include <string>
#include <vector>

#include "hma/types.hpp"

namespace hma {

// Undirected weighted co-expression graph. Vertices are sorted
// lexicographically so the object is a pure function of the input bytes.
// Immutable after build.
struct CoexpressionGraph {
    std::vector<std::string> vertices;
    std::vector<std::vector<int>> adjacency;      // sorted neighbor lists
    std::vector<std::pair<Pair, double>> edges;   // (u < v, mutual rank)

    std::size_t size() const { return vertices.size(); }
    std::size_t edge_count() const { return edges.size(); }
    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
};

// TSV gene_a<TAB>gene_b<TAB>mutual_rank; keeps edges with weight <= cutoff
// (boundary inclusive). Self-loops dropped with a warning; repeated edges
// keep the first weight seen.
CoexpressionGraph build_graph(const std::string& edge_list_path, double cutoff);
CoexpressionGraph graph_from_edges(
    const std::vector<std::pair<std::string, std::string>>& edges,
    const std::vector<double>& weights, double cutoff);

inline const std::vector<std::string>& structural_feature_names() {
    static const std::vector<std::string> names = {
        "degree",           "avg_neighbor_degree", "eccentricity",
        "clustering_coeff", "closeness",           "betweenness",
        "hub_score",        "authority_score",     "coreness"};
    return names;
}

// One row per vertex, columns per structural_feature_names(). Eccentricity
// and closeness are per connected component; betweenness is Brandes exact,
// unnormalized, with each unordered pair counted once; hub/authority come
// from HITS power iteration (tol 1e-10 inf-norm, max 1000 iterations,
// uniform positive start, unit-maximum normalization). Isolated vertices
// get 0 for every non-degree metric.
FeatureMatrix structural_features(const CoexpressionGraph& g);

// Laplacian eigenmap: eigenvectors of the symmetric normalized Laplacian
// for the `dim` smallest nonzero eigenvalues, computed per connected
// component, sign fixed so the first nonzero entry of each vector is
// positive. Errors when dim >= size of any component.
FeatureMatrix spectral_embedding(const CoexpressionGraph& g, int dim);

// Column-wise concatenation; instance ids must match row for row.
FeatureMatrix join_features(const FeatureMatrix& a, const FeatureMatrix& b);

std::vector<int> connected_components(const CoexpressionGraph& g);  // component id per vertex

}  // namespace hma
