#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hma/hierarchy.hpp"
#include "hma/types.hpp"

namespace hma {

struct ForestConfig {
    int n_trees = 200;
    int min_samples_split = 5;
    int folds = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

// Axis-aligned multi-output regression tree. Leaves hold mean label vectors
// of the in-node bootstrap samples; splits maximize the reduction of summed
// per-class variance. Nodes are stored flat; node 0 is the root.
struct TreeNode {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;
    int right = -1;
    std::vector<double> leaf;  // mean label vector, leaves only
};

struct Tree {
    std::vector<TreeNode> nodes;
    const std::vector<double>& predict_row(const double* row, std::size_t stride) const;
};

struct FittedForest {
    ForestConfig config;
    std::size_t n_features = 0;
    std::size_t n_classes = 0;
    std::vector<Tree> trees;
    std::vector<std::vector<int>> bootstrap;  // per-tree in-bag instance indices (with repeats)
};

// Per-tree seed is seed xor tree index; bootstrap is |I| draws with
// replacement; feature subsample is ceil(sqrt(|F|)) per split.
FittedForest fit(const FeatureMatrix& x, const LabelMatrix& y, const ForestConfig& cfg);

// Mean over trees of leaf vectors, min-clamped to satisfy parent >= child.
ProbabilityMatrix predict(const FittedForest& f, const FeatureMatrix& x,
                          const ClassHierarchy& h);

// Seeded size-balanced folds; every instance predicted by a forest trained
// on the other folds.
ProbabilityMatrix predict_out_of_fold(const FeatureMatrix& x, const LabelMatrix& y,
                                      const ClassHierarchy& h, const ForestConfig& cfg);

struct OobCounts {
    std::vector<int> oob_trees;            // per instance
    std::vector<int> positive_votes;       // row-major |I| x |C|
    std::size_t n_classes = 0;
    int positive(std::size_t i, std::size_t c) const {
        return positive_votes[i * n_classes + c];
    }
};

// For each instance out-of-bag in a tree, counts the tree and, per class,
// whether the tree's leaf value reaches the class threshold.
OobCounts oob_vote_counts(const FittedForest& f, const FeatureMatrix& x,
                          const std::vector<double>& class_thresholds);

// Versioned text format; not stable across artifact versions.
void save_forest(const FittedForest& f, const std::string& path);
FittedForest load_forest(const std::string& path);
void serialize_forest(const FittedForest& f, std::ostream& out);

}  // namespace hma
