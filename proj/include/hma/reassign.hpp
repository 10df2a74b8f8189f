#pragma once

#include <map>
#include <string>
#include <vector>

#include "hma/forest.hpp"
#include "hma/hierarchy.hpp"
#include "hma/types.hpp"

namespace hma {

enum class Aggregator { average, sum, minimum };

Aggregator aggregator_from_name(const std::string& name);  // avg | sum | min
std::string aggregator_name(Aggregator a);
double aggregate(Aggregator a, const std::vector<double>& probs);

// One candidate per (instance, leaf path) with a non-empty eligible set:
// the classes on the path with Y=0 and Y'>0.
struct ScoredPath {
    int instance;
    int path_index;                  // into h.leaf_paths()
    std::vector<int> eligible;       // class indices, leaf-to-root order
    double score;
};

struct SelectionResult {
    std::vector<Pair> annotations;   // in first-contribution order
    long n_paths_requested = 0;      // N_p (or n_target for the baselines)
    long n_annotations = 0;          // N, after dedup
    std::map<Pair, int> first_rank;  // pair -> rank of the first path/candidate adding it
    bool shortfall = false;          // fewer candidates than requested
};

std::vector<ScoredPath> score_paths(const LabelMatrix& y, const ProbabilityMatrix& yprime,
                                    const ClassHierarchy& h, Aggregator agg);

// Sorts by score descending (ties: instance id, then leaf class id, both
// lexicographic), unions the first n_p paths' eligible sets, dedups keeping
// first-rank provenance.
SelectionResult select_top(const std::vector<ScoredPath>& paths, const LabelMatrix& y,
                           const ClassHierarchy& h, long n_p);

// N_p = floor(sum(Y) * n).
long compute_np(const LabelMatrix& y, double n);

// Scores once, slices a selection per grid value. Results nest: a larger n
// extends a smaller one.
std::vector<SelectionResult> reassign_select_grid(const LabelMatrix& y,
                                                  const ProbabilityMatrix& yprime,
                                                  const ClassHierarchy& h, Aggregator agg,
                                                  const std::vector<double>& n_grid);

// Full Algorithm: out-of-fold probabilities, then grid selection.
std::vector<SelectionResult> run_reassign(const FeatureMatrix& x, const LabelMatrix& y,
                                          const ClassHierarchy& h, const ForestConfig& cfg,
                                          Aggregator agg, const std::vector<double>& n_grid);

}  // namespace hma
