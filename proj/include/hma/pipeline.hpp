#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hma/forest.hpp"
#include "hma/reassign.hpp"

namespace hma {

// Orchestration settings; defaults follow the experimental protocol the
// library targets (200 trees, min-split 5, 5 folds, n-grid 0.01..0.20).
struct RunConfig {
    std::string hierarchy_path;
    std::string root;  // empty: inferred from the edge list
    std::string features_path;
    std::string annotations_old_path;
    std::string annotations_new_path;
    std::string edges_path;  // optional; structural features + embedding
    double cutoff = 100.0;
    int embed_dim = 0;  // 0: number of classes in the sub-hierarchy

    ForestConfig forest;
    std::vector<std::string> methods = {"reassign-avg", "reassign-sum", "reassign-min",
                                        "no-aggr",      "random",       "noise-detect"};
    double n_start = 0.01;
    double n_stop = 0.20;
    double n_step = 0.01;
    bool resubstitution = false;  // Y' from the full-data forest instead of out-of-fold
    std::string save_model_path;
    std::string load_model_path;
    std::string out_dir = "run";

    void validate() const;
    std::vector<double> n_grid() const;

    // Flat key=value file; '#' comments allowed. Unknown keys are errors.
    static RunConfig from_file(const std::string& path);
};

// Runs the whole batch: features, out-of-fold probabilities, every
// configured method over the n-grid at matched N, evaluation reports and a
// manifest under cfg.out_dir.
void run_pipeline(const RunConfig& cfg);

}  // namespace hma
