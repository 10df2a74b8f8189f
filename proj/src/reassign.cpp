#include "hma/reassign.hpp"

#include <algorithm>
#include <limits>

#include "hma/util.hpp"

namespace hma {

Aggregator aggregator_from_name(const std::string& name) {
    if (name == "avg" || name == "average") return Aggregator::average;
    if (name == "sum") return Aggregator::sum;
    if (name == "min" || name == "minimum") return Aggregator::minimum;
    throw InputError("unknown aggregator: " + name);
}

std::string aggregator_name(Aggregator a) {
    switch (a) {
        case Aggregator::average: return "avg";
        case Aggregator::sum: return "sum";
        case Aggregator::minimum: return "min";
    }
    return "?";
}

double aggregate(Aggregator a, const std::vector<double>& probs) {
    if (probs.empty()) throw InputError("aggregate: empty probability list");
    double sum = 0.0, min = std::numeric_limits<double>::infinity();
    for (double p : probs) {
        sum += p;
        min = std::min(min, p);
    }
    switch (a) {
        case Aggregator::average: return sum / static_cast<double>(probs.size());
        case Aggregator::sum: return sum;
        case Aggregator::minimum: return min;
    }
    return 0.0;
}

std::vector<ScoredPath> score_paths(const LabelMatrix& y, const ProbabilityMatrix& yprime,
                                    const ClassHierarchy& h, Aggregator agg) {
    if (y.rows() != yprime.rows() || y.cols() != yprime.cols())
        throw InputError("score_paths: shape mismatch");
    std::vector<ScoredPath> out;
    const auto& paths = h.leaf_paths();
    std::vector<double> probs;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (std::size_t p = 0; p < paths.size(); ++p) {
            probs.clear();
            ScoredPath sp;
            sp.instance = static_cast<int>(i);
            sp.path_index = static_cast<int>(p);
            for (int c : paths[p]) {
                if (y.at(i, c) == 0 && yprime.at(i, c) > 0.0) {
                    probs.push_back(yprime.at(i, c));
                    sp.eligible.push_back(c);
                }
            }
            if (sp.eligible.empty()) continue;  // nothing to suggest on this path
            sp.score = aggregate(agg, probs);
            out.push_back(std::move(sp));
        }
    }
    return out;
}

SelectionResult select_top(const std::vector<ScoredPath>& paths, const LabelMatrix& y,
                           const ClassHierarchy& h, long n_p) {
    if (n_p < 0) throw InputError("select_top: n_p must be >= 0");
    std::vector<const ScoredPath*> sorted;
    sorted.reserve(paths.size());
    for (const auto& p : paths) sorted.push_back(&p);
    std::sort(sorted.begin(), sorted.end(), [&](const ScoredPath* a, const ScoredPath* b) {
        if (a->score != b->score) return a->score > b->score;
        const auto& ia = y.instance_ids[a->instance];
        const auto& ib = y.instance_ids[b->instance];
        if (ia != ib) return ia < ib;
        const auto& la = h.class_id(h.leaf_paths()[a->path_index].front());
        const auto& lb = h.class_id(h.leaf_paths()[b->path_index].front());
        return la < lb;
    });

    SelectionResult result;
    result.n_paths_requested = n_p;
    if (n_p > static_cast<long>(sorted.size())) result.shortfall = true;
    const long take = std::min<long>(n_p, static_cast<long>(sorted.size()));
    for (long r = 0; r < take; ++r) {
        for (int c : sorted[r]->eligible) {
            Pair pair{sorted[r]->instance, c};
            if (result.first_rank.emplace(pair, static_cast<int>(r + 1)).second)
                result.annotations.push_back(pair);
        }
    }
    result.n_annotations = static_cast<long>(result.annotations.size());
    return result;
}

long compute_np(const LabelMatrix& y, double n) {
    if (!(n >= 0.0 && n <= 1.0)) throw InputError("compute_np: n must be in [0,1]");
    return static_cast<long>(static_cast<double>(y.count_ones()) * n);
}

std::vector<SelectionResult> reassign_select_grid(const LabelMatrix& y,
                                                  const ProbabilityMatrix& yprime,
                                                  const ClassHierarchy& h, Aggregator agg,
                                                  const std::vector<double>& n_grid) {
    if (n_grid.empty()) throw InputError("reassign: empty n-grid");
    auto paths = score_paths(y, yprime, h, agg);
    std::vector<SelectionResult> out;
    out.reserve(n_grid.size());
    for (double n : n_grid) out.push_back(select_top(paths, y, h, compute_np(y, n)));
    return out;
}

std::vector<SelectionResult> run_reassign(const FeatureMatrix& x, const LabelMatrix& y,
                                          const ClassHierarchy& h, const ForestConfig& cfg,
                                          Aggregator agg, const std::vector<double>& n_grid) {
    ProbabilityMatrix yprime = predict_out_of_fold(x, y, h, cfg);
    return reassign_select_grid(y, yprime, h, agg, n_grid);
}

}  // namespace hma
