#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "hma/dataset.hpp"
#include "hma/hierarchy.hpp"
#include "hma/reassign.hpp"

namespace hma {

struct PrecisionPoint {
    double n;
    long N;
    long tp;
    long fp;
    double precision;  // tp/(tp+fp); 0 by convention when tp+fp == 0
};

struct PrecisionCurve {
    std::vector<PrecisionPoint> points;  // ascending n
};

// tp = |selection ∩ gained|, fp = rest. Lost (1->0) transitions are ignored.
std::tuple<long, long, double> precision_at_n(const SelectionResult& selection,
                                              const TransitionSet& truth);

// Trapezoidal integral of precision over the n axis.
double aupnc(const PrecisionCurve& curve);

struct LevelRow {
    int level;  // 0 marks the totals row
    long gained;
    long tp;
    long selected;
    double precision;
};

// One row per hierarchy level plus a trailing totals row.
std::vector<LevelRow> per_level_report(const SelectionResult& selection,
                                       const TransitionSet& truth, const ClassHierarchy& h);

struct RankTable {
    std::vector<std::string> methods;
    std::vector<std::string> datasets;
    std::vector<std::vector<double>> scores;     // datasets x methods
    std::vector<std::vector<double>> ranks;      // per-dataset ranks, ties averaged
    std::vector<double> avg_ranks;               // per method; 1 = best
    double friedman_chi2 = 0.0;
    double friedman_f = 0.0;
    double critical_distance = 0.0;
    std::vector<std::vector<int>> groups;        // method indices within CD of each other
};

// Rank 1 goes to the highest AUP@NC. CD = q_alpha * sqrt(k(k+1)/(6 D));
// q at alpha in {0.05, 0.10} from the standard Nemenyi table (k <= 10).
RankTable friedman_nemenyi(const std::vector<std::vector<double>>& scores,
                           const std::vector<std::string>& methods,
                           const std::vector<std::string>& datasets, double alpha);

std::string rank_table_summary(const RankTable& t);

}  // namespace hma
