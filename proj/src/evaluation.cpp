#include "hma/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <iostream>
#include <numeric>
#include <sstream>

#include "hma/util.hpp"

namespace hma {

std::tuple<long, long, double> precision_at_n(const SelectionResult& selection,
                                              const TransitionSet& truth) {
    long tp = 0;
    for (const auto& pair : selection.annotations)
        if (truth.gained.count(pair)) ++tp;
    long fp = static_cast<long>(selection.annotations.size()) - tp;
    if (tp + fp == 0) {
        std::cerr << "[evaluation] warning: empty selection, precision set to 0\n";
        return {0, 0, 0.0};
    }
    return {tp, fp, static_cast<double>(tp) / static_cast<double>(tp + fp)};
}

double aupnc(const PrecisionCurve& curve) {
    if (curve.points.size() < 2)
        throw InputError("aupnc: need at least two grid points");
    double area = 0.0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
        const auto& a = curve.points[k - 1];
        const auto& b = curve.points[k];
        if (!(b.n > a.n)) throw InputError("aupnc: n values must be strictly increasing");
        area += (b.n - a.n) * (a.precision + b.precision) / 2.0;
    }
    return area;
}

std::vector<LevelRow> per_level_report(const SelectionResult& selection,
                                       const TransitionSet& truth, const ClassHierarchy& h) {
    std::vector<LevelRow> rows(h.num_levels());
    for (int l = 0; l < h.num_levels(); ++l) rows[l] = {l + 1, 0, 0, 0, 0.0};
    for (const auto& pair : truth.gained) ++rows[h.level(pair.second) - 1].gained;
    for (const auto& pair : selection.annotations) {
        auto& row = rows[h.level(pair.second) - 1];
        ++row.selected;
        if (truth.gained.count(pair)) ++row.tp;
    }
    LevelRow total{0, 0, 0, 0, 0.0};
    for (auto& row : rows) {
        row.precision = row.selected > 0
                            ? static_cast<double>(row.tp) / static_cast<double>(row.selected)
                            : 0.0;
        total.gained += row.gained;
        total.tp += row.tp;
        total.selected += row.selected;
    }
    total.precision = total.selected > 0
                          ? static_cast<double>(total.tp) / static_cast<double>(total.selected)
                          : 0.0;
    rows.push_back(total);
    return rows;
}

namespace {

// Two-tailed Nemenyi q values (studentized range / sqrt(2)) for k = 2..10.
constexpr double kNemenyiQ05[] = {1.959964, 2.343701, 2.569032, 2.727774,
                                  2.849705, 2.948320, 3.030879, 3.101730,
                                  3.163684};
constexpr double kNemenyiQ10[] = {1.644854, 2.052293, 2.291341, 2.459516,
                                  2.588521, 2.692732, 2.779884, 2.854606,
                                  2.920000};

double nemenyi_q(int k, double alpha) {
    if (k < 2 || k > 10)
        throw InputError("friedman_nemenyi: q-table covers 2..10 methods");
    if (std::abs(alpha - 0.05) < 1e-12) return kNemenyiQ05[k - 2];
    if (std::abs(alpha - 0.10) < 1e-12) return kNemenyiQ10[k - 2];
    throw InputError("friedman_nemenyi: alpha must be 0.05 or 0.10");
}

}  // namespace

RankTable friedman_nemenyi(const std::vector<std::vector<double>>& scores,
                           const std::vector<std::string>& methods,
                           const std::vector<std::string>& datasets, double alpha) {
    const int d = static_cast<int>(scores.size());
    const int k = static_cast<int>(methods.size());
    if (d < 2 || k < 2) throw InputError("friedman_nemenyi: need >= 2 methods and datasets");
    if (static_cast<int>(datasets.size()) != d)
        throw InputError("friedman_nemenyi: dataset label count mismatch");
    for (const auto& row : scores)
        if (static_cast<int>(row.size()) != k)
            throw InputError("friedman_nemenyi: score matrix has a short row");

    RankTable t;
    t.methods = methods;
    t.datasets = datasets;
    t.scores = scores;
    t.avg_ranks.assign(k, 0.0);
    for (const auto& row : scores) {
        // Rank 1 = highest score; equal scores share the average rank.
        std::vector<int> order(k);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](int a, int b) { return row[a] > row[b]; });
        std::vector<double> ranks(k, 0.0);
        int i = 0;
        while (i < k) {
            int j = i;
            while (j + 1 < k && row[order[j + 1]] == row[order[i]]) ++j;
            double avg = (i + 1 + j + 1) / 2.0;
            for (int m = i; m <= j; ++m) ranks[order[m]] = avg;
            i = j + 1;
        }
        for (int m = 0; m < k; ++m) t.avg_ranks[m] += ranks[m];
        t.ranks.push_back(std::move(ranks));
    }
    for (auto& r : t.avg_ranks) r /= d;

    double sum_r2 = 0.0;
    for (double r : t.avg_ranks) sum_r2 += r * r;
    t.friedman_chi2 =
        12.0 * d / (k * (k + 1.0)) * (sum_r2 - k * (k + 1.0) * (k + 1.0) / 4.0);
    double denom = d * (k - 1.0) - t.friedman_chi2;
    t.friedman_f = denom > 0 ? (d - 1.0) * t.friedman_chi2 / denom
                             : std::numeric_limits<double>::infinity();
    t.critical_distance = nemenyi_q(k, alpha) * std::sqrt(k * (k + 1.0) / (6.0 * d));

    // Maximal groups of methods whose average ranks all lie within CD.
    std::vector<int> by_rank(k);
    std::iota(by_rank.begin(), by_rank.end(), 0);
    std::sort(by_rank.begin(), by_rank.end(),
              [&](int a, int b) { return t.avg_ranks[a] < t.avg_ranks[b]; });
    int prev_end = -1;
    for (int i = 0; i < k; ++i) {
        int end = i;
        while (end + 1 < k &&
               t.avg_ranks[by_rank[end + 1]] - t.avg_ranks[by_rank[i]] <=
                   t.critical_distance)
            ++end;
        if (end > i && end > prev_end) {
            t.groups.emplace_back(by_rank.begin() + i, by_rank.begin() + end + 1);
            prev_end = end;
        }
    }
    return t;
}

std::string rank_table_summary(const RankTable& t) {
    std::ostringstream out;
    out << "Friedman chi2 = " << t.friedman_chi2 << ", F = " << t.friedman_f << "\n";
    out << "Nemenyi critical distance = " << t.critical_distance << "\n";
    out << "Average ranks (1 = best):\n";
    std::vector<int> order(t.methods.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return t.avg_ranks[a] < t.avg_ranks[b]; });
    for (int m : order) out << "  " << t.methods[m] << ": " << t.avg_ranks[m] << "\n";
    out << "Groups not significantly different:\n";
    if (t.groups.empty()) out << "  (none)\n";
    for (const auto& g : t.groups) {
        out << " ";
        for (int m : g) out << " " << t.methods[m];
        out << "\n";
    }
    return out.str();
}

}  // namespace hma
