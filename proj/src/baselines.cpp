#include "hma/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "hma/util.hpp"

namespace hma {

double level_threshold(const LevelThresholdRule& rule, int level) {
    if (level < 1) throw InputError("level_threshold: level must be >= 1");
    if (!(rule.base > 0.0 && rule.base <= 1.0 && rule.decay > 0.0 && rule.decay <= 1.0))
        throw InputError("level_threshold: base and decay must be in (0,1]");
    return rule.base * std::pow(rule.decay, level - 1);
}

std::vector<double> class_thresholds(const LevelThresholdRule& rule, const ClassHierarchy& h) {
    std::vector<double> t(h.size());
    for (std::size_t c = 0; c < h.size(); ++c)
        t[c] = level_threshold(rule, h.level(static_cast<int>(c)));
    return t;
}

namespace {

// Adds `pair` preceded by its Y=0 ancestors (root side first) to the
// selection, tagging every added pair with `rank`.
void add_with_closure(const Pair& pair, int rank, const LabelMatrix& y,
                      const ClassHierarchy& h, SelectionResult& result) {
    std::vector<int> chain;
    for (int c = pair.second; c != -1; c = h.parent(c)) {
        if (y.at(pair.first, c) == 1) break;  // closed from here up
        chain.push_back(c);
    }
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
        Pair p{pair.first, *it};
        if (result.first_rank.emplace(p, rank).second) result.annotations.push_back(p);
    }
}

SelectionResult select_ranked(const std::vector<Pair>& ranked, const LabelMatrix& y,
                              const ClassHierarchy& h, long n_target) {
    if (n_target < 0) throw InputError("selection: n_target must be >= 0");
    SelectionResult result;
    result.n_paths_requested = n_target;
    for (std::size_t r = 0; r < ranked.size(); ++r) {
        if (static_cast<long>(result.annotations.size()) >= n_target) break;
        add_with_closure(ranked[r], static_cast<int>(r + 1), y, h, result);
    }
    result.n_annotations = static_cast<long>(result.annotations.size());
    result.shortfall = result.n_annotations < n_target;
    return result;
}

}  // namespace

SelectionResult select_no_aggr(const LabelMatrix& y, const ProbabilityMatrix& yprime,
                               const ClassHierarchy& h, long n_target) {
    std::vector<Pair> candidates;
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t c = 0; c < y.cols(); ++c)
            if (y.at(i, c) == 0 && yprime.at(i, c) > 0.0)
                candidates.emplace_back(static_cast<int>(i), static_cast<int>(c));
    std::sort(candidates.begin(), candidates.end(), [&](const Pair& a, const Pair& b) {
        double pa = yprime.at(a.first, a.second), pb = yprime.at(b.first, b.second);
        if (pa != pb) return pa > pb;
        if (y.instance_ids[a.first] != y.instance_ids[b.first])
            return y.instance_ids[a.first] < y.instance_ids[b.first];
        return h.class_id(a.second) < h.class_id(b.second);
    });
    return select_ranked(candidates, y, h, n_target);
}

SelectionResult select_random(const LabelMatrix& y, const ClassHierarchy& h, long n_target,
                              std::uint64_t seed) {
    std::vector<Pair> zeros;
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t c = 0; c < y.cols(); ++c)
            if (y.at(i, c) == 0) zeros.emplace_back(static_cast<int>(i), static_cast<int>(c));
    if (n_target < 0) throw InputError("selection: n_target must be >= 0");

    Rng rng(seed);
    SelectionResult result;
    result.n_paths_requested = n_target;
    std::set<std::size_t> drawn;
    int rank = 0;
    while (static_cast<long>(result.annotations.size()) < n_target &&
           drawn.size() < zeros.size()) {
        std::size_t k = rng.uniform_index(zeros.size());
        if (!drawn.insert(k).second) continue;
        if (result.first_rank.count(zeros[k])) continue;  // already pulled in by closure
        add_with_closure(zeros[k], ++rank, y, h, result);
    }
    result.n_annotations = static_cast<long>(result.annotations.size());
    result.shortfall = result.n_annotations < n_target;
    return result;
}

SelectionResult select_noise_detect(const LabelMatrix& y, const OobCounts& oob,
                                    const ProbabilityMatrix& yprime, const ClassHierarchy& h,
                                    long n_target) {
    std::vector<Pair> candidates;
    auto rate = [&](const Pair& p) {
        int trees = oob.oob_trees[p.first];
        return trees > 0 ? static_cast<double>(oob.positive(p.first, p.second)) / trees : 0.0;
    };
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t c = 0; c < y.cols(); ++c)
            if (y.at(i, c) == 0)
                candidates.emplace_back(static_cast<int>(i), static_cast<int>(c));
    std::sort(candidates.begin(), candidates.end(), [&](const Pair& a, const Pair& b) {
        double ra = rate(a), rb = rate(b);
        if (ra != rb) return ra > rb;
        double pa = yprime.at(a.first, a.second), pb = yprime.at(b.first, b.second);
        if (pa != pb) return pa > pb;
        if (y.instance_ids[a.first] != y.instance_ids[b.first])
            return y.instance_ids[a.first] < y.instance_ids[b.first];
        return h.class_id(a.second) < h.class_id(b.second);
    });
    return select_ranked(candidates, y, h, n_target);
}

}  // namespace hma
