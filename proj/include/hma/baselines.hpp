#pragma once

#include <cstdint>
#include <vector>

#include "hma/forest.hpp"
#include "hma/hierarchy.hpp"
#include "hma/reassign.hpp"
#include "hma/types.hpp"

namespace hma {

// threshold(l) = base * decay^(l-1)
struct LevelThresholdRule {
    double base = 0.5;
    double decay = 0.75;
};

double level_threshold(const LevelThresholdRule& rule, int level);
std::vector<double> class_thresholds(const LevelThresholdRule& rule, const ClassHierarchy& h);

// Ranks Y=0, Y'>0 pairs by Y' descending (ties: instance id, class id) and
// walks the ranking, adding each pair plus its unannotated ancestors, until
// n_target annotations are selected. Closure consumes budget; a final
// overshoot is visible via n_annotations > n_target.
SelectionResult select_no_aggr(const LabelMatrix& y, const ProbabilityMatrix& yprime,
                               const ClassHierarchy& h, long n_target);

// Uniform draws over unselected Y=0 pairs, each closed under ancestors.
// Falls back to all zeros when the pool is exhausted early.
SelectionResult select_random(const LabelMatrix& y, const ClassHierarchy& h, long n_target,
                              std::uint64_t seed);

// Adapted noise filter: rate = positive OOB votes / OOB trees (0 when a pair
// was never out-of-bag), ranked descending with ties broken by higher Y',
// then instance id, class id; closure as in select_no_aggr.
SelectionResult select_noise_detect(const LabelMatrix& y, const OobCounts& oob,
                                    const ProbabilityMatrix& yprime, const ClassHierarchy& h,
                                    long n_target);

}  // namespace hma
