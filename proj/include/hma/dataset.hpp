#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hma/hierarchy.hpp"
#include "hma/types.hpp"

namespace hma {

// 0->1 and 1->0 flips between two dated label matrices.
struct TransitionSet {
    PairSet gained;  // old 0, new 1
    PairSet lost;    // old 1, new 0
};

// CSV, header row, first column `id`, remaining columns numeric.
FeatureMatrix load_features_csv(const std::string& path);

// TSV instance<TAB>class; ancestor closure applied; rows follow
// `instance_ids`. Pairs naming instances outside `instance_ids` are dropped
// with a warning; unknown classes are an error listing the offending lines.
LabelMatrix load_annotations(const std::string& path, const ClassHierarchy& h,
                             const std::vector<std::string>& instance_ids);

std::pair<FeatureMatrix, LabelMatrix> load_dataset(const std::string& features_path,
                                                   const std::string& annotations_path,
                                                   const ClassHierarchy& h);

// Minimal pair list (closure recomputed at load); round-trips with
// load_annotations.
void save_annotations(const LabelMatrix& y, const std::string& path);

TransitionSet diff_versions(const LabelMatrix& y_old, const LabelMatrix& y_new);

// Exactly the pairs with y=0 and p>0.
std::vector<Pair> candidate_annotations(const LabelMatrix& y, const ProbabilityMatrix& p);

// Sets every ancestor of every 1 entry; in-place closure used by loaders and
// the synthetic generator.
void ancestor_close(LabelMatrix& y, const ClassHierarchy& h);

}  // namespace hma
