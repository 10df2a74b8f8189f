#pragma once

#include <cstdint>
#include <string>

#include "hma/dataset.hpp"
#include "hma/hierarchy.hpp"
#include "hma/types.hpp"

namespace hma {

struct SynthSpec {
    int n_instances = 200;
    int n_classes = 20;
    int n_clusters = 5;
    int n_features = 10;
    double noise = 0.1;         // feature noise sigma
    double hide_fraction = 0.1; // share of non-root annotations hidden in y_old
    std::uint64_t seed = 7;

    void validate() const;
};

struct SynthData {
    ClassHierarchy hierarchy;
    FeatureMatrix features;
    LabelMatrix y_old;  // y_new with hide_fraction of deepest-first annotations removed, re-closed
    LabelMatrix y_new;  // full cluster labels
    long hidden_count = 0;  // |gained| between the two versions
};

// Random tree hierarchy; instances grouped into clusters, each cluster
// labeled with the closure of a few leaf paths; features are cluster
// centroids plus Gaussian noise.
SynthData generate_synthetic(const SynthSpec& spec);

// Emits hierarchy.tsv, features.csv, annotations_old.tsv, annotations_new.tsv.
void write_synthetic(const SynthData& data, const std::string& dir);

}  // namespace hma
