#include "hma/synth.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "hma/util.hpp"

namespace hma {

void SynthSpec::validate() const {
    if (n_classes < 3) throw InputError("synth: need at least 3 classes");
    if (n_clusters < 2) throw InputError("synth: need at least 2 clusters");
    if (n_instances < 2 * n_clusters) throw InputError("synth: too few instances");
    if (n_features < 1) throw InputError("synth: need at least 1 feature");
    if (!(hide_fraction > 0.0 && hide_fraction < 1.0))
        throw InputError("synth: hide-fraction must be in (0,1)");
    if (noise < 0.0) throw InputError("synth: noise must be >= 0");
}

namespace {

std::string class_name(int k) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "c%03d", k);
    return buf;
}

std::string gene_name(int k) {
    char buf[8];
    std::snprintf(buf, sizeof(buf), "g%04d", k);
    return buf;
}

}  // namespace

SynthData generate_synthetic(const SynthSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);

    // Random tree: class k attaches to a uniform earlier class. Depth is
    // nudged by preferring recent classes half of the time.
    RawHierarchyDag dag;
    for (int k = 0; k < spec.n_classes; ++k) dag.classes.push_back(class_name(k));
    for (int k = 1; k < spec.n_classes; ++k) {
        std::size_t parent = rng.next() % 2 == 0 && k > 2
                                 ? k - 1 - rng.uniform_index(std::min(k, 3))
                                 : rng.uniform_index(k);
        dag.edges.emplace_back(class_name(k), class_name(static_cast<int>(parent)));
    }

    SynthData data;
    data.hierarchy = dag_to_tree(dag, class_name(0));
    const auto& h = data.hierarchy;
    const auto& paths = h.leaf_paths();

    // Cluster label sets: a few leaf paths each, ancestor-closed by
    // construction. Clusters cycle over leaves so the sets differ.
    std::vector<std::vector<std::uint8_t>> cluster_labels(
        spec.n_clusters, std::vector<std::uint8_t>(h.size(), 0));
    for (int k = 0; k < spec.n_clusters; ++k) {
        const int paths_per_cluster = 2 + static_cast<int>(rng.uniform_index(2));
        for (int j = 0; j < paths_per_cluster; ++j) {
            const auto& path = paths[rng.uniform_index(paths.size())];
            for (int c : path) cluster_labels[k][c] = 1;
        }
    }

    std::vector<std::vector<double>> centroids(spec.n_clusters,
                                               std::vector<double>(spec.n_features));
    for (auto& centroid : centroids)
        for (auto& v : centroid) v = rng.uniform_real() * 10.0;

    data.features.feature_names.reserve(spec.n_features);
    for (int j = 0; j < spec.n_features; ++j)
        data.features.feature_names.push_back("f" + std::to_string(j));
    data.y_new.class_ids = h.classes();
    for (int i = 0; i < spec.n_instances; ++i) {
        int cluster = i % spec.n_clusters;
        data.features.instance_ids.push_back(gene_name(i));
        for (int j = 0; j < spec.n_features; ++j)
            data.features.values.push_back(centroids[cluster][j] +
                                           spec.noise * rng.normal());
        data.y_new.instance_ids.push_back(gene_name(i));
        for (std::size_t c = 0; c < h.size(); ++c)
            data.y_new.values.push_back(cluster_labels[cluster][c]);
    }

    // Hide deepest-first: order non-root 1 entries by level descending with
    // a seeded shuffle inside each level, drop the first hide_fraction, then
    // re-close so y_old still satisfies the hierarchy constraint.
    std::vector<Pair> ones;
    for (std::size_t i = 0; i < data.y_new.rows(); ++i)
        for (std::size_t c = 1; c < data.y_new.cols(); ++c)
            if (data.y_new.at(i, c) == 1)
                ones.emplace_back(static_cast<int>(i), static_cast<int>(c));
    rng.shuffle(ones);
    std::stable_sort(ones.begin(), ones.end(), [&](const Pair& a, const Pair& b) {
        return h.level(a.second) > h.level(b.second);
    });
    const std::size_t n_hide =
        static_cast<std::size_t>(spec.hide_fraction * static_cast<double>(ones.size()));

    data.y_old = data.y_new;
    for (std::size_t k = 0; k < n_hide; ++k)
        data.y_old.at(ones[k].first, ones[k].second) = 0;
    ancestor_close(data.y_old, h);

    data.hidden_count = static_cast<long>(diff_versions(data.y_old, data.y_new).gained.size());
    return data;
}

void write_synthetic(const SynthData& data, const std::string& dir) {
    std::filesystem::create_directories(dir);
    const auto& h = data.hierarchy;

    std::ofstream hier(dir + "/hierarchy.tsv");
    hier << "# child\tparent\n";
    for (std::size_t c = 1; c < h.size(); ++c)
        hier << h.class_id(static_cast<int>(c)) << '\t' << h.class_id(h.parent(static_cast<int>(c)))
             << '\n';

    std::ofstream feat(dir + "/features.csv");
    feat.precision(17);
    feat << "id";
    for (const auto& name : data.features.feature_names) feat << ',' << name;
    feat << '\n';
    for (std::size_t i = 0; i < data.features.rows(); ++i) {
        feat << data.features.instance_ids[i];
        for (std::size_t j = 0; j < data.features.cols(); ++j)
            feat << ',' << data.features.at(i, j);
        feat << '\n';
    }

    save_annotations(data.y_old, dir + "/annotations_old.tsv");
    save_annotations(data.y_new, dir + "/annotations_new.tsv");
}

}  // namespace hma
