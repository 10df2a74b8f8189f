#include "hma/forest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hma/util.hpp"

namespace hma {

void ForestConfig::validate() const {
    if (n_trees < 1) throw InputError("forest: n_trees must be >= 1");
    if (min_samples_split < 2) throw InputError("forest: min_samples_split must be >= 2");
    if (folds < 2) throw InputError("forest: folds must be >= 2");
}

const std::vector<double>& Tree::predict_row(const double* row, std::size_t) const {
    int node = 0;
    while (nodes[node].feature >= 0) {
        node = row[nodes[node].feature] <= nodes[node].threshold ? nodes[node].left
                                                                 : nodes[node].right;
    }
    return nodes[node].leaf;
}

namespace {

struct TreeBuilder {
    const FeatureMatrix& x;
    const LabelMatrix& y;
    int min_samples_split;
    std::size_t n_sub_features;
    Rng& rng;
    Tree tree;

    // Sum of squared deviations over all classes for the given sample
    // multiset. Labels are binary so sum(y^2) = sum(y).
    static double node_sse(const std::vector<double>& class_sums, double total, double n) {
        double sse = total;
        for (double s : class_sums) sse -= s * s / n;
        return sse;
    }

    std::vector<std::size_t> sample_features() {
        // Partial Fisher-Yates over feature indices, then sorted ascending
        // so the (feature, threshold) tie-break is by iteration order.
        std::vector<std::size_t> idx(x.cols());
        std::iota(idx.begin(), idx.end(), 0);
        for (std::size_t i = 0; i < n_sub_features; ++i) {
            std::size_t j = i + rng.uniform_index(idx.size() - i);
            std::swap(idx[i], idx[j]);
        }
        idx.resize(n_sub_features);
        std::sort(idx.begin(), idx.end());
        return idx;
    }

    int build(std::vector<int>& samples) {
        const std::size_t n_classes = y.cols();
        const double n = static_cast<double>(samples.size());
        std::vector<double> sums(n_classes, 0.0);
        double total = 0.0;
        for (int i : samples) {
            for (std::size_t c = 0; c < n_classes; ++c) sums[c] += y.at(i, c);
        }
        for (double s : sums) total += s;
        const double parent_sse = node_sse(sums, total, n);

        auto make_leaf = [&]() {
            TreeNode node;
            node.leaf.resize(n_classes);
            for (std::size_t c = 0; c < n_classes; ++c) node.leaf[c] = sums[c] / n;
            tree.nodes.push_back(std::move(node));
            return static_cast<int>(tree.nodes.size() - 1);
        };

        if (static_cast<int>(samples.size()) < min_samples_split || parent_sse <= 0.0)
            return make_leaf();

        double best_gain = 0.0;
        int best_feature = -1;
        double best_threshold = 0.0;
        std::vector<double> left_sums(n_classes);
        for (std::size_t f : sample_features()) {
            std::sort(samples.begin(), samples.end(), [&](int a, int b) {
                double va = x.at(a, f), vb = x.at(b, f);
                return va != vb ? va < vb : a < b;
            });
            std::fill(left_sums.begin(), left_sums.end(), 0.0);
            double left_total = 0.0;
            for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
                int i = samples[k];
                for (std::size_t c = 0; c < n_classes; ++c) {
                    left_sums[c] += y.at(i, c);
                    left_total += y.at(i, c);
                }
                double v = x.at(i, f), v_next = x.at(samples[k + 1], f);
                if (v == v_next) continue;
                const double nl = static_cast<double>(k + 1);
                const double nr = n - nl;
                double right_total = total - left_total;
                double sse_l = left_total, sse_r = right_total;
                for (std::size_t c = 0; c < n_classes; ++c) {
                    sse_l -= left_sums[c] * left_sums[c] / nl;
                    sse_r -= (sums[c] - left_sums[c]) * (sums[c] - left_sums[c]) / nr;
                }
                double gain = parent_sse - sse_l - sse_r;
                // Iteration is ascending (feature, threshold), so strict >
                // realizes the lowest-feature, lowest-threshold tie-break.
                if (gain > best_gain) {
                    best_gain = gain;
                    best_feature = static_cast<int>(f);
                    best_threshold = (v + v_next) / 2.0;
                }
            }
        }
        if (best_feature < 0) return make_leaf();

        std::vector<int> left, right;
        for (int i : samples) {
            (x.at(i, best_feature) <= best_threshold ? left : right).push_back(i);
        }
        // Reserve the node slot before recursing so the root stays at 0.
        int node_id = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        int l = build(left);
        int r = build(right);
        tree.nodes[node_id].feature = best_feature;
        tree.nodes[node_id].threshold = best_threshold;
        tree.nodes[node_id].left = l;
        tree.nodes[node_id].right = r;
        return node_id;
    }
};

}  // namespace

FittedForest fit(const FeatureMatrix& x, const LabelMatrix& y, const ForestConfig& cfg) {
    cfg.validate();
    if (x.rows() != y.rows()) throw InputError("forest: feature/label row mismatch");
    if (x.rows() < 1) throw InputError("forest: empty training set");

    FittedForest f;
    f.config = cfg;
    f.n_features = x.cols();
    f.n_classes = y.cols();
    const std::size_t n = x.rows();
    const std::size_t n_sub =
        static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(x.cols()))));

    for (int t = 0; t < cfg.n_trees; ++t) {
        Rng rng(cfg.seed ^ static_cast<std::uint64_t>(t));
        std::vector<int> sample(n);
        for (std::size_t i = 0; i < n; ++i)
            sample[i] = static_cast<int>(rng.uniform_index(n));
        std::sort(sample.begin(), sample.end());
        f.bootstrap.push_back(sample);
        TreeBuilder builder{x, y, cfg.min_samples_split, n_sub, rng, {}};
        builder.build(sample);
        f.trees.push_back(std::move(builder.tree));
    }
    return f;
}

ProbabilityMatrix predict(const FittedForest& f, const FeatureMatrix& x,
                          const ClassHierarchy& h) {
    if (x.cols() != f.n_features)
        throw InputError("forest: feature column count differs from training");
    ProbabilityMatrix p;
    p.instance_ids = x.instance_ids;
    p.class_ids = h.classes();
    if (p.class_ids.size() != f.n_classes)
        throw InputError("forest: hierarchy class count differs from training");
    p.values.assign(x.rows() * f.n_classes, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double* row = &x.values[i * x.cols()];
        for (const auto& tree : f.trees) {
            const auto& leaf = tree.predict_row(row, x.cols());
            for (std::size_t c = 0; c < f.n_classes; ++c) p.at(i, c) += leaf[c];
        }
        for (std::size_t c = 0; c < f.n_classes; ++c) p.at(i, c) /= f.trees.size();
    }
    return enforce_probability_monotonicity(std::move(p), h);
}

ProbabilityMatrix predict_out_of_fold(const FeatureMatrix& x, const LabelMatrix& y,
                                      const ClassHierarchy& h, const ForestConfig& cfg) {
    cfg.validate();
    const std::size_t n = x.rows();
    if (n < static_cast<std::size_t>(cfg.folds))
        throw InputError("forest: fewer instances than folds");

    Rng rng(mix_seed(cfg.seed, 0xf01d));
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<int> fold_of(n);
    for (std::size_t k = 0; k < n; ++k)
        fold_of[order[k]] = static_cast<int>(k % cfg.folds);

    ProbabilityMatrix p;
    p.instance_ids = x.instance_ids;
    p.class_ids = h.classes();
    p.values.assign(n * y.cols(), 0.0);

    for (int fold = 0; fold < cfg.folds; ++fold) {
        FeatureMatrix x_train;
        LabelMatrix y_train;
        x_train.feature_names = x.feature_names;
        y_train.class_ids = y.class_ids;
        std::vector<int> test_rows;
        for (std::size_t i = 0; i < n; ++i) {
            if (fold_of[i] == fold) {
                test_rows.push_back(static_cast<int>(i));
                continue;
            }
            x_train.instance_ids.push_back(x.instance_ids[i]);
            y_train.instance_ids.push_back(y.instance_ids[i]);
            for (std::size_t j = 0; j < x.cols(); ++j) x_train.values.push_back(x.at(i, j));
            for (std::size_t c = 0; c < y.cols(); ++c) y_train.values.push_back(y.at(i, c));
        }
        ForestConfig fold_cfg = cfg;
        fold_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(fold) + 1);
        FittedForest f = fit(x_train, y_train, fold_cfg);

        FeatureMatrix x_test;
        x_test.feature_names = x.feature_names;
        for (int i : test_rows) {
            x_test.instance_ids.push_back(x.instance_ids[i]);
            for (std::size_t j = 0; j < x.cols(); ++j) x_test.values.push_back(x.at(i, j));
        }
        ProbabilityMatrix part = predict(f, x_test, h);
        for (std::size_t k = 0; k < test_rows.size(); ++k)
            for (std::size_t c = 0; c < y.cols(); ++c)
                p.at(test_rows[k], c) = part.at(k, c);
    }
    return p;
}

OobCounts oob_vote_counts(const FittedForest& f, const FeatureMatrix& x,
                          const std::vector<double>& class_thresholds) {
    if (class_thresholds.size() != f.n_classes)
        throw InputError("oob_vote_counts: threshold count mismatch");
    const std::size_t n = x.rows();
    OobCounts counts;
    counts.n_classes = f.n_classes;
    counts.oob_trees.assign(n, 0);
    counts.positive_votes.assign(n * f.n_classes, 0);
    std::vector<bool> in_bag(n);
    for (std::size_t t = 0; t < f.trees.size(); ++t) {
        std::fill(in_bag.begin(), in_bag.end(), false);
        for (int i : f.bootstrap[t]) in_bag[i] = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (in_bag[i]) continue;
            ++counts.oob_trees[i];
            const auto& leaf = f.trees[t].predict_row(&x.values[i * x.cols()], x.cols());
            for (std::size_t c = 0; c < f.n_classes; ++c)
                if (leaf[c] >= class_thresholds[c])
                    ++counts.positive_votes[i * f.n_classes + c];
        }
    }
    return counts;
}

void serialize_forest(const FittedForest& f, std::ostream& out) {
    out.precision(17);
    out << "hma-forest v1\n";
    out << f.config.n_trees << ' ' << f.config.min_samples_split << ' '
        << f.config.folds << ' ' << f.config.seed << '\n';
    out << f.n_features << ' ' << f.n_classes << '\n';
    for (std::size_t t = 0; t < f.trees.size(); ++t) {
        out << "tree " << f.trees[t].nodes.size() << ' ' << f.bootstrap[t].size() << '\n';
        for (int i : f.bootstrap[t]) out << i << ' ';
        out << '\n';
        for (const auto& node : f.trees[t].nodes) {
            out << node.feature << ' ' << node.threshold << ' ' << node.left << ' '
                << node.right;
            for (double v : node.leaf) out << ' ' << v;
            out << '\n';
        }
    }
}

void save_forest(const FittedForest& f, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write model file: " + path);
    serialize_forest(f, out);
}

FittedForest load_forest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open model file: " + path);
    std::string magic, version;
    in >> magic >> version;
    if (magic != "hma-forest" || version != "v1")
        throw InputError(path + ": not a v1 model file");
    FittedForest f;
    in >> f.config.n_trees >> f.config.min_samples_split >> f.config.folds >>
        f.config.seed;
    in >> f.n_features >> f.n_classes;
    std::string tag;
    while (in >> tag) {
        if (tag != "tree") throw InputError(path + ": malformed model file");
        std::size_t n_nodes, n_bag;
        in >> n_nodes >> n_bag;
        std::vector<int> bag(n_bag);
        for (auto& b : bag) in >> b;
        Tree tree;
        tree.nodes.resize(n_nodes);
        for (auto& node : tree.nodes) {
            in >> node.feature >> node.threshold >> node.left >> node.right;
            if (node.feature < 0) {
                node.leaf.resize(f.n_classes);
                for (auto& v : node.leaf) in >> v;
            }
        }
        if (!in) throw InputError(path + ": truncated model file");
        f.bootstrap.push_back(std::move(bag));
        f.trees.push_back(std::move(tree));
    }
    if (static_cast<int>(f.trees.size()) != f.config.n_trees)
        throw InputError(path + ": tree count mismatch");
    return f;
}

}  // namespace hma
