#include <doctest.h>

#include <sstream>

#include "hma/baselines.hpp"
#include "hma/forest.hpp"
#include "hma/util.hpp"
#include "test_helpers.hpp"

using namespace hma;
using test_helpers::make_hierarchy;
using test_helpers::make_labels;

namespace {

FeatureMatrix make_features(const std::vector<std::string>& ids,
                            const std::vector<std::vector<double>>& rows) {
    FeatureMatrix x;
    x.instance_ids = ids;
    for (std::size_t j = 0; j < rows[0].size(); ++j)
        x.feature_names.push_back("f" + std::to_string(j));
    for (const auto& row : rows)
        for (double v : row) x.values.push_back(v);
    return x;
}

}  // namespace

TEST_CASE("single-instance training set: every tree predicts that label row") {
    auto h = make_hierarchy({{"a", "r"}, {"b", "a"}}, "r");
    auto x = make_features({"i0"}, {{1.0, 2.0}});
    auto y = make_labels(h, 1, {{0, h.index_of("r")}, {0, h.index_of("a")}});
    ForestConfig cfg;
    cfg.n_trees = 10;
    cfg.seed = 3;
    auto f = fit(x, y, cfg);
    for (const auto& tree : f.trees) {
        REQUIRE(tree.nodes.size() == 1);
        CHECK(tree.nodes[0].leaf[h.index_of("r")] == 1.0);
        CHECK(tree.nodes[0].leaf[h.index_of("a")] == 1.0);
        CHECK(tree.nodes[0].leaf[h.index_of("b")] == 0.0);
    }
    auto p = predict(f, x, h);
    CHECK(p.at(0, h.index_of("r")) == 1.0);
    CHECK(p.at(0, h.index_of("b")) == 0.0);
}

TEST_CASE("two separable groups give depth-1 trees with group means") {
    auto h = make_hierarchy({{"a", "r"}, {"b", "r"}}, "r");
    int r = h.index_of("r"), a = h.index_of("a"), b = h.index_of("b");
    // Group 1 (x<1): labels {r,a}; group 2 (x>4): labels {r,b}. Twenty
    // instances make a single-group bootstrap sample vanishingly unlikely.
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    std::vector<Pair> ones;
    for (int i = 0; i < 20; ++i) {
        ids.push_back("i" + std::to_string(i));
        bool first = i < 10;
        rows.push_back({(first ? 0.0 : 5.0) + 0.01 * i});
        ones.push_back({i, r});
        ones.push_back({i, first ? a : b});
    }
    auto x = make_features(ids, rows);
    auto y = make_labels(h, 20, ones);
    ForestConfig cfg;
    cfg.n_trees = 20;
    cfg.min_samples_split = 2;
    cfg.seed = 1;
    auto f = fit(x, y, cfg);
    for (const auto& tree : f.trees) {
        // The only variance-reducing split separates the groups; within a
        // side labels are constant, so the children are leaves.
        REQUIRE(tree.nodes[0].feature == 0);
        CHECK(tree.nodes[0].threshold > 0.2);
        CHECK(tree.nodes[0].threshold < 5.0);
        CHECK(tree.nodes.size() == 3);
    }
    auto p = predict(f, x, h);
    CHECK(p.at(0, a) == doctest::Approx(1.0));
    CHECK(p.at(0, b) == doctest::Approx(0.0));
    CHECK(p.at(15, b) == doctest::Approx(1.0));
}

TEST_CASE("same seed, same data: byte-identical forests") {
    Rng rng(88);
    auto h = test_helpers::random_hierarchy(rng, 8);
    auto y = test_helpers::random_labels(rng, h, 30);
    FeatureMatrix x;
    x.instance_ids = y.instance_ids;
    for (int j = 0; j < 4; ++j) x.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t k = 0; k < 30 * 4; ++k) x.values.push_back(rng.uniform_real());

    ForestConfig cfg;
    cfg.n_trees = 25;
    cfg.seed = 999;
    auto f1 = fit(x, y, cfg);
    auto f2 = fit(x, y, cfg);
    std::ostringstream s1, s2;
    serialize_forest(f1, s1);
    serialize_forest(f2, s2);
    CHECK(s1.str() == s2.str());

    cfg.seed = 1000;
    auto f3 = fit(x, y, cfg);
    std::ostringstream s3;
    serialize_forest(f3, s3);
    CHECK(s1.str() != s3.str());
}

TEST_CASE("forest round-trips through the model file") {
    Rng rng(4);
    auto h = test_helpers::random_hierarchy(rng, 6);
    auto y = test_helpers::random_labels(rng, h, 12);
    FeatureMatrix x;
    x.instance_ids = y.instance_ids;
    x.feature_names = {"f0", "f1"};
    for (std::size_t k = 0; k < 24; ++k) x.values.push_back(rng.uniform_real());
    ForestConfig cfg;
    cfg.n_trees = 5;
    cfg.seed = 2;
    auto f = fit(x, y, cfg);
    save_forest(f, "t_model.txt");
    auto g = load_forest("t_model.txt");
    std::ostringstream s1, s2;
    serialize_forest(f, s1);
    serialize_forest(g, s2);
    CHECK(s1.str() == s2.str());
    std::remove("t_model.txt");
}

TEST_CASE("predictions are monotone and within the training column range") {
    Rng rng(21);
    auto h = test_helpers::random_hierarchy(rng, 10);
    auto y = test_helpers::random_labels(rng, h, 40);
    FeatureMatrix x;
    x.instance_ids = y.instance_ids;
    for (int j = 0; j < 5; ++j) x.feature_names.push_back("f" + std::to_string(j));
    for (std::size_t k = 0; k < 40 * 5; ++k) x.values.push_back(rng.uniform_real());
    ForestConfig cfg;
    cfg.n_trees = 30;
    cfg.seed = 5;
    auto p = predict(fit(x, y, cfg), x, h);
    for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t c = 0; c < p.cols(); ++c) {
            CHECK(p.at(i, c) >= 0.0);
            CHECK(p.at(i, c) <= 1.0);
            int par = h.parent((int)c);
            if (par >= 0) CHECK(p.at(i, c) <= p.at(i, par) + 1e-12);
        }
    }
}

TEST_CASE("out-of-fold prediction partitions the instances") {
    Rng rng(31);
    auto h = test_helpers::random_hierarchy(rng, 6);
    auto y = test_helpers::random_labels(rng, h, 15);
    FeatureMatrix x;
    x.instance_ids = y.instance_ids;
    x.feature_names = {"f0"};
    for (std::size_t k = 0; k < 15; ++k) x.values.push_back(rng.uniform_real());
    ForestConfig cfg;
    cfg.n_trees = 5;
    cfg.folds = 5;
    cfg.seed = 8;
    auto p = predict_out_of_fold(x, y, h, cfg);
    CHECK(p.rows() == 15);
    // Leave-one-out also works.
    cfg.folds = 15;
    auto loo = predict_out_of_fold(x, y, h, cfg);
    CHECK(loo.rows() == 15);
    cfg.folds = 16;
    CHECK_THROWS_AS(predict_out_of_fold(x, y, h, cfg), InputError);
}

TEST_CASE("out-of-fold recovers labels on separable duplicated data") {
    auto h = make_hierarchy({{"a", "r"}, {"b", "r"}}, "r");
    int r = h.index_of("r"), a = h.index_of("a"), b = h.index_of("b");
    std::vector<std::string> ids;
    std::vector<std::vector<double>> rows;
    std::vector<Pair> ones;
    for (int i = 0; i < 20; ++i) {
        ids.push_back("i" + std::to_string(i));
        bool first = i % 2 == 0;
        rows.push_back({first ? 0.0 + 0.01 * i : 5.0 + 0.01 * i});
        ones.push_back({i, r});
        ones.push_back({i, first ? a : b});
    }
    auto x = make_features(ids, rows);
    auto y = make_labels(h, 20, ones);
    ForestConfig cfg;
    cfg.n_trees = 50;
    cfg.min_samples_split = 2;
    cfg.folds = 2;
    cfg.seed = 12;
    auto p = predict_out_of_fold(x, y, h, cfg);
    int correct = 0;
    for (int i = 0; i < 20; ++i) {
        int want = i % 2 == 0 ? a : b;
        int other = i % 2 == 0 ? b : a;
        if (p.at(i, want) > 0.8 && p.at(i, other) < 0.2) ++correct;
    }
    CHECK(correct >= 18);
}

TEST_CASE("oob vote counters") {
    Rng rng(61);
    auto h = test_helpers::random_hierarchy(rng, 6);
    auto y = test_helpers::random_labels(rng, h, 120);
    FeatureMatrix x;
    x.instance_ids = y.instance_ids;
    x.feature_names = {"f0", "f1"};
    for (std::size_t k = 0; k < 240; ++k) x.values.push_back(rng.uniform_real());
    ForestConfig cfg;
    cfg.n_trees = 200;
    cfg.seed = 77;
    auto f = fit(x, y, cfg);
    auto counts = oob_vote_counts(f, x, class_thresholds(LevelThresholdRule{}, h));

    // OOB fraction per (instance, tree) pair approximates 1 - (1-1/n)^n.
    double total = 0;
    for (int c : counts.oob_trees) total += c;
    double fraction = total / (120.0 * 200.0);
    CHECK(fraction > 0.30);
    CHECK(fraction < 0.45);

    // Positive votes never exceed OOB trees.
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t c = 0; c < y.cols(); ++c)
            CHECK(counts.positive(i, c) <= counts.oob_trees[i]);
}

TEST_CASE("oob counters against a hand-built forest") {
    auto h = make_hierarchy({{"a", "r"}}, "r");
    FeatureMatrix x = make_features({"i0", "i1"}, {{0.0}, {1.0}});
    FittedForest f;
    f.config.n_trees = 3;
    f.config.min_samples_split = 2;
    f.n_features = 1;
    f.n_classes = 2;
    // Three stump-free trees: single leaves with fixed vectors.
    for (double v : {0.9, 0.2, 0.6}) {
        Tree t;
        TreeNode leaf;
        leaf.leaf = {1.0, v};
        t.nodes.push_back(leaf);
        f.trees.push_back(t);
    }
    // i0 out-of-bag in trees 0 and 2; i1 out-of-bag in tree 1 only.
    f.bootstrap = {{1, 1}, {0, 0}, {1, 1}};
    auto counts = oob_vote_counts(f, x, {0.5, 0.5});
    CHECK(counts.oob_trees[0] == 2);
    CHECK(counts.oob_trees[1] == 1);
    CHECK(counts.positive(0, 1) == 2);  // 0.9 and 0.6 reach 0.5
    CHECK(counts.positive(1, 1) == 0);  // 0.2 does not
    CHECK(counts.positive(0, 0) == 2);  // root always 1.0
}
