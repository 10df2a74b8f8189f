#include <doctest.h>

#include <cstdio>
#include <fstream>

#include "hma/dataset.hpp"
#include "hma/util.hpp"
#include "test_helpers.hpp"

using namespace hma;
using test_helpers::make_hierarchy;
using test_helpers::make_labels;

namespace {

struct TempFile {
    std::string path;
    TempFile(const std::string& p, const std::string& content) : path(p) {
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_dataset closes annotations under ancestors") {
    auto h = make_hierarchy({{"c", "r"}}, "r");
    TempFile features("t_feat.csv", "id,f0\ng1,1.0\ng2,2.0\n");
    TempFile annots("t_annot.tsv", "g1\tc\n");
    auto [x, y] = load_dataset(features.path, annots.path, h);
    CHECK(x.rows() == 2);
    CHECK(y.at(0, h.index_of("c")) == 1);
    CHECK(y.at(0, h.index_of("r")) == 1);
    // Feature-only instance keeps an all-zero row.
    CHECK(y.at(1, h.index_of("c")) == 0);
    CHECK(y.at(1, h.index_of("r")) == 0);
    CHECK(check_hierarchy_constraint(y, h).empty());
}

TEST_CASE("empty annotation file gives an all-zero matrix") {
    auto h = make_hierarchy({{"c", "r"}}, "r");
    TempFile features("t_feat2.csv", "id,f0\ng1,1.0\n");
    TempFile annots("t_annot2.tsv", "");
    auto [x, y] = load_dataset(features.path, annots.path, h);
    CHECK(y.count_ones() == 0);
}

TEST_CASE("duplicate annotation pairs are deduplicated") {
    auto h = make_hierarchy({{"c", "r"}}, "r");
    TempFile features("t_feat3.csv", "id,f0\ng1,1.0\n");
    TempFile once("t_annot3a.tsv", "g1\tc\n");
    TempFile twice("t_annot3b.tsv", "g1\tc\ng1\tc\n");
    auto y1 = load_annotations(once.path, h, {"g1"});
    auto y2 = load_annotations(twice.path, h, {"g1"});
    CHECK(y1.values == y2.values);
}

TEST_CASE("unknown class ids are load errors naming the line") {
    auto h = make_hierarchy({{"c", "r"}}, "r");
    TempFile annots("t_annot4.tsv", "g1\tc\ng1\tnope\n");
    CHECK_THROWS_WITH_AS(load_annotations(annots.path, h, {"g1"}),
                         doctest::Contains("line(s): 2"), InputError);
}

TEST_CASE("non-finite feature values are load errors") {
    TempFile features("t_feat5.csv", "id,f0\ng1,nan\n");
    CHECK_THROWS_AS(load_features_csv(features.path), InputError);
}

TEST_CASE("annotations round-trip through save and load") {
    Rng rng(17);
    auto h = test_helpers::random_hierarchy(rng, 12);
    auto y = test_helpers::random_labels(rng, h, 6);
    save_annotations(y, "t_roundtrip.tsv");
    auto y2 = load_annotations("t_roundtrip.tsv", h, y.instance_ids);
    CHECK(y.values == y2.values);
    std::remove("t_roundtrip.tsv");
}

TEST_CASE("diff_versions finds flips and is antisymmetric") {
    auto h = make_hierarchy({{"c", "r"}}, "r");
    auto a = make_labels(h, 2, {{0, h.index_of("r")}});
    auto b = make_labels(h, 2, {{0, h.index_of("r")}, {1, h.index_of("r")}});

    auto same = diff_versions(a, a);
    CHECK(same.gained.empty());
    CHECK(same.lost.empty());

    auto forward = diff_versions(a, b);
    CHECK(forward.gained == PairSet{{1, h.index_of("r")}});
    CHECK(forward.lost.empty());

    auto backward = diff_versions(b, a);
    CHECK(backward.lost == forward.gained);
    CHECK(backward.gained == forward.lost);
}

TEST_CASE("diff_versions rejects misaligned matrices") {
    auto h = make_hierarchy({{"c", "r"}}, "r");
    auto a = make_labels(h, 2);
    auto b = make_labels(h, 3);
    CHECK_THROWS_AS(diff_versions(a, b), InputError);
}

TEST_CASE("candidate_annotations selects exactly y=0, p>0") {
    auto h = make_hierarchy({{"c", "r"}}, "r");
    auto y = make_labels(h, 2, {{0, 0}});
    // y = [[1,0],[0,0]] over (r, c); p = [[.9,.2],[0,.5]]
    auto p = test_helpers::make_probs(y, {0.9, 0.2, 0.0, 0.5});
    auto got = candidate_annotations(y, p);
    CHECK(got == std::vector<Pair>{{0, 1}, {1, 1}});

    auto zeros = test_helpers::make_probs(y, {0.0, 0.0, 0.0, 0.0});
    CHECK(candidate_annotations(y, zeros).empty());

    auto ones = make_labels(h, 2, {{0, 0}, {0, 1}, {1, 0}, {1, 1}});
    CHECK(candidate_annotations(ones, p).empty());
}
