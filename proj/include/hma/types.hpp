#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace hma {

// (instance index, class index) in the shared row/column orderings.
using Pair = std::pair<int, int>;
using PairSet = std::set<Pair>;

struct FeatureMatrix {
    std::vector<std::string> instance_ids;
    std::vector<std::string> feature_names;
    std::vector<double> values;  // row-major |I| x |F|

    std::size_t rows() const { return instance_ids.size(); }
    std::size_t cols() const { return feature_names.size(); }
    double at(std::size_t i, std::size_t j) const { return values[i * cols() + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * cols() + j]; }
};

// Binary annotation matrix; ancestor-closed w.r.t. the bound hierarchy
// (validated at load, maintained by construction elsewhere).
struct LabelMatrix {
    std::vector<std::string> instance_ids;
    std::vector<std::string> class_ids;
    std::vector<std::uint8_t> values;  // row-major |I| x |C|, 0/1

    std::size_t rows() const { return instance_ids.size(); }
    std::size_t cols() const { return class_ids.size(); }
    std::uint8_t at(std::size_t i, std::size_t c) const { return values[i * cols() + c]; }
    std::uint8_t& at(std::size_t i, std::size_t c) { return values[i * cols() + c]; }

    long count_ones() const {
        long s = 0;
        for (auto v : values) s += v;
        return s;
    }
};

// Real-valued predictions in [0,1]; parent >= child after monotonicity
// enforcement.
struct ProbabilityMatrix {
    std::vector<std::string> instance_ids;
    std::vector<std::string> class_ids;
    std::vector<double> values;  // row-major |I| x |C|

    std::size_t rows() const { return instance_ids.size(); }
    std::size_t cols() const { return class_ids.size(); }
    double at(std::size_t i, std::size_t c) const { return values[i * cols() + c]; }
    double& at(std::size_t i, std::size_t c) { return values[i * cols() + c]; }
};

}  // namespace hma
