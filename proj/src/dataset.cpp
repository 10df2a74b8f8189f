#include "hma/dataset.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "hma/util.hpp"

namespace hma {

FeatureMatrix load_features_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open features file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw InputError("empty features file: " + path);
    auto header = split(trim(line), ',');
    if (header.size() < 2 || header[0] != "id")
        throw InputError(path + ": features header must start with `id`");

    FeatureMatrix x;
    x.feature_names.assign(header.begin() + 1, header.end());
    std::set<std::string> seen;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty()) continue;
        auto fields = split(t, ',');
        if (fields.size() != header.size())
            throw InputError(path + ":" + std::to_string(line_no) + ": expected " +
                             std::to_string(header.size()) + " fields");
        if (!seen.insert(fields[0]).second)
            throw InputError(path + ":" + std::to_string(line_no) +
                             ": duplicate instance id " + fields[0]);
        x.instance_ids.push_back(fields[0]);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            double v;
            try {
                v = std::stod(fields[j]);
            } catch (const std::exception&) {
                throw InputError(path + ":" + std::to_string(line_no) +
                                 ": non-numeric value `" + fields[j] + "`");
            }
            if (!std::isfinite(v))
                throw InputError(path + ":" + std::to_string(line_no) +
                                 ": non-finite value");
            x.values.push_back(v);
        }
    }
    return x;
}

void ancestor_close(LabelMatrix& y, const ClassHierarchy& h) {
    for (std::size_t i = 0; i < y.rows(); ++i) {
        // Reverse class order: children before parents in the BFS layout.
        for (std::size_t c = y.cols(); c-- > 1;) {
            if (y.at(i, c) == 1) {
                int p = h.parent(static_cast<int>(c));
                y.at(i, p) = 1;
            }
        }
    }
}

LabelMatrix load_annotations(const std::string& path, const ClassHierarchy& h,
                             const std::vector<std::string>& instance_ids) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open annotations file: " + path);
    std::map<std::string, int> row_of;
    for (std::size_t i = 0; i < instance_ids.size(); ++i)
        row_of[instance_ids[i]] = static_cast<int>(i);

    LabelMatrix y;
    y.instance_ids = instance_ids;
    y.class_ids = h.classes();
    y.values.assign(y.rows() * y.cols(), 0);

    std::string line;
    int line_no = 0, duplicates = 0, dropped_instances = 0;
    std::vector<std::string> bad_class_lines;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split(t, '\t');
        if (fields.size() != 2)
            throw InputError(path + ":" + std::to_string(line_no) +
                             ": expected instance<TAB>class");
        int c = h.index_of(fields[1]);
        if (c < 0) {
            bad_class_lines.push_back(std::to_string(line_no) + " (" + fields[1] + ")");
            continue;
        }
        auto it = row_of.find(fields[0]);
        if (it == row_of.end()) {
            ++dropped_instances;
            continue;
        }
        if (y.at(it->second, c) == 1)
            ++duplicates;
        else
            y.at(it->second, c) = 1;
    }
    if (!bad_class_lines.empty()) {
        std::string msg = path + ": unknown class id on line(s):";
        for (const auto& l : bad_class_lines) msg += " " + l;
        throw InputError(msg);
    }
    if (duplicates > 0)
        std::cerr << "[dataset] " << duplicates << " duplicate annotation pair(s) in "
                  << path << " deduplicated\n";
    if (dropped_instances > 0)
        std::cerr << "[dataset] warning: " << dropped_instances
                  << " annotation(s) for instances without features dropped from "
                  << path << "\n";
    ancestor_close(y, h);
    return y;
}

std::pair<FeatureMatrix, LabelMatrix> load_dataset(const std::string& features_path,
                                                   const std::string& annotations_path,
                                                   const ClassHierarchy& h) {
    FeatureMatrix x = load_features_csv(features_path);
    LabelMatrix y = load_annotations(annotations_path, h, x.instance_ids);
    return {std::move(x), std::move(y)};
}

void save_annotations(const LabelMatrix& y, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write annotations file: " + path);
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t c = 0; c < y.cols(); ++c)
            if (y.at(i, c) == 1)
                out << y.instance_ids[i] << '\t' << y.class_ids[c] << '\n';
}

TransitionSet diff_versions(const LabelMatrix& y_old, const LabelMatrix& y_new) {
    if (y_old.instance_ids != y_new.instance_ids || y_old.class_ids != y_new.class_ids)
        throw InputError("diff_versions: matrices are not aligned");
    TransitionSet t;
    for (std::size_t i = 0; i < y_old.rows(); ++i) {
        for (std::size_t c = 0; c < y_old.cols(); ++c) {
            if (y_old.at(i, c) == 0 && y_new.at(i, c) == 1)
                t.gained.emplace(static_cast<int>(i), static_cast<int>(c));
            else if (y_old.at(i, c) == 1 && y_new.at(i, c) == 0)
                t.lost.emplace(static_cast<int>(i), static_cast<int>(c));
        }
    }
    return t;
}

std::vector<Pair> candidate_annotations(const LabelMatrix& y, const ProbabilityMatrix& p) {
    if (y.rows() != p.rows() || y.cols() != p.cols())
        throw InputError("candidate_annotations: shape mismatch");
    std::vector<Pair> out;
    for (std::size_t i = 0; i < y.rows(); ++i)
        for (std::size_t c = 0; c < y.cols(); ++c)
            if (y.at(i, c) == 0 && p.at(i, c) > 0.0)
                out.emplace_back(static_cast<int>(i), static_cast<int>(c));
    return out;
}

}  // namespace hma
