#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hma/types.hpp"

namespace hma {

// Multi-parent class DAG as read from an edge-list file.
struct RawHierarchyDag {
    std::vector<std::string> classes;                       // unique, in first-appearance order
    std::vector<std::pair<std::string, std::string>> edges; // (child, parent)
};

// Rooted tree of class identifiers. Immutable after construction; safe for
// concurrent reads. Class 0 is always the root; classes are ordered by a
// breadth-first walk from the root with lexicographically sorted children,
// so identical input bytes always produce the identical object.
class ClassHierarchy {
public:
    const std::vector<std::string>& classes() const { return classes_; }
    std::size_t size() const { return classes_.size(); }
    const std::string& class_id(int c) const { return classes_[c]; }
    int index_of(const std::string& id) const;  // -1 when absent

    int root() const { return 0; }
    int parent(int c) const { return parent_[c]; }  // -1 for the root
    int level(int c) const { return level_[c]; }    // root = 1
    int num_levels() const { return num_levels_; }
    const std::vector<int>& children(int c) const { return children_[c]; }
    bool is_leaf(int c) const { return children_[c].empty(); }

    // One path per leaf, ordered leaf -> root, ordered by leaf class index.
    const std::vector<std::vector<int>>& leaf_paths() const { return leaf_paths_; }

    friend ClassHierarchy dag_to_tree(const RawHierarchyDag& dag, const std::string& root);

private:
    std::vector<std::string> classes_;
    std::map<std::string, int> index_;
    std::vector<int> parent_;
    std::vector<int> level_;
    std::vector<std::vector<int>> children_;
    std::vector<std::vector<int>> leaf_paths_;
    int num_levels_ = 0;

    void finalize();  // levels, children, leaf paths
};

// Resolves multi-parent classes: the retained parent is the one appearing
// earliest in the deterministic topological order of the DAG (Kahn's
// algorithm, lexicographic tie-break). Classes unreachable from `root` are
// dropped with a warning on stderr.
ClassHierarchy dag_to_tree(const RawHierarchyDag& dag, const std::string& root);

// TSV edge list: child<TAB>parent, '#' comments allowed.
RawHierarchyDag load_hierarchy_edges(const std::string& path);

// The class that never appears in the child column. Errors when ambiguous.
std::string infer_root(const RawHierarchyDag& dag);
std::vector<std::string> find_roots(const RawHierarchyDag& dag);

// Every (instance, class) with y[i,c]=1 and y[i,parent(c)]=0.
std::vector<Pair> check_hierarchy_constraint(const LabelMatrix& y, const ClassHierarchy& h);

// Top-down min-clamp: out[i,c] = min(in[i,c], out[i,parent(c)]). Idempotent,
// never increases an entry, leaves the root row untouched.
ProbabilityMatrix enforce_probability_monotonicity(ProbabilityMatrix p, const ClassHierarchy& h);

}  // namespace hma
