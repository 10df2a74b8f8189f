#include "hma/hierarchy.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <queue>
#include <set>

#include "hma/util.hpp"

namespace hma {

int ClassHierarchy::index_of(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? -1 : it->second;
}

void ClassHierarchy::finalize() {
    const int n = static_cast<int>(classes_.size());
    children_.assign(n, {});
    for (int c = 1; c < n; ++c) children_[parent_[c]].push_back(c);

    level_.assign(n, 0);
    level_[0] = 1;
    // classes_ is in BFS order, so parents precede children.
    for (int c = 1; c < n; ++c) level_[c] = level_[parent_[c]] + 1;
    num_levels_ = *std::max_element(level_.begin(), level_.end());

    leaf_paths_.clear();
    for (int c = 0; c < n; ++c) {
        if (!children_[c].empty()) continue;
        std::vector<int> path;
        for (int v = c; v != -1; v = parent_[v]) path.push_back(v);
        leaf_paths_.push_back(std::move(path));
    }
}

ClassHierarchy dag_to_tree(const RawHierarchyDag& dag, const std::string& root) {
    std::map<std::string, std::vector<std::string>> parents_of;  // child -> parents
    std::map<std::string, std::vector<std::string>> children_of; // parent -> children
    std::set<std::string> known(dag.classes.begin(), dag.classes.end());
    for (const auto& [child, parent] : dag.edges) {
        known.insert(child);
        known.insert(parent);
        parents_of[child].push_back(parent);
        children_of[parent].push_back(child);
    }
    if (!known.count(root)) throw InputError("hierarchy root not found: " + root);

    // Classes reachable downward from the root.
    std::set<std::string> reachable;
    std::vector<std::string> stack{root};
    while (!stack.empty()) {
        std::string v = stack.back();
        stack.pop_back();
        if (!reachable.insert(v).second) continue;
        auto it = children_of.find(v);
        if (it != children_of.end())
            for (const auto& c : it->second) stack.push_back(c);
    }
    if (reachable.size() < known.size()) {
        std::cerr << "[hierarchy] warning: dropping " << known.size() - reachable.size()
                  << " class(es) not reachable from root " << root << "\n";
    }

    // Deterministic topological order (Kahn, lexicographic tie-break) over
    // the reachable sub-DAG, parents before children.
    std::map<std::string, int> indegree;
    for (const auto& v : reachable) indegree[v] = 0;
    for (const auto& [child, parents] : parents_of) {
        if (!reachable.count(child)) continue;
        for (const auto& p : parents)
            if (reachable.count(p)) ++indegree[child];
    }
    std::set<std::string> ready;
    for (const auto& [v, d] : indegree)
        if (d == 0) ready.insert(v);
    std::map<std::string, int> topo_pos;
    int pos = 0;
    while (!ready.empty()) {
        std::string v = *ready.begin();
        ready.erase(ready.begin());
        topo_pos[v] = pos++;
        auto it = children_of.find(v);
        if (it == children_of.end()) continue;
        for (const auto& c : it->second) {
            if (!reachable.count(c)) continue;
            if (--indegree[c] == 0) ready.insert(c);
        }
    }
    if (topo_pos.size() != reachable.size())
        throw InputError("hierarchy contains a cycle reachable from root " + root);

    // Retained parent: earliest topological position, lexicographic tie-break.
    std::map<std::string, std::string> kept_parent;
    for (const auto& v : reachable) {
        if (v == root) continue;
        const std::string* best = nullptr;
        for (const auto& p : parents_of[v]) {
            if (!reachable.count(p)) continue;
            if (!best || topo_pos[p] < topo_pos[*best] ||
                (topo_pos[p] == topo_pos[*best] && p < *best)) {
                best = &p;
            }
        }
        if (!best) throw InputError("class without reachable parent: " + v);
        kept_parent[v] = *best;
    }

    // BFS order from the root with lexicographically sorted children.
    std::map<std::string, std::vector<std::string>> tree_children;
    for (const auto& [c, p] : kept_parent) tree_children[p].push_back(c);
    for (auto& [p, cs] : tree_children) std::sort(cs.begin(), cs.end());

    ClassHierarchy h;
    std::queue<std::string> bfs;
    bfs.push(root);
    h.parent_.push_back(-1);
    while (!bfs.empty()) {
        std::string v = bfs.front();
        bfs.pop();
        int idx = static_cast<int>(h.classes_.size());
        h.classes_.push_back(v);
        h.index_[v] = idx;
        auto it = tree_children.find(v);
        if (it == tree_children.end()) continue;
        for (const auto& c : it->second) bfs.push(c);
    }
    h.parent_.assign(h.classes_.size(), -1);
    for (std::size_t i = 1; i < h.classes_.size(); ++i)
        h.parent_[i] = h.index_[kept_parent[h.classes_[i]]];
    h.finalize();
    return h;
}

RawHierarchyDag load_hierarchy_edges(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open hierarchy file: " + path);
    RawHierarchyDag dag;
    std::set<std::string> seen;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto fields = split(t, '\t');
        if (fields.size() != 2 || fields[0].empty() || fields[1].empty())
            throw InputError(path + ":" + std::to_string(line_no) +
                             ": expected child<TAB>parent");
        dag.edges.emplace_back(fields[0], fields[1]);
        for (const auto& c : {fields[0], fields[1]})
            if (seen.insert(c).second) dag.classes.push_back(c);
    }
    return dag;
}

std::vector<std::string> find_roots(const RawHierarchyDag& dag) {
    std::set<std::string> child_side;
    for (const auto& [child, parent] : dag.edges) child_side.insert(child);
    std::vector<std::string> roots;
    for (const auto& c : dag.classes)
        if (!child_side.count(c)) roots.push_back(c);
    std::sort(roots.begin(), roots.end());
    return roots;
}

std::string infer_root(const RawHierarchyDag& dag) {
    auto roots = find_roots(dag);
    if (roots.empty()) throw InputError("no root class (every class has a parent)");
    if (roots.size() > 1) {
        std::string msg = "multiple root candidates, pass --root:";
        for (const auto& r : roots) msg += " " + r;
        throw InputError(msg);
    }
    return roots[0];
}

std::vector<Pair> check_hierarchy_constraint(const LabelMatrix& y, const ClassHierarchy& h) {
    if (y.class_ids != h.classes())
        throw InputError("label matrix class set does not match hierarchy");
    std::vector<Pair> violations;
    for (std::size_t i = 0; i < y.rows(); ++i) {
        for (std::size_t c = 0; c < y.cols(); ++c) {
            int p = h.parent(static_cast<int>(c));
            if (p >= 0 && y.at(i, c) == 1 && y.at(i, p) == 0)
                violations.emplace_back(static_cast<int>(i), static_cast<int>(c));
        }
    }
    return violations;
}

ProbabilityMatrix enforce_probability_monotonicity(ProbabilityMatrix p, const ClassHierarchy& h) {
    if (p.class_ids != h.classes())
        throw InputError("probability matrix class set does not match hierarchy");
    for (double v : p.values)
        if (!(v >= 0.0 && v <= 1.0))
            throw InputError("probability outside [0,1]");
    // Class order is BFS, so a parent's row entry is final before any child.
    for (std::size_t i = 0; i < p.rows(); ++i) {
        for (std::size_t c = 1; c < p.cols(); ++c) {
            int par = h.parent(static_cast<int>(c));
            double cap = p.at(i, par);
            if (p.at(i, c) > cap) p.at(i, c) = cap;
        }
    }
    return p;
}

}  // namespace hma
