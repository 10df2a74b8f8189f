#include "hma/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

#include <nlohmann/json.hpp>

#include "hma/baselines.hpp"
#include "hma/dataset.hpp"
#include "hma/evaluation.hpp"
#include "hma/gcn.hpp"
#include "hma/util.hpp"

namespace hma {

namespace fs = std::filesystem;
using json = nlohmann::json;

void RunConfig::validate() const {
    if (hierarchy_path.empty()) throw InputError("config: hierarchy path required");
    if (annotations_old_path.empty() || annotations_new_path.empty())
        throw InputError("config: both annotation versions required");
    if (features_path.empty() && edges_path.empty())
        throw InputError("config: either a features CSV or a GCN edge list is required");
    if (!(n_step > 0.0)) throw InputError("config: n-step must be > 0");
    if (!(n_start > 0.0 && n_stop <= 1.0 && n_start <= n_stop))
        throw InputError("config: n-grid must lie within (0,1]");
    if (methods.empty()) throw InputError("config: at least one method required");
    forest.validate();
    for (const auto& path : {hierarchy_path, annotations_old_path, annotations_new_path}) {
        if (!fs::exists(path)) throw InputError("config: missing input file " + path);
    }
    if (!features_path.empty() && !fs::exists(features_path))
        throw InputError("config: missing input file " + features_path);
    if (!edges_path.empty() && !fs::exists(edges_path))
        throw InputError("config: missing input file " + edges_path);
}

std::vector<double> RunConfig::n_grid() const {
    std::vector<double> grid;
    // Integer stepping avoids drift from repeated float addition.
    for (int k = 0;; ++k) {
        double n = n_start + k * n_step;
        if (n > n_stop + 1e-12) break;
        grid.push_back(n);
    }
    return grid;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open config file: " + path);
    RunConfig cfg;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto eq = t.find('=');
        if (eq == std::string::npos)
            throw InputError(path + ":" + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(t.substr(0, eq));
        std::string value = trim(t.substr(eq + 1));
        if (key == "hierarchy") cfg.hierarchy_path = value;
        else if (key == "root") cfg.root = value;
        else if (key == "features") cfg.features_path = value;
        else if (key == "annotations-old") cfg.annotations_old_path = value;
        else if (key == "annotations-new") cfg.annotations_new_path = value;
        else if (key == "edges") cfg.edges_path = value;
        else if (key == "cutoff") cfg.cutoff = std::stod(value);
        else if (key == "embed-dim") cfg.embed_dim = std::stoi(value);
        else if (key == "trees") cfg.forest.n_trees = std::stoi(value);
        else if (key == "min-samples-split") cfg.forest.min_samples_split = std::stoi(value);
        else if (key == "folds") cfg.forest.folds = std::stoi(value);
        else if (key == "seed") cfg.forest.seed = std::stoull(value);
        else if (key == "methods") {
            cfg.methods.clear();
            for (const auto& m : split(value, ',')) cfg.methods.push_back(trim(m));
        } else if (key == "n-start") cfg.n_start = std::stod(value);
        else if (key == "n-stop") cfg.n_stop = std::stod(value);
        else if (key == "n-step") cfg.n_step = std::stod(value);
        else if (key == "resubstitution") cfg.resubstitution = value == "true" || value == "1";
        else if (key == "out") cfg.out_dir = value;
        else throw InputError(path + ":" + std::to_string(line_no) + ": unknown key " + key);
    }
    return cfg;
}

namespace {

struct MethodOutput {
    std::string name;
    std::vector<SelectionResult> per_n;  // aligned with the grid
    PrecisionCurve curve;
    double aup = 0.0;
};

void write_selection_tsv(const std::string& path, const std::string& method,
                         const std::vector<double>& grid,
                         const std::vector<SelectionResult>& per_n, const LabelMatrix& y,
                         const ClassHierarchy& h, const ProbabilityMatrix& yprime) {
    std::ofstream out(path);
    out.precision(10);
    out << "instance\tclass\tscore\tpath_rank\tn\tmethod\n";
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (const auto& pair : per_n[k].annotations) {
            out << y.instance_ids[pair.first] << '\t' << h.class_id(pair.second) << '\t'
                << yprime.at(pair.first, pair.second) << '\t'
                << per_n[k].first_rank.at(pair) << '\t' << grid[k] << '\t' << method
                << '\n';
        }
    }
}

void write_curve_csv(const std::string& path, const PrecisionCurve& curve) {
    std::ofstream out(path);
    out.precision(10);
    out << "# precision@N over the n grid; AUP@NC uses the trapezoidal rule on the n axis\n";
    out << "n,N,tp,fp,precision\n";
    for (const auto& p : curve.points)
        out << p.n << ',' << p.N << ',' << p.tp << ',' << p.fp << ',' << p.precision << '\n';
}

void write_level_tsv(const std::string& path, const std::vector<LevelRow>& rows) {
    std::ofstream out(path);
    out.precision(10);
    out << "level\tgained\ttp\tselected\tprecision\n";
    for (const auto& r : rows) {
        if (r.level == 0)
            out << "total";
        else
            out << r.level;
        out << '\t' << r.gained << '\t' << r.tp << '\t' << r.selected << '\t' << r.precision
            << '\n';
    }
}

}  // namespace

void run_pipeline(const RunConfig& cfg) {
    cfg.validate();
    fs::create_directories(cfg.out_dir);
    fs::create_directories(cfg.out_dir + "/selections");
    using clock = std::chrono::steady_clock;
    std::map<std::string, double> timings;

    auto dag = load_hierarchy_edges(cfg.hierarchy_path);
    std::string root = cfg.root.empty() ? infer_root(dag) : cfg.root;
    ClassHierarchy h = dag_to_tree(dag, root);

    // Feature assembly: user CSV, or structural + embedding from the GCN.
    FeatureMatrix x;
    if (!cfg.features_path.empty()) {
        x = load_features_csv(cfg.features_path);
    } else {
        auto t0 = clock::now();
        CoexpressionGraph g = build_graph(cfg.edges_path, cfg.cutoff);
        x = structural_features(g);
        timings["structural_features_s"] =
            std::chrono::duration<double>(clock::now() - t0).count();

        int dim = cfg.embed_dim > 0 ? cfg.embed_dim : static_cast<int>(h.size());
        auto comp = connected_components(g);
        std::vector<int> comp_size(*std::max_element(comp.begin(), comp.end()) + 1, 0);
        for (int c : comp) ++comp_size[c];
        int cap = *std::min_element(comp_size.begin(), comp_size.end()) - 1;
        if (dim > cap) {
            std::cerr << "[pipeline] warning: embedding dim capped at " << cap
                      << " (smallest component)\n";
            dim = cap;
        }
        if (dim > 0) x = join_features(x, spectral_embedding(g, dim));
    }

    LabelMatrix y_old = load_annotations(cfg.annotations_old_path, h, x.instance_ids);
    LabelMatrix y_new = load_annotations(cfg.annotations_new_path, h, x.instance_ids);
    TransitionSet truth = diff_versions(y_old, y_new);
    const long sum_y = y_old.count_ones();
    const auto grid = cfg.n_grid();

    // Y' for REASSIGN / No-aggr; full-data forest for Noise-detect OOB.
    auto t0 = clock::now();
    ProbabilityMatrix yprime;
    if (cfg.resubstitution) {
        FittedForest full = fit(x, y_old, cfg.forest);
        yprime = predict(full, x, h);
    } else {
        yprime = predict_out_of_fold(x, y_old, h, cfg.forest);
    }
    timings["probability_matrix_s"] = std::chrono::duration<double>(clock::now() - t0).count();

    bool wants_noise = std::count(cfg.methods.begin(), cfg.methods.end(), "noise-detect") > 0;
    FittedForest full_forest;
    OobCounts oob;
    if (wants_noise || !cfg.save_model_path.empty()) {
        t0 = clock::now();
        if (!cfg.load_model_path.empty())
            full_forest = load_forest(cfg.load_model_path);
        else
            full_forest = fit(x, y_old, cfg.forest);
        if (!cfg.save_model_path.empty()) save_forest(full_forest, cfg.save_model_path);
        oob = oob_vote_counts(full_forest, x, class_thresholds(LevelThresholdRule{}, h));
        timings["noise_forest_s"] = std::chrono::duration<double>(clock::now() - t0).count();
    }

    // REASSIGN methods first; the first one's achieved N per n becomes the
    // matched budget for the baselines.
    std::vector<MethodOutput> outputs;
    std::vector<long> matched_n(grid.size(), 0);
    bool have_reference = false;
    for (const auto& method : cfg.methods) {
        if (method.rfind("reassign-", 0) != 0) continue;
        Aggregator agg = aggregator_from_name(method.substr(9));
        MethodOutput out;
        out.name = method;
        out.per_n = reassign_select_grid(y_old, yprime, h, agg, grid);
        if (!have_reference) {
            for (std::size_t k = 0; k < grid.size(); ++k)
                matched_n[k] = out.per_n[k].n_annotations;
            have_reference = true;
        }
        outputs.push_back(std::move(out));
    }
    if (!have_reference) {
        for (std::size_t k = 0; k < grid.size(); ++k)
            matched_n[k] = compute_np(y_old, grid[k]);
    }

    for (const auto& method : cfg.methods) {
        if (method.rfind("reassign-", 0) == 0) continue;
        MethodOutput out;
        out.name = method;
        for (std::size_t k = 0; k < grid.size(); ++k) {
            if (method == "no-aggr") {
                out.per_n.push_back(select_no_aggr(y_old, yprime, h, matched_n[k]));
            } else if (method == "random") {
                out.per_n.push_back(select_random(y_old, h, matched_n[k],
                                                  mix_seed(cfg.forest.seed, 0xa11d + k)));
            } else if (method == "noise-detect") {
                out.per_n.push_back(select_noise_detect(y_old, oob, yprime, h, matched_n[k]));
            } else {
                throw InputError("unknown method: " + method);
            }
        }
        outputs.push_back(std::move(out));
    }

    // Evaluation reports.
    json achieved_n = json::object();
    for (auto& out : outputs) {
        for (std::size_t k = 0; k < grid.size(); ++k) {
            auto [tp, fp, prec] = precision_at_n(out.per_n[k], truth);
            out.curve.points.push_back({grid[k], out.per_n[k].n_annotations, tp, fp, prec});
        }
        out.aup = grid.size() >= 2 ? aupnc(out.curve) : 0.0;
        write_curve_csv(cfg.out_dir + "/curve_" + out.name + ".csv", out.curve);
        write_level_tsv(cfg.out_dir + "/levels_" + out.name + ".tsv",
                        per_level_report(out.per_n.back(), truth, h));
        write_selection_tsv(cfg.out_dir + "/selections/" + out.name + ".tsv", out.name, grid,
                            out.per_n, y_old, h, yprime);
        json per_n = json::array();
        for (std::size_t k = 0; k < grid.size(); ++k)
            per_n.push_back({{"n", grid[k]},
                             {"N_p", out.per_n[k].n_paths_requested},
                             {"N", out.per_n[k].n_annotations},
                             {"shortfall", out.per_n[k].shortfall}});
        achieved_n[out.name] = per_n;
    }

    {
        std::ofstream out(cfg.out_dir + "/aupnc_summary.csv");
        out.precision(10);
        out << "# AUP@NC, trapezoidal rule over the n axis; both annotation versions "
               "ancestor-closed before diffing\n";
        out << "dataset";
        for (const auto& o : outputs) out << ',' << o.name;
        out << '\n' << root;
        for (const auto& o : outputs) out << ',' << o.aup;
        out << '\n';
    }

    json manifest;
    manifest["root"] = root;
    manifest["seed"] = cfg.forest.seed;
    manifest["config"] = {{"trees", cfg.forest.n_trees},
                          {"min_samples_split", cfg.forest.min_samples_split},
                          {"folds", cfg.forest.folds},
                          {"cutoff", cfg.cutoff},
                          {"n_start", cfg.n_start},
                          {"n_stop", cfg.n_stop},
                          {"n_step", cfg.n_step},
                          {"resubstitution", cfg.resubstitution},
                          {"methods", cfg.methods}};
    manifest["checksums"] = {{"hierarchy", file_checksum(cfg.hierarchy_path)},
                             {"annotations_old", file_checksum(cfg.annotations_old_path)},
                             {"annotations_new", file_checksum(cfg.annotations_new_path)}};
    if (!cfg.features_path.empty())
        manifest["checksums"]["features"] = file_checksum(cfg.features_path);
    if (!cfg.edges_path.empty())
        manifest["checksums"]["edges"] = file_checksum(cfg.edges_path);
    manifest["sum_y"] = sum_y;
    manifest["gained"] = truth.gained.size();
    manifest["lost"] = truth.lost.size();
    manifest["achieved_n"] = achieved_n;
    manifest["timings"] = timings;
    std::ofstream(cfg.out_dir + "/manifest.json") << manifest.dump(2) << '\n';

    std::cout << "run complete: " << cfg.out_dir << " (root " << root << ", " << grid.size()
              << " grid points, " << outputs.size() << " methods)\n";
}

}  // namespace hma
