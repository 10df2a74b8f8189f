#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include <CLI11.hpp>

#include "hma/baselines.hpp"
#include "hma/dataset.hpp"
#include "hma/evaluation.hpp"
#include "hma/gcn.hpp"
#include "hma/pipeline.hpp"
#include "hma/synth.hpp"
#include "hma/util.hpp"

namespace {

int cmd_gcn_features(const std::string& edges, double cutoff, int embed_dim,
                     const std::string& out_path) {
    auto g = hma::build_graph(edges, cutoff);
    std::cout << "graph: " << g.size() << " vertices, " << g.edge_count() << " edges\n";
    auto x = hma::structural_features(g);
    if (embed_dim > 0) x = hma::join_features(x, hma::spectral_embedding(g, embed_dim));
    std::ofstream out(out_path);
    if (!out) throw hma::InputError("cannot write " + out_path);
    out.precision(17);
    out << "# structural metrics: unnormalized betweenness (unordered pairs), "
           "per-component closeness\n";
    out << "id";
    for (const auto& name : x.feature_names) out << ',' << name;
    out << '\n';
    for (std::size_t i = 0; i < x.rows(); ++i) {
        out << x.instance_ids[i];
        for (std::size_t j = 0; j < x.cols(); ++j) out << ',' << x.at(i, j);
        out << '\n';
    }
    std::cout << "features written to " << out_path << '\n';
    return 0;
}

int cmd_evaluate(const std::string& selections_path, const std::string& hierarchy_path,
                 const std::string& root_flag, const std::string& old_path,
                 const std::string& new_path, const std::string& out_path) {
    auto dag = hma::load_hierarchy_edges(hierarchy_path);
    auto h = hma::dag_to_tree(dag, root_flag.empty() ? hma::infer_root(dag) : root_flag);

    // Instance universe: union of both annotation files.
    std::vector<std::string> instances;
    {
        std::set<std::string> ids;
        for (const auto& path : {old_path, new_path}) {
            std::ifstream in(path);
            if (!in) throw hma::InputError("cannot open " + path);
            std::string line;
            while (std::getline(in, line)) {
                auto t = hma::trim(line);
                if (t.empty() || t[0] == '#') continue;
                ids.insert(hma::split(t, '\t')[0]);
            }
        }
        instances.assign(ids.begin(), ids.end());
    }
    auto y_old = hma::load_annotations(old_path, h, instances);
    auto y_new = hma::load_annotations(new_path, h, instances);
    auto truth = hma::diff_versions(y_old, y_new);
    std::map<std::string, int> row_of;
    for (std::size_t i = 0; i < instances.size(); ++i) row_of[instances[i]] = (int)i;

    // Selection TSV: instance class score path_rank n [method].
    std::map<double, hma::SelectionResult> per_n;
    std::ifstream in(selections_path);
    if (!in) throw hma::InputError("cannot open " + selections_path);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        auto t = hma::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (header) {
            header = false;
            continue;
        }
        auto fields = hma::split(t, '\t');
        if (fields.size() < 5)
            throw hma::InputError(selections_path + ": expected >= 5 columns");
        auto it = row_of.find(fields[0]);
        int c = h.index_of(fields[1]);
        if (it == row_of.end() || c < 0)
            throw hma::InputError(selections_path + ": unknown instance or class: " + t);
        double n = std::stod(fields[4]);
        auto& sel = per_n[n];
        hma::Pair pair{it->second, c};
        if (!sel.first_rank.count(pair)) {
            sel.first_rank[pair] = std::stoi(fields[3]);
            sel.annotations.push_back(pair);
        }
    }
    hma::PrecisionCurve curve;
    for (auto& [n, sel] : per_n) {
        sel.n_annotations = (long)sel.annotations.size();
        auto [tp, fp, prec] = hma::precision_at_n(sel, truth);
        curve.points.push_back({n, sel.n_annotations, tp, fp, prec});
    }
    std::ofstream out(out_path);
    if (!out) throw hma::InputError("cannot write " + out_path);
    out.precision(10);
    out << "# precision@N recomputed from " << selections_path
        << "; AUP@NC uses the trapezoidal rule on the n axis\n";
    out << "n,N,tp,fp,precision\n";
    for (const auto& p : curve.points)
        out << p.n << ',' << p.N << ',' << p.tp << ',' << p.fp << ',' << p.precision << '\n';
    if (curve.points.size() >= 2)
        std::cout << "AUP@NC = " << hma::aupnc(curve) << '\n';
    std::cout << "curve written to " << out_path << '\n';
    return 0;
}

int cmd_rank(const std::vector<std::string>& summaries, double alpha,
             const std::string& out_path) {
    // Each summary CSV: header `dataset,<method...>`, one data row per file.
    std::vector<std::string> methods, datasets;
    std::vector<std::vector<double>> scores;
    for (const auto& path : summaries) {
        std::ifstream in(path);
        if (!in) throw hma::InputError("cannot open " + path);
        std::string line;
        std::vector<std::string> header;
        while (std::getline(in, line)) {
            auto t = hma::trim(line);
            if (t.empty() || t[0] == '#') continue;
            auto fields = hma::split(t, ',');
            if (header.empty()) {
                header = fields;
                if (methods.empty())
                    methods.assign(header.begin() + 1, header.end());
                else if (!std::equal(methods.begin(), methods.end(), header.begin() + 1))
                    throw hma::InputError(path + ": method columns differ between runs");
                continue;
            }
            datasets.push_back(fields[0]);
            std::vector<double> row;
            for (std::size_t j = 1; j < fields.size(); ++j)
                row.push_back(std::stod(fields[j]));
            scores.push_back(std::move(row));
        }
    }
    auto table = hma::friedman_nemenyi(scores, methods, datasets, alpha);
    std::string summary = hma::rank_table_summary(table);
    std::cout << summary;
    if (!out_path.empty()) {
        std::ofstream out(out_path);
        out << summary;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"missing-annotation detection for hierarchical multi-label datasets"};
    app.require_subcommand(1);

    // gcn-features
    auto* gcn = app.add_subcommand("gcn-features", "structural + spectral features from a GCN");
    std::string edges_path, out_path = "features.csv";
    double cutoff = 100.0;
    int embed_dim = 0;
    gcn->add_option("--edges", edges_path, "edge list TSV")->required();
    gcn->add_option("--cutoff", cutoff, "mutual-rank cutoff (edges kept when <=)");
    gcn->add_option("--embed-dim", embed_dim, "spectral embedding dimension (0 to skip)");
    gcn->add_option("--out", out_path, "output CSV");

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic fixture dataset");
    hma::SynthSpec spec;
    std::string synth_dir = "synth";
    synth->add_option("--instances", spec.n_instances);
    synth->add_option("--classes", spec.n_classes);
    synth->add_option("--clusters", spec.n_clusters);
    synth->add_option("--features", spec.n_features);
    synth->add_option("--noise", spec.noise);
    synth->add_option("--hide-fraction", spec.hide_fraction);
    synth->add_option("--seed", spec.seed);
    synth->add_option("--out", synth_dir, "output directory");

    // run
    auto* run = app.add_subcommand("run", "full pipeline from config and/or flags");
    hma::RunConfig cfg;
    std::string config_path;
    run->add_option("--config", config_path, "flat key=value config file (flags win)");
    run->add_option("--hierarchy", cfg.hierarchy_path);
    run->add_option("--root", cfg.root);
    run->add_option("--features", cfg.features_path);
    run->add_option("--annotations-old", cfg.annotations_old_path);
    run->add_option("--annotations-new", cfg.annotations_new_path);
    run->add_option("--edges", cfg.edges_path);
    run->add_option("--cutoff", cfg.cutoff);
    run->add_option("--embed-dim", cfg.embed_dim);
    run->add_option("--trees", cfg.forest.n_trees);
    run->add_option("--min-samples-split", cfg.forest.min_samples_split);
    run->add_option("--folds", cfg.forest.folds);
    run->add_option("--seed", cfg.forest.seed);
    run->add_option("--method", cfg.methods,
                    "methods: reassign-{avg,sum,min}, no-aggr, random, noise-detect");
    run->add_option("--n-start", cfg.n_start);
    run->add_option("--n-stop", cfg.n_stop);
    run->add_option("--n-step", cfg.n_step);
    run->add_flag("--resubstitution", cfg.resubstitution,
                  "Y' from the full-data forest instead of out-of-fold");
    run->add_option("--save-model", cfg.save_model_path);
    run->add_option("--load-model", cfg.load_model_path);
    run->add_option("--out", cfg.out_dir);

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "re-score a selection TSV against two versions");
    std::string sel_path, ev_hier, ev_root, ev_old, ev_new, ev_out = "curve.csv";
    ev->add_option("--selections", sel_path)->required();
    ev->add_option("--hierarchy", ev_hier)->required();
    ev->add_option("--root", ev_root);
    ev->add_option("--annotations-old", ev_old)->required();
    ev->add_option("--annotations-new", ev_new)->required();
    ev->add_option("--out", ev_out);

    // rank
    auto* rank = app.add_subcommand("rank", "Friedman-Nemenyi over multiple run summaries");
    std::vector<std::string> summaries;
    double alpha = 0.05;
    std::string rank_out;
    rank->add_option("summaries", summaries, "aupnc_summary.csv files")->required();
    rank->add_option("--alpha", alpha, "0.05 or 0.10");
    rank->add_option("--out", rank_out);

    try {
        app.parse(argc, argv);
        if (gcn->parsed()) return cmd_gcn_features(edges_path, cutoff, embed_dim, out_path);
        if (synth->parsed()) {
            auto data = hma::generate_synthetic(spec);
            hma::write_synthetic(data, synth_dir);
            std::cout << "fixture written to " << synth_dir << " (hidden annotations: "
                      << data.hidden_count << ")\n";
            return 0;
        }
        if (run->parsed()) {
            if (!config_path.empty()) {
                hma::RunConfig base = hma::RunConfig::from_file(config_path);
                // Flags win over the file.
                auto pick = [](const std::string& flag, const std::string& file) {
                    return flag.empty() ? file : flag;
                };
                cfg.hierarchy_path = pick(cfg.hierarchy_path, base.hierarchy_path);
                cfg.root = pick(cfg.root, base.root);
                cfg.features_path = pick(cfg.features_path, base.features_path);
                cfg.annotations_old_path =
                    pick(cfg.annotations_old_path, base.annotations_old_path);
                cfg.annotations_new_path =
                    pick(cfg.annotations_new_path, base.annotations_new_path);
                cfg.edges_path = pick(cfg.edges_path, base.edges_path);
                if (run->count("--cutoff") == 0) cfg.cutoff = base.cutoff;
                if (run->count("--embed-dim") == 0) cfg.embed_dim = base.embed_dim;
                if (run->count("--trees") == 0) cfg.forest.n_trees = base.forest.n_trees;
                if (run->count("--min-samples-split") == 0)
                    cfg.forest.min_samples_split = base.forest.min_samples_split;
                if (run->count("--folds") == 0) cfg.forest.folds = base.forest.folds;
                if (run->count("--seed") == 0) cfg.forest.seed = base.forest.seed;
                if (run->count("--method") == 0) cfg.methods = base.methods;
                if (run->count("--n-start") == 0) cfg.n_start = base.n_start;
                if (run->count("--n-stop") == 0) cfg.n_stop = base.n_stop;
                if (run->count("--n-step") == 0) cfg.n_step = base.n_step;
                if (run->count("--resubstitution") == 0)
                    cfg.resubstitution = base.resubstitution;
                if (run->count("--out") == 0) cfg.out_dir = base.out_dir;
            }
            hma::run_pipeline(cfg);
            return 0;
        }
        if (ev->parsed())
            return cmd_evaluate(sel_path, ev_hier, ev_root, ev_old, ev_new, ev_out);
        if (rank->parsed()) return cmd_rank(summaries, alpha, rank_out);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // flag misuse is a validation error
    } catch (const hma::InputError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
