#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "clusterucb/bandit.hpp"
#include "clusterucb/clustering.hpp"
#include "clusterucb/errors.hpp"
#include "clusterucb/evaluation.hpp"
#include "clusterucb/io.hpp"
#include "clusterucb/kernels.hpp"
#include "clusterucb/parallel.hpp"
#include "clusterucb/projection.hpp"
#include "clusterucb/selection.hpp"
#include "clusterucb/synthgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cucb;

namespace {

// Shared bandit/selection flags. Defaults follow the reference experiment
// grid: k = 150 clusters, 5% cold start, 20% budget, 5% selection.
struct RunFlags {
    double budget_ratio = 0.2;
    std::size_t budget_abs = 0;  // overrides the ratio when nonzero
    double cold_start = 0.05;
    double select_ratio = 0.05;
    double beta = 1.0;
    std::string policy = "ucb-beta";
    std::uint64_t seed = 0;
    unsigned threads = 0;

    BanditConfig config(std::size_t pool_size) const {
        BanditConfig cfg;
        cfg.budget = budget_abs > 0
                         ? budget_abs
                         : static_cast<std::size_t>(
                               budget_ratio * static_cast<double>(pool_size));
        cfg.cold_start_ratio = cold_start;
        cfg.selection_ratio = select_ratio;
        cfg.beta = beta;
        cfg.policy = policy_from_string(policy);
        cfg.seed = seed;
        return cfg;
    }

    std::size_t target_count(std::size_t pool_size) const {
        return static_cast<std::size_t>(
            std::ceil(select_ratio * static_cast<double>(pool_size)));
    }
};

void add_run_flags(CLI::App* cmd, RunFlags& flags) {
    cmd->add_option("--budget", flags.budget_ratio,
                    "Computing budget as a fraction of the pool (values > 1 are percent)");
    cmd->add_option("--budget-count", flags.budget_abs,
                    "Computing budget as an absolute evaluation count");
    cmd->add_option("--cold-start", flags.cold_start,
                    "Cold start ratio p_cs in [0, 1] (values > 1 are percent)");
    cmd->add_option("--select-ratio", flags.select_ratio,
                    "Final selection ratio p in (0, 1] (values > 1 are percent)");
    cmd->add_option("--beta", flags.beta, "UCB-Beta exploration weight");
    cmd->add_option("--policy", flags.policy,
                    "ucb-beta | ucb-th | ucb-tn | ucb1 | random-draw");
    cmd->add_option("--seed", flags.seed, "Bandit seed");
    cmd->add_option("--threads", flags.threads, "Worker threads (0 = hardware)");
}

double fraction(double v) { return v > 1.0 ? v / 100.0 : v; }

void normalize_fractions(RunFlags& flags) {
    flags.budget_ratio = fraction(flags.budget_ratio);
    flags.cold_start = fraction(flags.cold_start);
    flags.select_ratio = fraction(flags.select_ratio);
}

std::vector<double> parse_values(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) {
        throw InvalidConfigError("no values given");
    }
    return out;
}

struct Stats {
    double mean = 0.0;
    double stddev = 0.0;
};

Stats stats_of(const std::vector<double>& xs) {
    Stats s;
    for (const double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0.0;
    for (const double x : xs) var += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

void write_csv(const fs::path& path, const std::string& header,
               const std::vector<std::string>& rows) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << header << '\n';
    for (const auto& row : rows) out << row << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::string format_row(std::initializer_list<std::string> cells) {
    std::string row;
    for (const auto& c : cells) {
        if (!row.empty()) row += ',';
        row += c;
    }
    return row;
}

std::string num(double v) {
    std::ostringstream ss;
    ss << std::setprecision(10) << v;
    return ss.str();
}

struct RecallPair {
    double r_sample = 0.0;
    double r_influence = 0.0;
};

// One bandit run against precomputed influences, scored against the given
// ground truth.
RecallPair run_once(const Clustering& clustering, const InfluenceVector& influences,
                    const SelectionResult& gt, const std::vector<std::string>& ids,
                    const BanditConfig& cfg) {
    const PrecomputedInfluence oracle(influences);
    const DrawLog log = run_bandit(clustering, oracle, cfg);
    const std::size_t target = static_cast<std::size_t>(
        std::ceil(cfg.selection_ratio * static_cast<double>(ids.size())));
    const SelectionResult sel = final_select(log, target, ids);
    return {recall_sample(sel.indices, gt.indices),
            recall_influence(sel.indices, gt.indices, influences)};
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    fs::path out_dir;
    SynthConfig cfg;
};

void run_synth(const SynthArgs& args) {
    const SynthPool pool = generate(args.cfg);
    fs::create_directories(args.out_dir);
    io::write_grdm(args.out_dir / "train.grdm", pool.train);
    io::write_grdm(args.out_dir / "val.grdm", pool.val.grads, &pool.val.subtask_labels);

    json meta{{"n_samples", args.cfg.n_samples},
              {"dim", args.cfg.dim},
              {"n_latent_clusters", args.cfg.n_latent_clusters},
              {"concentration", args.cfg.concentration},
              {"n_val", args.cfg.n_val},
              {"n_subtasks", args.cfg.n_subtasks},
              {"useful_cluster_fraction", args.cfg.useful_cluster_fraction},
              {"seed", args.cfg.seed},
              {"latent_labels", pool.latent_labels}};
    std::ofstream out(args.out_dir / "synth_meta.json");
    out << meta.dump(2) << '\n';
    std::cout << "wrote " << (args.out_dir / "train.grdm").string() << " ("
              << pool.train.rows << "x" << pool.train.cols << ")\n";
}

// ---------------------------------------------------------------- cluster

struct ClusterArgs {
    fs::path train;
    fs::path out_dir;
    std::size_t k = 150;
    std::uint64_t seed = 0;
    KMeansOptions opts;
};

void run_cluster(const ClusterArgs& args) {
    GradientMatrix train = io::read_grdm(args.train);
    normalize_rows_in_place(train);
    const Clustering clustering = spherical_kmeans(train, args.k, args.seed, args.opts);

    fs::create_directories(args.out_dir);
    io::write_clustering(args.out_dir / "clustering.json", clustering);
    std::cout << "k = " << clustering.k << ", " << clustering.iterations
              << " iterations, objective "
              << num(clustering.objective_history.back()) << '\n';
}

// ---------------------------------------------------------------- select

struct SelectArgs {
    fs::path train;
    fs::path val;
    fs::path clustering;
    fs::path out_dir;
    RunFlags flags;
    bool oracle = false;
};

void run_select(const SelectArgs& args) {
    GradientMatrix train = io::read_grdm(args.train);
    ValidationSet val = io::read_validation(args.val);
    const Clustering clustering = io::read_clustering(args.clustering);
    clustering.validate(train.rows);
    normalize_rows_in_place(train);
    normalize_rows_in_place(val.grads);
    if (train.cols != val.grads.cols) {
        throw DimensionMismatchError("train and validation dimensions differ");
    }

    const BanditConfig cfg = args.flags.config(train.rows);
    const InfluenceOracle oracle(train, val);
    const DrawLog log = run_bandit(clustering, oracle, cfg);
    const SelectionResult sel =
        final_select(log, args.flags.target_count(train.rows), train.ids);

    EvalReport report;
    io::ReportMetadata meta;
    meta.config = cfg;
    meta.pool_size = train.rows;
    meta.k = clustering.k;

    SelectionResult gt;
    if (args.oracle) {
        const InfluenceVector influences =
            compute_influences(train, val, args.flags.threads);
        gt = oracle_top(influences, cfg.selection_ratio, train.ids);
        report.r_sample = recall_sample(sel.indices, gt.indices);
        report.r_influence = recall_influence(sel.indices, gt.indices, influences,
                                              &report.negative_denominator);
        meta.has_recall = true;
    }
    report.per_cluster = per_cluster_report(log, clustering, sel, gt);

    fs::create_directories(args.out_dir);
    io::write_selection(args.out_dir / "selection.json", sel);
    io::write_drawlog(args.out_dir / "drawlog.jsonl", log, train.ids);
    io::write_drawlog_summary(args.out_dir / "drawlog_summary.json", log, cfg);
    io::write_report(args.out_dir / "report.json", report, meta);

    std::cout << "drew " << log.rounds.size() << " samples, selected "
              << sel.ids.size();
    if (args.oracle) {
        std::cout << ", R_s " << num(report.r_sample) << ", R_inf "
                  << num(report.r_influence);
    }
    std::cout << '\n';
}

// ---------------------------------------------------------------- compare

struct CompareArgs {
    fs::path train;
    fs::path val;
    fs::path clustering;
    fs::path out;
    RunFlags flags;
    std::vector<std::string> policies{"random-draw", "ucb1", "ucb-tn", "ucb-th",
                                      "ucb-beta"};
    std::size_t seeds = 20;
};

void run_compare(const CompareArgs& args) {
    GradientMatrix train = io::read_grdm(args.train);
    ValidationSet val = io::read_validation(args.val);
    const Clustering clustering = io::read_clustering(args.clustering);
    clustering.validate(train.rows);
    normalize_rows_in_place(train);
    normalize_rows_in_place(val.grads);

    std::vector<Policy> policies;
    for (const auto& name : args.policies) policies.push_back(policy_from_string(name));
    if (args.seeds == 0) {
        throw InvalidConfigError("at least one seed is required");
    }

    const InfluenceVector influences = compute_influences(train, val, args.flags.threads);
    const BanditConfig base = args.flags.config(train.rows);
    const SelectionResult gt = oracle_top(influences, base.selection_ratio, train.ids);

    const std::size_t n_runs = policies.size() * args.seeds;
    std::vector<RecallPair> results(n_runs);
    parallel_for(n_runs, args.flags.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            BanditConfig cfg = base;
            cfg.policy = policies[i / args.seeds];
            cfg.seed = base.seed + (i % args.seeds);
            results[i] = run_once(clustering, influences, gt, train.ids, cfg);
        }
    });

    std::vector<std::string> rows;
    for (std::size_t p = 0; p < policies.size(); ++p) {
        std::vector<double> rs, ri;
        for (std::size_t s = 0; s < args.seeds; ++s) {
            rs.push_back(results[p * args.seeds + s].r_sample);
            ri.push_back(results[p * args.seeds + s].r_influence);
        }
        const Stats ss = stats_of(rs);
        const Stats is = stats_of(ri);
        rows.push_back(format_row({to_string(policies[p]), std::to_string(args.seeds),
                                   num(ss.mean), num(ss.stddev), num(is.mean),
                                   num(is.stddev)}));
    }
    write_csv(args.out,
              "policy,seeds,r_sample_mean,r_sample_std,r_influence_mean,r_influence_std",
              rows);
    std::cout << "wrote " << args.out.string() << '\n';
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    std::string axis;
    std::string values;
    fs::path train;
    fs::path val;
    fs::path clustering;  // optional; computed when absent
    fs::path out;
    RunFlags flags;
    std::size_t k = 150;
    std::uint64_t cluster_seed = 0;
    std::size_t seeds = 10;
};

void run_sweep(const SweepArgs& args) {
    if (args.axis != "cold_start" && args.axis != "k" && args.axis != "budget") {
        throw InvalidConfigError("sweep axis must be cold_start, k or budget");
    }
    if (args.seeds == 0) {
        throw InvalidConfigError("at least one seed is required");
    }
    std::vector<double> values = parse_values(args.values);
    if (args.axis != "k") {
        for (double& v : values) v = fraction(v);
    }

    GradientMatrix train = io::read_grdm(args.train);
    ValidationSet val = io::read_validation(args.val);
    normalize_rows_in_place(train);
    normalize_rows_in_place(val.grads);

    const InfluenceVector influences = compute_influences(train, val, args.flags.threads);
    const BanditConfig base = args.flags.config(train.rows);
    const SelectionResult gt = oracle_top(influences, base.selection_ratio, train.ids);

    // One clustering per k value; otherwise one shared clustering.
    KMeansOptions km;
    km.threads = args.flags.threads;
    std::vector<Clustering> clusterings;
    if (args.axis == "k") {
        for (const double v : values) {
            clusterings.push_back(
                spherical_kmeans(train, static_cast<std::size_t>(v), args.cluster_seed, km));
        }
    } else if (!args.clustering.empty()) {
        clusterings.push_back(io::read_clustering(args.clustering));
        clusterings.front().validate(train.rows);
    } else {
        clusterings.push_back(spherical_kmeans(train, args.k, args.cluster_seed, km));
    }

    const std::size_t n_runs = values.size() * args.seeds;
    std::vector<RecallPair> results(n_runs);
    parallel_for(n_runs, args.flags.threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const std::size_t vi = i / args.seeds;
            BanditConfig cfg = base;
            cfg.seed = base.seed + (i % args.seeds);
            const Clustering* clustering = &clusterings.front();
            if (args.axis == "cold_start") {
                cfg.cold_start_ratio = values[vi];
            } else if (args.axis == "budget") {
                cfg.budget = static_cast<std::size_t>(
                    values[vi] * static_cast<double>(train.rows));
            } else {
                clustering = &clusterings[vi];
            }
            results[i] = run_once(*clustering, influences, gt, train.ids, cfg);
        }
    });

    std::vector<std::string> rows;
    for (std::size_t vi = 0; vi < values.size(); ++vi) {
        std::vector<double> rs, ri;
        for (std::size_t s = 0; s < args.seeds; ++s) {
            rs.push_back(results[vi * args.seeds + s].r_sample);
            ri.push_back(results[vi * args.seeds + s].r_influence);
        }
        const Stats ss = stats_of(rs);
        const Stats is = stats_of(ri);
        rows.push_back(format_row({args.axis, num(values[vi]),
                                   std::to_string(args.seeds), num(ss.mean),
                                   num(ss.stddev), num(is.mean), num(is.stddev)}));
    }
    write_csv(args.out,
              "axis,value,seeds,r_sample_mean,r_sample_std,r_influence_mean,"
              "r_influence_std",
              rows);
    std::cout << "wrote " << args.out.string() << '\n';
}

// ---------------------------------------------------------------- drift

struct DriftArgs {
    fs::path clustering;
    std::vector<fs::path> checkpoints;
    std::vector<fs::path> vals;
    fs::path out;
    RunFlags flags;
};

void run_drift(const DriftArgs& args) {
    if (args.checkpoints.empty()) {
        throw InvalidConfigError("at least one checkpoint gradient file is required");
    }
    if (args.vals.size() != 1 && args.vals.size() != args.checkpoints.size()) {
        throw InvalidConfigError("give either one validation file or one per checkpoint");
    }
    const Clustering clustering = io::read_clustering(args.clustering);

    std::vector<GradientMatrix> trains;
    std::vector<ValidationSet> vals;
    for (std::size_t i = 0; i < args.checkpoints.size(); ++i) {
        trains.push_back(io::read_grdm(args.checkpoints[i]));
        vals.push_back(io::read_validation(
            args.vals.size() == 1 ? args.vals.front() : args.vals[i]));
    }
    const std::vector<std::string> reference_ids = trains.front().ids;

    std::vector<std::string> rows;
    for (std::size_t i = 0; i < trains.size(); ++i) {
        const BanditConfig cfg = args.flags.config(trains[i].rows);
        const DriftResult r = drift_eval(clustering, trains[i], vals[i], cfg,
                                         &reference_ids, args.flags.threads);
        rows.push_back(format_row({std::to_string(i),
                                   args.checkpoints[i].filename().string(),
                                   num(r.r_sample), num(r.r_influence)}));
    }
    write_csv(args.out, "checkpoint,file,r_sample,r_influence", rows);
    std::cout << "wrote " << args.out.string() << '\n';
}

// ---------------------------------------------------------------- project

struct ProjectArgs {
    fs::path input;
    fs::path out;
    std::size_t target_dim = 8192;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

void run_project(const ProjectArgs& args) {
    const GradientMatrix m = io::read_grdm(args.input);
    const std::vector<std::string> labels = io::read_subtask_labels(args.input);
    const GradientMatrix projected =
        random_project(m, args.target_dim, args.seed, args.threads);
    io::write_grdm(args.out, projected, labels.empty() ? nullptr : &labels);
    std::cout << "projected " << m.cols << " -> " << projected.cols << " dims, "
              << projected.rows << " rows\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Budget-constrained gradient-influence data selection: cluster the "
                 "gradient pool, allocate influence evaluations across clusters with "
                 "a UCB bandit, select the top-influence subset."};
    app.set_config("--config");
    app.require_subcommand(1);

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic gradient pool");
    synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
    synth_cmd->add_option("--n", synth.cfg.n_samples, "Training samples");
    synth_cmd->add_option("--dim", synth.cfg.dim, "Gradient dimension");
    synth_cmd->add_option("--latent", synth.cfg.n_latent_clusters, "Latent clusters");
    synth_cmd->add_option("--kappa", synth.cfg.concentration,
                          "Within-cluster concentration (0 = pure noise)");
    synth_cmd->add_option("--n-val", synth.cfg.n_val, "Validation samples");
    synth_cmd->add_option("--subtasks", synth.cfg.n_subtasks, "Validation subtasks");
    synth_cmd->add_option("--useful-fraction", synth.cfg.useful_cluster_fraction,
                          "Fraction of latent clusters aligned with validation");
    synth_cmd->add_option("--seed", synth.cfg.seed, "Generator seed");

    ClusterArgs cluster;
    auto* cluster_cmd =
        app.add_subcommand("cluster", "Cluster training gradients by cosine similarity");
    cluster_cmd->add_option("--train", cluster.train, "Training GRDM file")->required();
    cluster_cmd->add_option("--out-dir", cluster.out_dir, "Output directory")->required();
    cluster_cmd->add_option("--k", cluster.k, "Number of clusters");
    cluster_cmd->add_option("--seed", cluster.seed, "Clustering seed");
    cluster_cmd->add_option("--max-iter", cluster.opts.max_iter, "Iteration cap");
    cluster_cmd->add_option("--tol", cluster.opts.tol,
                            "Relative objective improvement stop (0 = exact)");
    cluster_cmd->add_option("--threads", cluster.opts.threads, "Worker threads");

    SelectArgs select;
    auto* select_cmd =
        app.add_subcommand("select", "Run the full budgeted selection pipeline");
    select_cmd->add_option("--train", select.train, "Training GRDM file")->required();
    select_cmd->add_option("--val", select.val, "Validation GRDM file")->required();
    select_cmd->add_option("--clustering", select.clustering, "Clustering JSON")
        ->required();
    select_cmd->add_option("--out-dir", select.out_dir, "Output directory")->required();
    select_cmd->add_flag("--oracle", select.oracle,
                         "Also compute brute-force ground truth and recall metrics");
    add_run_flags(select_cmd, select.flags);

    CompareArgs compare;
    auto* compare_cmd =
        app.add_subcommand("compare", "Compare scoring policies over multiple seeds");
    compare_cmd->add_option("--train", compare.train, "Training GRDM file")->required();
    compare_cmd->add_option("--val", compare.val, "Validation GRDM file")->required();
    compare_cmd->add_option("--clustering", compare.clustering, "Clustering JSON")
        ->required();
    compare_cmd->add_option("--out", compare.out, "Output CSV path")->required();
    compare_cmd->add_option("--policies", compare.policies, "Policies to compare");
    compare_cmd->add_option("--seeds", compare.seeds, "Seeds per policy");
    add_run_flags(compare_cmd, compare.flags);

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Grid-evaluate one hyperparameter axis");
    sweep_cmd->add_option("--axis", sweep.axis, "cold_start | k | budget")->required();
    sweep_cmd->add_option("--values", sweep.values, "Comma-separated axis values")
        ->required();
    sweep_cmd->add_option("--train", sweep.train, "Training GRDM file")->required();
    sweep_cmd->add_option("--val", sweep.val, "Validation GRDM file")->required();
    sweep_cmd->add_option("--out", sweep.out, "Output CSV path")->required();
    sweep_cmd->add_option("--clustering", sweep.clustering,
                          "Clustering JSON (computed when omitted)");
    sweep_cmd->add_option("--k", sweep.k, "Cluster count when clustering here");
    sweep_cmd->add_option("--cluster-seed", sweep.cluster_seed, "Clustering seed");
    sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds per value");
    add_run_flags(sweep_cmd, sweep.flags);

    DriftArgs drift;
    auto* drift_cmd = app.add_subcommand(
        "drift", "Evaluate a fixed clustering against later-checkpoint gradients");
    drift_cmd->add_option("--clustering", drift.clustering, "Clustering JSON")
        ->required();
    drift_cmd->add_option("--checkpoint", drift.checkpoints,
                          "Checkpoint GRDM files, in training order")
        ->required();
    drift_cmd
        ->add_option("--val", drift.vals, "Validation file(s): one, or one per checkpoint")
        ->required();
    drift_cmd->add_option("--out", drift.out, "Output CSV path")->required();
    add_run_flags(drift_cmd, drift.flags);

    ProjectArgs project;
    auto* project_cmd = app.add_subcommand(
        "project", "Random-project a gradient file to a lower dimension");
    project_cmd->add_option("--input", project.input, "Input GRDM file")->required();
    project_cmd->add_option("--out", project.out, "Output GRDM file")->required();
    project_cmd->add_option("--target-dim", project.target_dim, "Target dimension");
    project_cmd->add_option("--seed", project.seed, "Projection seed");
    project_cmd->add_option("--threads", project.threads, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        normalize_fractions(select.flags);
        normalize_fractions(compare.flags);
        normalize_fractions(sweep.flags);
        normalize_fractions(drift.flags);
        if (*synth_cmd) run_synth(synth);
        if (*cluster_cmd) run_cluster(cluster);
        if (*select_cmd) run_select(select);
        if (*compare_cmd) run_compare(compare);
        if (*sweep_cmd) run_sweep(sweep);
        if (*drift_cmd) run_drift(drift);
        if (*project_cmd) run_project(project);
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
