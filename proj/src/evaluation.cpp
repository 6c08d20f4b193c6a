#include "clusterucb/evaluation.hpp"

#include <cmath>

#include "clusterucb/errors.hpp"

namespace cucb {

namespace {

std::vector<std::uint8_t> membership(const std::vector<std::size_t>& indices,
                                     std::size_t n, const char* what) {
    std::vector<std::uint8_t> mask(n, 0);
    for (const std::size_t i : indices) {
        if (i >= n) {
            throw InconsistentInputsError(std::string(what) + " index out of range");
        }
        mask[i] = 1;
    }
    return mask;
}

}  // namespace

double recall_sample(const std::vector<std::size_t>& selected,
                     const std::vector<std::size_t>& ground_truth) {
    if (ground_truth.empty()) {
        throw EmptyGroundTruthError("ground-truth set is empty");
    }
    std::size_t n = 0;
    for (const std::size_t i : ground_truth) n = std::max(n, i + 1);
    for (const std::size_t i : selected) n = std::max(n, i + 1);
    const auto gt_mask = membership(ground_truth, n, "ground truth");
    std::size_t hit = 0;
    for (const std::size_t i : selected) {
        if (gt_mask[i]) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(ground_truth.size());
}

double recall_influence(const std::vector<std::size_t>& selected,
                        const std::vector<std::size_t>& ground_truth,
                        const InfluenceVector& influences,
                        bool* negative_denominator) {
    if (ground_truth.empty()) {
        throw EmptyGroundTruthError("ground-truth set is empty");
    }
    const std::size_t n = influences.size();
    const auto sel_mask = membership(selected, n, "selected");
    const auto gt_mask = membership(ground_truth, n, "ground truth");

    // Summed in pool index order so equal sets give bit-equal sums.
    double numer = 0.0;
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (sel_mask[i]) numer += influences[i];
        if (gt_mask[i]) denom += influences[i];
    }
    if (denom == 0.0) {
        throw ZeroDenominatorError("ground-truth influence sum is zero");
    }
    if (negative_denominator != nullptr) {
        *negative_denominator = denom < 0.0;
    }
    return numer / denom;
}

std::vector<ClusterCounts> per_cluster_report(const DrawLog& log,
                                              const Clustering& clustering,
                                              const SelectionResult& selected,
                                              const SelectionResult& ground_truth) {
    const std::size_t n = clustering.n_points();
    if (log.per_cluster_draws.size() != clustering.k) {
        throw InconsistentInputsError("draw log does not match the clustering");
    }

    std::vector<ClusterCounts> counts(clustering.k);
    for (std::size_t c = 0; c < clustering.k; ++c) {
        counts[c].total = clustering.sizes[c];
        counts[c].drawn = log.per_cluster_draws[c];
    }
    for (const std::size_t i : ground_truth.indices) {
        if (i >= n) throw InconsistentInputsError("ground-truth index out of range");
        ++counts[clustering.assignments[i]].true_top;
    }
    for (const std::size_t i : selected.indices) {
        if (i >= n) throw InconsistentInputsError("selected index out of range");
        ++counts[clustering.assignments[i]].selected;
    }
    return counts;
}

DriftResult drift_eval(const Clustering& clustering_t0, const GradientMatrix& train_tk,
                       const ValidationSet& val_tk, const BanditConfig& config,
                       const std::vector<std::string>* reference_ids, unsigned threads) {
    if (clustering_t0.n_points() != train_tk.rows) {
        throw IdMismatchError("checkpoint pool size does not match the clustering");
    }
    if (reference_ids != nullptr && *reference_ids != train_tk.ids) {
        throw IdMismatchError("checkpoint sample ids do not match the clustering's pool");
    }

    const GradientMatrix train =
        train_tk.normalized ? train_tk : normalize_rows(train_tk);
    ValidationSet val = val_tk;
    if (!val.grads.normalized) normalize_rows_in_place(val.grads);

    const InfluenceVector influences = compute_influences(train, val, threads);
    const PrecomputedInfluence oracle(influences);
    const DrawLog log = run_bandit(clustering_t0, oracle, config);

    const std::size_t target = static_cast<std::size_t>(
        std::ceil(config.selection_ratio * static_cast<double>(train.rows)));
    const SelectionResult sel = final_select(log, target, train.ids);
    const SelectionResult gt = oracle_top(influences, config.selection_ratio, train.ids);

    DriftResult out;
    out.r_sample = recall_sample(sel.indices, gt.indices);
    out.r_influence = recall_influence(sel.indices, gt.indices, influences);
    return out;
}

}  // namespace cucb
