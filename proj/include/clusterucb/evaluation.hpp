#pragma once

#include <optional>
#include <vector>

#include "clusterucb/bandit.hpp"
#include "clusterucb/selection.hpp"

namespace cucb {

// The four populations plotted per cluster: members, draws, ground-truth
// top samples, selected samples.
struct ClusterCounts {
    std::size_t total = 0;
    std::size_t drawn = 0;
    std::size_t true_top = 0;
    std::size_t selected = 0;
};

struct EvalReport {
    double r_sample = 0.0;
    double r_influence = 0.0;
    bool negative_denominator = false;
    std::vector<ClusterCounts> per_cluster;
};

// |D ∩ D_gt| / |D_gt|
double recall_sample(const std::vector<std::size_t>& selected,
                     const std::vector<std::size_t>& ground_truth);

// sum of influences over D divided by the sum over D_gt. Sets the warning
// flag (when given) if the denominator is negative; a denominator of exactly
// zero throws.
double recall_influence(const std::vector<std::size_t>& selected,
                        const std::vector<std::size_t>& ground_truth,
                        const InfluenceVector& influences,
                        bool* negative_denominator = nullptr);

std::vector<ClusterCounts> per_cluster_report(const DrawLog& log,
                                              const Clustering& clustering,
                                              const SelectionResult& selected,
                                              const SelectionResult& ground_truth);

struct DriftResult {
    double r_sample = 0.0;
    double r_influence = 0.0;
};

// Reuses a clustering built at checkpoint 0 while influences come from the
// gradients of a later checkpoint, then reports recall against that
// checkpoint's own ground truth. Inputs may be raw; rows are normalized
// here. When reference_ids is given the checkpoint ids must match it.
DriftResult drift_eval(const Clustering& clustering_t0, const GradientMatrix& train_tk,
                       const ValidationSet& val_tk, const BanditConfig& config,
                       const std::vector<std::string>* reference_ids = nullptr,
                       unsigned threads = 0);

}  // namespace cucb
