#pragma once

#include <string>
#include <vector>

#include "clusterucb/bandit.hpp"
#include "clusterucb/gradient_matrix.hpp"

namespace cucb {

// Final selected subset, ordered by reward non-increasing.
struct SelectionResult {
    std::vector<std::size_t> indices;  // pool indices
    std::vector<std::string> ids;
    std::vector<double> rewards;
    std::size_t target_count = 0;
    // Set when the draw log held fewer samples than target_count; the result
    // then contains every draw instead of failing.
    bool shortfall = false;
};

// The target_count drawn samples with the highest recorded rewards; ties
// break toward the earlier draw round.
SelectionResult final_select(const DrawLog& log, std::size_t target_count,
                             const std::vector<std::string>& ids);

// Exact top ceil(p * N) samples by influence over the full pool (brute
// force); the ground truth for recall evaluation.
SelectionResult oracle_top(const InfluenceVector& influences, double p,
                           const std::vector<std::string>& ids);

// Realized value of a draw log against a ground-truth selection: how many
// drawn rewards reach the lowest ground-truth influence.
double objective_value(const DrawLog& log, const SelectionResult& ground_truth);

}  // namespace cucb
