#include "clusterucb/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "clusterucb/errors.hpp"

namespace cucb {

SelectionResult final_select(const DrawLog& log, std::size_t target_count,
                             const std::vector<std::string>& ids) {
    if (target_count == 0) {
        throw ValidationError("target count must be positive");
    }

    std::vector<std::size_t> order(log.rounds.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (log.rounds[a].reward != log.rounds[b].reward) {
            return log.rounds[a].reward > log.rounds[b].reward;
        }
        return log.rounds[a].round < log.rounds[b].round;
    });

    SelectionResult result;
    result.target_count = target_count;
    result.shortfall = log.rounds.size() < target_count;
    const std::size_t take = std::min(target_count, log.rounds.size());
    result.indices.reserve(take);
    result.ids.reserve(take);
    result.rewards.reserve(take);
    for (std::size_t i = 0; i < take; ++i) {
        const DrawRecord& r = log.rounds[order[i]];
        result.indices.push_back(r.sample);
        if (r.sample >= ids.size()) {
            throw InconsistentInputsError("draw log references a sample outside the id list");
        }
        result.ids.push_back(ids[r.sample]);
        result.rewards.push_back(r.reward);
    }
    return result;
}

SelectionResult oracle_top(const InfluenceVector& influences, double p,
                           const std::vector<std::string>& ids) {
    if (!(p > 0.0 && p <= 1.0)) {
        throw InvalidConfigError("selection ratio must be in (0, 1]");
    }
    if (influences.size() != ids.size()) {
        throw InconsistentInputsError("influence vector and id list differ in length");
    }
    const std::size_t n = influences.size();
    const std::size_t target = std::min<std::size_t>(
        n, static_cast<std::size_t>(std::ceil(p * static_cast<double>(n))));

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::partial_sort(order.begin(), order.begin() + target, order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (influences[a] != influences[b]) {
                              return influences[a] > influences[b];
                          }
                          return a < b;
                      });

    SelectionResult result;
    result.target_count = target;
    result.indices.assign(order.begin(), order.begin() + target);
    result.ids.reserve(target);
    result.rewards.reserve(target);
    for (const std::size_t i : result.indices) {
        result.ids.push_back(ids[i]);
        result.rewards.push_back(influences[i]);
    }
    return result;
}

double objective_value(const DrawLog& log, const SelectionResult& ground_truth) {
    if (ground_truth.rewards.empty()) {
        throw EmptyGroundTruthError("ground-truth selection is empty");
    }
    const double threshold = ground_truth.rewards.back();  // sorted non-increasing
    std::size_t hits = 0;
    for (const DrawRecord& r : log.rounds) {
        if (r.reward >= threshold) ++hits;
    }
    return static_cast<double>(hits);
}

}  // namespace cucb
