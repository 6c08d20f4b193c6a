#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "clusterucb/clustering.hpp"
#include "clusterucb/influence.hpp"

namespace cucb {

// Arm scoring policies for inter-cluster budget allocation.
enum class Policy { ucb_beta, ucb_th, ucb_tn, ucb1, random_draw };

Policy policy_from_string(std::string_view name);
std::string to_string(Policy p);
const std::vector<Policy>& all_policies();

struct BanditConfig {
    std::size_t budget = 0;          // number of influence evaluations
    double cold_start_ratio = 0.05;  // p_cs, fraction of budget in [0, 1]
    double selection_ratio = 0.05;   // p, fraction of pool in (0, 1]
    double beta = 1.0;
    Policy policy = Policy::ucb_beta;
    std::uint64_t seed = 0;

    void validate(std::size_t pool_size) const;
};

// One arm per cluster: the not-yet-drawn members (pre-shuffled; drawing pops
// the back) plus the observed reward history and its accumulators.
struct ArmState {
    std::size_t cluster_id = 0;
    std::vector<std::size_t> remaining;
    std::vector<double> history;
    std::size_t count = 0;
    double sum = 0.0;
    double sum_sq = 0.0;

    bool exhausted() const { return remaining.empty(); }
    void record(double reward);
    double mean() const;
    double stddev() const;  // population form (divide by count)
};

struct DrawRecord {
    std::size_t round;
    std::size_t cluster;
    std::size_t sample;  // pool index
    double reward;
};

struct DrawLog {
    std::vector<DrawRecord> rounds;
    std::vector<std::size_t> per_cluster_draws;  // length k

    void validate(const Clustering& clusters) const;
};

// Splits cold_budget across clusters proportionally to their sizes with
// largest-remainder rounding; each count is capped at the cluster size and
// the result sums to cold_budget exactly.
std::vector<std::size_t> cold_start_allocation(const std::vector<std::size_t>& sizes,
                                               std::size_t cold_budget);

// Arm scores. Every policy returns +infinity for an arm with no history so
// undrawn arms are visited before exploitation starts.
double score_ucb_beta(const ArmState& arm, double beta);
double score_ucb_th(const ArmState& arm, double t_hat);
double score_ucb_tn(const ArmState& arm, double t_hat);
double score_ucb1(const ArmState& arm, std::size_t total_rounds);

// The shared threshold for UCB-TH / UCB-TN: the lowest reward in the top
// p * pool_size / budget portion of the pooled history.
double estimate_threshold(const std::vector<double>& pooled_rewards, double p,
                          std::size_t budget, std::size_t pool_size);

// Spends config.budget influence evaluations: a cold-start phase allocated
// proportionally to cluster size, then one scored draw per round from the
// non-exhausted arm with the maximal policy score (ties uniform at random).
// Deterministic given config.seed.
DrawLog run_bandit(const Clustering& clusters, const InfluenceSource& oracle,
                   const BanditConfig& config);

}  // namespace cucb
