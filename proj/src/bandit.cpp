#include "clusterucb/bandit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "clusterucb/errors.hpp"
#include "clusterucb/rng.hpp"

namespace cucb {

namespace {

constexpr std::uint64_t kBanditTag = 0x62616e64;  // "band"
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string canonical(std::string_view name) {
    std::string out;
    out.reserve(name.size());
    for (const char ch : name) {
        if (ch == '_') {
            out.push_back('-');
        } else {
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        }
    }
    return out;
}

}  // namespace

Policy policy_from_string(std::string_view name) {
    const std::string c = canonical(name);
    if (c == "ucb-beta") return Policy::ucb_beta;
    if (c == "ucb-th") return Policy::ucb_th;
    if (c == "ucb-tn") return Policy::ucb_tn;
    if (c == "ucb1") return Policy::ucb1;
    if (c == "random-draw" || c == "random") return Policy::random_draw;
    throw InvalidConfigError("unknown policy: " + std::string(name));
}

std::string to_string(Policy p) {
    switch (p) {
        case Policy::ucb_beta: return "ucb-beta";
        case Policy::ucb_th: return "ucb-th";
        case Policy::ucb_tn: return "ucb-tn";
        case Policy::ucb1: return "ucb1";
        case Policy::random_draw: return "random-draw";
    }
    return "unknown";
}

const std::vector<Policy>& all_policies() {
    static const std::vector<Policy> policies{Policy::random_draw, Policy::ucb1,
                                              Policy::ucb_tn, Policy::ucb_th,
                                              Policy::ucb_beta};
    return policies;
}

void BanditConfig::validate(std::size_t pool_size) const {
    if (budget == 0) {
        throw InvalidConfigError("budget must be positive");
    }
    if (budget > pool_size) {
        throw BudgetExceedsPoolError("budget (" + std::to_string(budget) +
                                     ") exceeds pool size (" + std::to_string(pool_size) + ")");
    }
    if (!(cold_start_ratio >= 0.0 && cold_start_ratio <= 1.0)) {
        throw InvalidConfigError("cold start ratio must be in [0, 1]");
    }
    if (!(selection_ratio > 0.0 && selection_ratio <= 1.0)) {
        throw InvalidConfigError("selection ratio must be in (0, 1]");
    }
    if (!std::isfinite(beta)) {
        throw InvalidConfigError("beta must be finite");
    }
}

void ArmState::record(double reward) {
    history.push_back(reward);
    ++count;
    sum += reward;
    sum_sq += reward * reward;
}

double ArmState::mean() const { return sum / static_cast<double>(count); }

double ArmState::stddev() const {
    const double m = mean();
    const double var = std::max(0.0, sum_sq / static_cast<double>(count) - m * m);
    return std::sqrt(var);
}

std::vector<std::size_t> cold_start_allocation(const std::vector<std::size_t>& sizes,
                                               std::size_t cold_budget) {
    const std::size_t k = sizes.size();
    std::uint64_t total = 0;
    for (const std::size_t s : sizes) total += s;
    if (cold_budget > total) {
        throw BudgetExceedsPoolError("cold start budget exceeds pool size");
    }

    std::vector<std::size_t> counts(k, 0);
    std::vector<std::uint64_t> remainder(k, 0);
    std::size_t allocated = 0;
    for (std::size_t c = 0; c < k; ++c) {
        const std::uint64_t quota = static_cast<std::uint64_t>(sizes[c]) * cold_budget;
        counts[c] = static_cast<std::size_t>(quota / total);
        remainder[c] = quota % total;
        allocated += counts[c];
    }

    // Largest remainder first; ties go to the cluster with the smaller
    // integer allocation, then to the lower index.
    std::vector<std::size_t> order(k);
    for (std::size_t c = 0; c < k; ++c) order[c] = c;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (remainder[a] != remainder[b]) return remainder[a] > remainder[b];
        if (counts[a] != counts[b]) return counts[a] < counts[b];
        return a < b;
    });

    std::size_t leftover = cold_budget - allocated;
    while (leftover > 0) {
        bool progress = false;
        for (const std::size_t c : order) {
            if (leftover == 0) break;
            if (counts[c] < sizes[c]) {
                ++counts[c];
                --leftover;
                progress = true;
            }
        }
        if (!progress) break;  // unreachable: capacity checked above
    }
    return counts;
}

double score_ucb_beta(const ArmState& arm, double beta) {
    if (arm.count == 0) return kInf;
    return arm.mean() + beta * arm.stddev();
}

double score_ucb_th(const ArmState& arm, double t_hat) {
    if (arm.count == 0) return kInf;
    std::size_t above = 0;
    for (const double r : arm.history) {
        if (r >= t_hat) ++above;
    }
    return static_cast<double>(above) / static_cast<double>(arm.count);
}

double score_ucb_tn(const ArmState& arm, double t_hat) {
    if (arm.count == 0) return kInf;
    const double mu = arm.mean();
    const double sigma = arm.stddev();
    if (sigma < 1e-12) return mu >= t_hat ? 1.0 : 0.0;
    const double z = (t_hat - mu) / sigma;
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

double score_ucb1(const ArmState& arm, std::size_t total_rounds) {
    if (arm.count == 0) return kInf;
    return arm.mean() + std::sqrt(2.0 * std::log(static_cast<double>(total_rounds)) /
                                  static_cast<double>(arm.count));
}

double estimate_threshold(const std::vector<double>& pooled_rewards, double p,
                          std::size_t budget, std::size_t pool_size) {
    if (pooled_rewards.empty()) {
        throw EmptyHistoryError("cannot estimate a threshold from an empty history");
    }
    const std::size_t n = pooled_rewards.size();
    const double fraction =
        std::min(1.0, p * static_cast<double>(pool_size) / static_cast<double>(budget));
    std::size_t m = static_cast<std::size_t>(std::ceil(fraction * static_cast<double>(n)));
    m = std::clamp<std::size_t>(m, 1, n);

    std::vector<double> copy = pooled_rewards;
    std::nth_element(copy.begin(), copy.begin() + (m - 1), copy.end(),
                     std::greater<double>());
    return copy[m - 1];
}

DrawLog run_bandit(const Clustering& clusters, const InfluenceSource& oracle,
                   const BanditConfig& config) {
    const std::size_t n = clusters.n_points();
    clusters.validate();
    config.validate(n);
    if (oracle.pool_size() != n) {
        throw InconsistentInputsError("oracle pool size does not match clustering");
    }

    const std::size_t k = clusters.k;
    rng::Stream stream(rng::derive(config.seed, kBanditTag));

    std::vector<ArmState> arms(k);
    for (std::size_t c = 0; c < k; ++c) {
        arms[c].cluster_id = c;
        arms[c].remaining = members(clusters, c);
        stream.shuffle(arms[c].remaining);
    }

    DrawLog log;
    log.per_cluster_draws.assign(k, 0);
    log.rounds.reserve(config.budget);
    std::vector<double> pooled;
    pooled.reserve(config.budget);

    const auto draw = [&](std::size_t c) {
        ArmState& arm = arms[c];
        const std::size_t sample = arm.remaining.back();
        arm.remaining.pop_back();
        const double reward = oracle(sample);
        arm.record(reward);
        pooled.push_back(reward);
        log.rounds.push_back({log.rounds.size(), c, sample, reward});
        ++log.per_cluster_draws[c];
    };

    std::vector<std::size_t> alive;
    alive.reserve(k);
    const auto collect_alive = [&] {
        alive.clear();
        for (std::size_t c = 0; c < k; ++c) {
            if (!arms[c].exhausted()) alive.push_back(c);
        }
    };

    if (config.policy == Policy::random_draw) {
        // Uniform over non-exhausted arms for the whole budget; the cold
        // start would be redundant randomness here.
        while (log.rounds.size() < config.budget) {
            collect_alive();
            if (alive.empty()) break;
            draw(alive[stream.next_index(alive.size())]);
        }
        return log;
    }

    const std::size_t cold_rounds =
        static_cast<std::size_t>(config.cold_start_ratio * static_cast<double>(config.budget));
    const std::vector<std::size_t> cold_alloc =
        cold_start_allocation(clusters.sizes, cold_rounds);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t j = 0; j < cold_alloc[c]; ++j) draw(c);
    }

    std::vector<std::size_t> ties;
    ties.reserve(k);
    while (log.rounds.size() < config.budget) {
        collect_alive();
        if (alive.empty()) break;

        const bool needs_threshold =
            config.policy == Policy::ucb_th || config.policy == Policy::ucb_tn;
        // Re-estimated every round from all rewards seen so far.
        const double t_hat =
            (needs_threshold && !pooled.empty())
                ? estimate_threshold(pooled, config.selection_ratio, config.budget, n)
                : 0.0;
        const std::size_t total_rounds = log.rounds.size();

        double best = -kInf;
        ties.clear();
        for (const std::size_t c : alive) {
            double score = 0.0;
            switch (config.policy) {
                case Policy::ucb_beta: score = score_ucb_beta(arms[c], config.beta); break;
                case Policy::ucb_th: score = score_ucb_th(arms[c], t_hat); break;
                case Policy::ucb_tn: score = score_ucb_tn(arms[c], t_hat); break;
                case Policy::ucb1: score = score_ucb1(arms[c], total_rounds); break;
                case Policy::random_draw: break;  // handled above
            }
            if (score > best) {
                best = score;
                ties.clear();
                ties.push_back(c);
            } else if (score == best) {
                ties.push_back(c);
            }
        }
        draw(ties[stream.next_index(ties.size())]);
    }
    return log;
}

void DrawLog::validate(const Clustering& clusters) const {
    if (per_cluster_draws.size() != clusters.k) {
        throw InconsistentInputsError("per-cluster draw counts do not match k");
    }
    std::unordered_set<std::size_t> seen;
    seen.reserve(rounds.size());
    std::vector<std::size_t> recount(clusters.k, 0);
    std::size_t expected_round = 0;
    for (const DrawRecord& r : rounds) {
        if (r.round != expected_round++) {
            throw ValidationError("draw rounds are not consecutive");
        }
        if (r.cluster >= clusters.k || r.sample >= clusters.n_points()) {
            throw ValidationError("draw record out of range");
        }
        if (clusters.assignments[r.sample] != r.cluster) {
            throw ValidationError("drawn sample does not belong to the recorded cluster");
        }
        if (!seen.insert(r.sample).second) {
            throw ValidationError("sample drawn twice");
        }
        ++recount[r.cluster];
    }
    for (std::size_t c = 0; c < clusters.k; ++c) {
        if (recount[c] != per_cluster_draws[c]) {
            throw ValidationError("per-cluster draw counts do not match the log");
        }
        if (per_cluster_draws[c] > clusters.sizes[c]) {
            throw ValidationError("cluster drawn more times than it has members");
        }
    }
}

}  // namespace cucb
