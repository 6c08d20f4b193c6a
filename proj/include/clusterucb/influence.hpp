#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <mutex>
#include <span>
#include <vector>

#include "clusterucb/gradient_matrix.hpp"

namespace cucb {

// Influence of one training sample on one validation sample: the inner
// product of their unit-normalized gradients (their cosine similarity).
double influence_pair(std::span<const float> train_row, std::span<const float> val_row);

// Groups validation columns by subtask label, in order of first appearance.
struct SubtaskIndex {
    std::vector<std::string> names;
    std::vector<std::vector<std::size_t>> groups;

    static SubtaskIndex build(const std::vector<std::string>& labels);
};

// Per-validation-sample scores -> one scalar: mean within each subtask,
// then the maximum across subtasks.
double aggregate_row(std::span<const double> scores, const SubtaskIndex& subtasks);

// Row-major N x M matrix of pairwise scores -> length-N influence vector.
InfluenceVector aggregate_validation(const std::vector<double>& inf_matrix,
                                     std::size_t n_rows,
                                     const std::vector<std::string>& labels);

// Elementwise mean across checkpoints.
InfluenceVector aggregate_checkpoints(const std::vector<InfluenceVector>& per_checkpoint);

// Eager influence of every training row against the validation set.
InfluenceVector compute_influences(const GradientMatrix& train, const ValidationSet& val,
                                   unsigned threads = 0);

// Per-index influence with an evaluation counter. The counter counts
// distinct indices evaluated and is the consumed computing budget.
class InfluenceSource {
public:
    virtual ~InfluenceSource() = default;
    virtual double operator()(std::size_t index) const = 0;
    virtual std::uint64_t evaluations() const = 0;
    virtual std::size_t pool_size() const = 0;
};

// Lazy, memoizing oracle over (train, val). Each index is computed on first
// request; concurrent requests for the same index evaluate it exactly once.
// Values match compute_influences() bit for bit.
class InfluenceOracle final : public InfluenceSource {
public:
    InfluenceOracle(const GradientMatrix& train, const ValidationSet& val);

    double operator()(std::size_t index) const override;
    std::uint64_t evaluations() const override { return evals_.load(); }
    std::size_t pool_size() const override { return train_->rows; }

private:
    const GradientMatrix* train_;
    const ValidationSet* val_;
    SubtaskIndex subtasks_;
    mutable std::vector<double> memo_;
    mutable std::deque<std::once_flag> flags_;
    mutable std::atomic<std::uint64_t> evals_{0};
};

// Counting adapter over an already-computed influence vector. Used where the
// full vector exists anyway (policy comparisons, sweeps) so bandit runs do
// not recompute inner products.
class PrecomputedInfluence final : public InfluenceSource {
public:
    explicit PrecomputedInfluence(const InfluenceVector& values);

    double operator()(std::size_t index) const override;
    std::uint64_t evaluations() const override { return evals_.load(); }
    std::size_t pool_size() const override { return values_->size(); }

private:
    const InfluenceVector* values_;
    mutable std::vector<std::atomic<std::uint8_t>> seen_;
    mutable std::atomic<std::uint64_t> evals_{0};
};

}  // namespace cucb
