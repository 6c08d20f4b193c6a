#include "clusterucb/influence.hpp"

#include <limits>
#include <string>
#include <unordered_map>

#include "clusterucb/errors.hpp"
#include "clusterucb/kernels.hpp"
#include "clusterucb/parallel.hpp"

namespace cucb {

namespace {

// Shared by the lazy oracle and the eager path so both produce bit-identical
// values for the same row.
double influence_of_row(const GradientMatrix& train, std::size_t i,
                        const GradientMatrix& val_grads, const SubtaskIndex& subtasks) {
    const float* t = train.row(i);
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& group : subtasks.groups) {
        double sum = 0.0;
        for (const std::size_t j : group) {
            sum += kernels::dot(t, val_grads.row(j), train.cols);
        }
        const double mean = sum / static_cast<double>(group.size());
        if (mean > best) best = mean;
    }
    return best;
}

}  // namespace

double influence_pair(std::span<const float> train_row, std::span<const float> val_row) {
    if (train_row.size() != val_row.size()) {
        throw DimensionMismatchError("influence_pair: dimensions " +
                                     std::to_string(train_row.size()) + " vs " +
                                     std::to_string(val_row.size()));
    }
    return kernels::dot(train_row.data(), val_row.data(), train_row.size());
}

SubtaskIndex SubtaskIndex::build(const std::vector<std::string>& labels) {
    if (labels.empty()) {
        throw EmptySubtaskError("no subtask labels");
    }
    SubtaskIndex index;
    std::unordered_map<std::string, std::size_t> positions;
    for (std::size_t j = 0; j < labels.size(); ++j) {
        auto [it, inserted] = positions.try_emplace(labels[j], index.groups.size());
        if (inserted) {
            index.names.push_back(labels[j]);
            index.groups.emplace_back();
        }
        index.groups[it->second].push_back(j);
    }
    return index;
}

double aggregate_row(std::span<const double> scores, const SubtaskIndex& subtasks) {
    if (subtasks.groups.empty()) {
        throw EmptySubtaskError("no subtasks to aggregate over");
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& group : subtasks.groups) {
        double sum = 0.0;
        for (const std::size_t j : group) sum += scores[j];
        const double mean = sum / static_cast<double>(group.size());
        if (mean > best) best = mean;
    }
    return best;
}

InfluenceVector aggregate_validation(const std::vector<double>& inf_matrix,
                                     std::size_t n_rows,
                                     const std::vector<std::string>& labels) {
    const SubtaskIndex subtasks = SubtaskIndex::build(labels);
    const std::size_t n_cols = labels.size();
    if (inf_matrix.size() != n_rows * n_cols) {
        throw DimensionMismatchError("influence matrix size does not match rows * labels");
    }
    InfluenceVector out(n_rows);
    for (std::size_t i = 0; i < n_rows; ++i) {
        out[i] = aggregate_row({inf_matrix.data() + i * n_cols, n_cols}, subtasks);
    }
    return out;
}

InfluenceVector aggregate_checkpoints(const std::vector<InfluenceVector>& per_checkpoint) {
    if (per_checkpoint.empty()) {
        throw EmptyListError("no checkpoints to aggregate");
    }
    const std::size_t n = per_checkpoint.front().size();
    for (const auto& v : per_checkpoint) {
        if (v.size() != n) {
            throw LengthMismatchError("checkpoint influence vectors differ in length");
        }
    }
    InfluenceVector out(n, 0.0);
    for (const auto& v : per_checkpoint) {
        for (std::size_t i = 0; i < n; ++i) out[i] += v[i];
    }
    const double inv = 1.0 / static_cast<double>(per_checkpoint.size());
    for (double& x : out) x *= inv;
    return out;
}

InfluenceVector compute_influences(const GradientMatrix& train, const ValidationSet& val,
                                   unsigned threads) {
    if (train.cols != val.grads.cols) {
        throw DimensionMismatchError("train and validation gradient dimensions differ");
    }
    const SubtaskIndex subtasks = SubtaskIndex::build(val.subtask_labels);
    InfluenceVector out(train.rows);
    parallel_for(train.rows, threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            out[i] = influence_of_row(train, i, val.grads, subtasks);
        }
    });
    return out;
}

InfluenceOracle::InfluenceOracle(const GradientMatrix& train, const ValidationSet& val)
    : train_(&train),
      val_(&val),
      subtasks_(SubtaskIndex::build(val.subtask_labels)),
      memo_(train.rows),
      flags_(train.rows) {
    if (train.cols != val.grads.cols) {
        throw DimensionMismatchError("train and validation gradient dimensions differ");
    }
}

double InfluenceOracle::operator()(std::size_t index) const {
    if (index >= train_->rows) {
        throw IndexOutOfRangeError("influence index " + std::to_string(index) +
                                   " out of range (pool size " +
                                   std::to_string(train_->rows) + ")");
    }
    std::call_once(flags_[index], [&] {
        memo_[index] = influence_of_row(*train_, index, val_->grads, subtasks_);
        evals_.fetch_add(1, std::memory_order_relaxed);
    });
    return memo_[index];
}

PrecomputedInfluence::PrecomputedInfluence(const InfluenceVector& values)
    : values_(&values), seen_(values.size()) {}

double PrecomputedInfluence::operator()(std::size_t index) const {
    if (index >= values_->size()) {
        throw IndexOutOfRangeError("influence index " + std::to_string(index) +
                                   " out of range (pool size " +
                                   std::to_string(values_->size()) + ")");
    }
    if (seen_[index].exchange(1, std::memory_order_relaxed) == 0) {
        evals_.fetch_add(1, std::memory_order_relaxed);
    }
    return (*values_)[index];
}

}  // namespace cucb
