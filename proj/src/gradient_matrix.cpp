#include "clusterucb/gradient_matrix.hpp"

#include <cmath>
#include <unordered_set>

#include "clusterucb/errors.hpp"
#include "clusterucb/kernels.hpp"

namespace cucb {

void GradientMatrix::validate() const {
    if (rows == 0 || cols == 0) {
        throw ValidationError("gradient matrix must have at least one row and one column");
    }
    if (ids.size() != rows) {
        throw ValidationError("id count (" + std::to_string(ids.size()) +
                              ") does not match row count (" + std::to_string(rows) + ")");
    }
    if (data.size() != rows * cols) {
        throw ValidationError("data size does not match rows * cols");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(ids.size());
    for (const auto& id : ids) {
        if (!seen.insert(id).second) {
            throw ValidationError("duplicate sample id: " + id);
        }
    }
    if (normalized) {
        for (std::size_t i = 0; i < rows; ++i) {
            const double norm = std::sqrt(kernels::squared_norm(row(i), cols));
            if (std::abs(norm - 1.0) > 1e-5) {
                throw ValidationError("row " + std::to_string(i) +
                                      " marked normalized but has norm " +
                                      std::to_string(norm));
            }
        }
    }
}

void ValidationSet::validate() const {
    grads.validate();
    if (subtask_labels.size() != grads.rows) {
        throw ValidationError("subtask label count does not match validation row count");
    }
    if (subtask_labels.empty()) {
        throw EmptySubtaskError("validation set has no subtask labels");
    }
}

void normalize_rows_in_place(GradientMatrix& m) {
    for (std::size_t i = 0; i < m.rows; ++i) {
        const double norm = std::sqrt(kernels::squared_norm(m.row(i), m.cols));
        if (norm < 1e-12) throw ZeroRowError(i);
        kernels::scale(m.row(i), m.cols, static_cast<float>(1.0 / norm));
    }
    m.normalized = true;
}

GradientMatrix normalize_rows(const GradientMatrix& m) {
    GradientMatrix out = m;
    normalize_rows_in_place(out);
    return out;
}

}  // namespace cucb
