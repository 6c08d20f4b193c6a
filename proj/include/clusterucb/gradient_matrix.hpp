#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace cucb {

// N x d row-major float32 matrix of gradient feature vectors, one row per
// training sample. `normalized` asserts every row has unit Euclidean norm
// (within 1e-5).
struct GradientMatrix {
    std::vector<std::string> ids;  // length N, unique
    std::vector<float> data;       // N * d
    std::size_t rows = 0;
    std::size_t cols = 0;
    bool normalized = false;

    const float* row(std::size_t i) const { return data.data() + i * cols; }
    float* row(std::size_t i) { return data.data() + i * cols; }

    // Throws ValidationError when an invariant is broken.
    void validate() const;
};

// Validation gradients with one subtask label per row.
struct ValidationSet {
    GradientMatrix grads;
    std::vector<std::string> subtask_labels;  // length M

    void validate() const;
};

// Aggregated per-sample influence scores, same length as the training pool.
using InfluenceVector = std::vector<double>;

// Divides every row by its Euclidean norm. Throws ZeroRowError if a row norm
// falls below 1e-12. Ids are preserved.
GradientMatrix normalize_rows(const GradientMatrix& m);
void normalize_rows_in_place(GradientMatrix& m);

}  // namespace cucb
