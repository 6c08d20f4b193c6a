#include "clusterucb/kernels.hpp"

// Reference kernels. Plain sequential loops, one accumulator; the vector
// backends are tested against these.

namespace cucb::kernels::detail {

namespace {

double dot_scalar(const float* a, const float* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return acc;
}

double dot_mixed_scalar(const float* a, const double* b, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        acc += static_cast<double>(a[i]) * b[i];
    }
    return acc;
}

double squared_norm_scalar(const float* a, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = static_cast<double>(a[i]);
        acc += v * v;
    }
    return acc;
}

void scale_scalar(float* a, std::size_t n, float s) {
    for (std::size_t i = 0; i < n; ++i) a[i] *= s;
}

void accumulate_scalar(double* acc, const float* x, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

}  // namespace

const Table& scalar_table() {
    static const Table table{dot_scalar, dot_mixed_scalar, squared_norm_scalar,
                             scale_scalar, accumulate_scalar};
    return table;
}

}  // namespace cucb::kernels::detail
