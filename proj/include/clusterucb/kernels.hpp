#pragma once

#include <cstddef>
#include <string>

namespace cucb::kernels {

// Data-parallel inner loops used by the influence, clustering and projection
// code. Storage is float32; every accumulation happens in float64. A scalar
// reference implementation always exists; vector variants (AVX2 on x86-64,
// NEON on aarch64) are selected at runtime from CPU capabilities and must
// agree with the scalar kernels up to reassociation error (see the
// equivalence tests).

enum class Backend { scalar, avx2, neon };

// Backend chosen at startup: best supported one, unless the environment
// variable CLUSTERUCB_BACKEND (scalar|avx2|neon) asks for another.
Backend active_backend();
bool backend_supported(Backend b);
// Switches the dispatch table. Returns false and keeps the current table if
// the CPU does not support the request.
bool set_backend(Backend b);
const char* backend_name(Backend b);

// sum_i a[i] * b[i]
double dot(const float* a, const float* b, std::size_t n);
// sum_i a[i] * b[i] with a float64 right-hand side (k-means centroids)
double dot_mixed(const float* a, const double* b, std::size_t n);
// sum_i a[i]^2
double squared_norm(const float* a, std::size_t n);
// a[i] *= s
void scale(float* a, std::size_t n, float s);
// acc[i] += x[i] (centroid accumulation)
void accumulate(double* acc, const float* x, std::size_t n);

namespace detail {

struct Table {
    double (*dot)(const float*, const float*, std::size_t);
    double (*dot_mixed)(const float*, const double*, std::size_t);
    double (*squared_norm)(const float*, std::size_t);
    void (*scale)(float*, std::size_t, float);
    void (*accumulate)(double*, const float*, std::size_t);
};

const Table& scalar_table();
#if defined(__x86_64__) || defined(_M_X64)
const Table& avx2_table();
#endif
#if defined(__aarch64__)
const Table& neon_table();
#endif

}  // namespace detail

}  // namespace cucb::kernels
