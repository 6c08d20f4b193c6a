#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "clusterucb/kernels.hpp"

// AVX2 + FMA variants. Floats are widened to double lanes before any
// arithmetic so the accumulation precision matches the scalar kernels; only
// the summation order differs (two 4-lane accumulators).

namespace cucb::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    double lanes[4];
    _mm256_storeu_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot_avx2(const float* a, const float* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256 vb = _mm256_loadu_ps(b + i);
        const __m256d a_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
        const __m256d a_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
        const __m256d b_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vb));
        const __m256d b_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vb, 1));
        acc0 = _mm256_fmadd_pd(a_lo, b_lo, acc0);
        acc1 = _mm256_fmadd_pd(a_hi, b_hi, acc1);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double dot_mixed_avx2(const float* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256d a_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
        const __m256d a_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
        acc0 = _mm256_fmadd_pd(a_lo, _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(a_hi, _mm256_loadu_pd(b + i + 4), acc1);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * b[i];
    }
    return sum;
}

double squared_norm_avx2(const float* a, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 va = _mm256_loadu_ps(a + i);
        const __m256d a_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(va));
        const __m256d a_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(va, 1));
        acc0 = _mm256_fmadd_pd(a_lo, a_lo, acc0);
        acc1 = _mm256_fmadd_pd(a_hi, a_hi, acc1);
    }
    double sum = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) {
        const double v = static_cast<double>(a[i]);
        sum += v * v;
    }
    return sum;
}

void scale_avx2(float* a, std::size_t n, float s) {
    const __m256 vs = _mm256_set1_ps(s);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_ps(a + i, _mm256_mul_ps(_mm256_loadu_ps(a + i), vs));
    }
    for (; i < n; ++i) a[i] *= s;
}

void accumulate_avx2(double* acc, const float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m256 vx = _mm256_loadu_ps(x + i);
        const __m256d x_lo = _mm256_cvtps_pd(_mm256_castps256_ps128(vx));
        const __m256d x_hi = _mm256_cvtps_pd(_mm256_extractf128_ps(vx, 1));
        _mm256_storeu_pd(acc + i, _mm256_add_pd(_mm256_loadu_pd(acc + i), x_lo));
        _mm256_storeu_pd(acc + i + 4,
                         _mm256_add_pd(_mm256_loadu_pd(acc + i + 4), x_hi));
    }
    for (; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

}  // namespace

const Table& avx2_table() {
    static const Table table{dot_avx2, dot_mixed_avx2, squared_norm_avx2,
                             scale_avx2, accumulate_avx2};
    return table;
}

}  // namespace cucb::kernels::detail

#endif  // x86-64
