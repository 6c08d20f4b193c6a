#if defined(__aarch64__)

#include <arm_neon.h>

#include "clusterucb/kernels.hpp"

// NEON variants for aarch64. Same widen-to-double scheme as the AVX2
// kernels, two 2-lane accumulators.

namespace cucb::kernels::detail {

namespace {

double dot_neon(const float* a, const float* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t va = vld1q_f32(a + i);
        const float32x4_t vb = vld1q_f32(b + i);
        acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)),
                         vcvt_f64_f32(vget_low_f32(vb)));
        acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vcvt_high_f64_f32(vb));
    }
    double sum = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    }
    return sum;
}

double dot_mixed_neon(const float* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t va = vld1q_f32(a + i);
        acc0 = vfmaq_f64(acc0, vcvt_f64_f32(vget_low_f32(va)), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vcvt_high_f64_f32(va), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) {
        sum += static_cast<double>(a[i]) * b[i];
    }
    return sum;
}

double squared_norm_neon(const float* a, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t va = vld1q_f32(a + i);
        const float64x2_t lo = vcvt_f64_f32(vget_low_f32(va));
        const float64x2_t hi = vcvt_high_f64_f32(va);
        acc0 = vfmaq_f64(acc0, lo, lo);
        acc1 = vfmaq_f64(acc1, hi, hi);
    }
    double sum = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) {
        const double v = static_cast<double>(a[i]);
        sum += v * v;
    }
    return sum;
}

void scale_neon(float* a, std::size_t n, float s) {
    const float32x4_t vs = vdupq_n_f32(s);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        vst1q_f32(a + i, vmulq_f32(vld1q_f32(a + i), vs));
    }
    for (; i < n; ++i) a[i] *= s;
}

void accumulate_neon(double* acc, const float* x, std::size_t n) {
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const float32x4_t vx = vld1q_f32(x + i);
        vst1q_f64(acc + i,
                  vaddq_f64(vld1q_f64(acc + i), vcvt_f64_f32(vget_low_f32(vx))));
        vst1q_f64(acc + i + 2,
                  vaddq_f64(vld1q_f64(acc + i + 2), vcvt_high_f64_f32(vx)));
    }
    for (; i < n; ++i) acc[i] += static_cast<double>(x[i]);
}

}  // namespace

const Table& neon_table() {
    static const Table table{dot_neon, dot_mixed_neon, squared_norm_neon,
                             scale_neon, accumulate_neon};
    return table;
}

}  // namespace cucb::kernels::detail

#endif  // aarch64
