#include <atomic>
#include <cstdlib>
#include <cstring>

#include "clusterucb/kernels.hpp"

namespace cucb::kernels {

namespace {

using detail::Table;

bool cpu_supports(Backend b) {
    switch (b) {
        case Backend::scalar:
            return true;
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
            return false;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return true;
#else
            return false;
#endif
    }
    return false;
}

const Table* table_for(Backend b) {
    switch (b) {
        case Backend::scalar:
            return &detail::scalar_table();
        case Backend::avx2:
#if defined(__x86_64__) || defined(_M_X64)
            return &detail::avx2_table();
#else
            return nullptr;
#endif
        case Backend::neon:
#if defined(__aarch64__)
            return &detail::neon_table();
#else
            return nullptr;
#endif
    }
    return nullptr;
}

Backend best_backend() {
    if (const char* env = std::getenv("CLUSTERUCB_BACKEND")) {
        for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
            if (std::strcmp(env, backend_name(b)) == 0 && cpu_supports(b)) {
                return b;
            }
        }
    }
    if (cpu_supports(Backend::avx2)) return Backend::avx2;
    if (cpu_supports(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

struct Dispatch {
    std::atomic<const Table*> table;
    std::atomic<Backend> backend;
    Dispatch() {
        const Backend b = best_backend();
        backend.store(b);
        table.store(table_for(b));
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

inline const Table& table() { return *dispatch().table.load(std::memory_order_relaxed); }

}  // namespace

Backend active_backend() { return dispatch().backend.load(); }

bool backend_supported(Backend b) { return cpu_supports(b); }

bool set_backend(Backend b) {
    if (!cpu_supports(b)) return false;
    dispatch().backend.store(b);
    dispatch().table.store(table_for(b));
    return true;
}

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::scalar: return "scalar";
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
    }
    return "unknown";
}

double dot(const float* a, const float* b, std::size_t n) {
    return table().dot(a, b, n);
}

double dot_mixed(const float* a, const double* b, std::size_t n) {
    return table().dot_mixed(a, b, n);
}

double squared_norm(const float* a, std::size_t n) {
    return table().squared_norm(a, n);
}

void scale(float* a, std::size_t n, float s) { table().scale(a, n, s); }

void accumulate(double* acc, const float* x, std::size_t n) {
    table().accumulate(acc, x, n);
}

}  // namespace cucb::kernels
