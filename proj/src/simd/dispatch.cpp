#include "pabeam/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

namespace pabeam::simd {

const Kernels& scalar_kernels();
#ifdef PABEAM_WITH_AVX2
const Kernels& avx2_kernels();
#endif

namespace {

bool cpu_has_avx2() {
#if defined(PABEAM_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend pick_default() {
    if (const char* env = std::getenv("PABEAM_SIMD")) {
        if (std::strcmp(env, "scalar") == 0) return Backend::scalar;
        if (std::strcmp(env, "avx2") == 0 && cpu_has_avx2()) return Backend::avx2;
    }
    return cpu_has_avx2() ? Backend::avx2 : Backend::scalar;
}

std::atomic<Backend> g_backend{pick_default()};

}  // namespace

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: return cpu_has_avx2();
    }
    return false;
}

const Kernels& kernels(Backend b) {
    if (b == Backend::scalar) return scalar_kernels();
#ifdef PABEAM_WITH_AVX2
    if (b == Backend::avx2 && cpu_has_avx2()) return avx2_kernels();
#endif
    throw std::runtime_error("requested SIMD backend is not available on this host");
}

const Kernels& kernels() { return kernels(g_backend.load(std::memory_order_relaxed)); }

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (!backend_available(b))
        throw std::runtime_error("requested SIMD backend is not available on this host");
    g_backend.store(b, std::memory_order_relaxed);
}

}  // namespace pabeam::simd
