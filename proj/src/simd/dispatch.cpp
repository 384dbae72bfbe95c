#include "dtfim/simd/kernels.hpp"

#include "dtfim/types.hpp"

namespace dtfim::simd {

void ou_paths_scalar(const OuPathArgs&, long, long, double*);
void daxpy_scalar(long, double, const double*, double*);

#ifdef DTFIM_HAVE_AVX2
void ou_paths_avx2(const OuPathArgs&, long, long, double*);
void daxpy_avx2(long, double, const double*, double*);
#endif
#ifdef DTFIM_HAVE_AVX512
void ou_paths_avx512(const OuPathArgs&, long, long, double*);
void daxpy_avx512(long, double, const double*, double*);
#endif

bool cpu_has_avx2() {
#ifdef DTFIM_HAVE_AVX2
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

bool cpu_has_avx512() {
#ifdef DTFIM_HAVE_AVX512
    return __builtin_cpu_supports("avx512f");
#else
    return false;
#endif
}

KernelKind resolve_kernel(KernelKind kind) {
    if (kind == KernelKind::automatic) {
        if (cpu_has_avx512()) return KernelKind::avx512;
        if (cpu_has_avx2()) return KernelKind::avx2;
        return KernelKind::scalar;
    }
    if (kind == KernelKind::avx2 && !cpu_has_avx2())
        throw InvalidParams("avx2 kernels requested but this CPU lacks AVX2");
    if (kind == KernelKind::avx512 && !cpu_has_avx512())
        throw InvalidParams("avx512 kernels requested but this CPU lacks AVX-512F");
    return kind;
}

const char* kernel_name(KernelKind kind) {
    switch (kind) {
        case KernelKind::automatic: return "auto";
        case KernelKind::scalar: return "scalar";
        case KernelKind::avx2: return "avx2";
        case KernelKind::avx512: return "avx512";
    }
    return "?";
}

OuPathsFn ou_paths_fn(KernelKind kind) {
    switch (resolve_kernel(kind)) {
#ifdef DTFIM_HAVE_AVX512
        case KernelKind::avx512: return &ou_paths_avx512;
#endif
#ifdef DTFIM_HAVE_AVX2
        case KernelKind::avx2: return &ou_paths_avx2;
#endif
        default: return &ou_paths_scalar;
    }
}

DaxpyFn daxpy_fn(KernelKind kind) {
    switch (resolve_kernel(kind)) {
#ifdef DTFIM_HAVE_AVX512
        case KernelKind::avx512: return &daxpy_avx512;
#endif
#ifdef DTFIM_HAVE_AVX2
        case KernelKind::avx2: return &daxpy_avx2;
#endif
        default: return &daxpy_scalar;
    }
}

}  // namespace dtfim::simd
