// AVX2 kernel variants. Built only on x86-64; this translation unit is
// compiled with -mavx2 (and deliberately without -mfma, so the lane
// arithmetic matches the scalar reference bit for bit).

#include "dtfim/simd/ou_batch.hpp"

#ifdef DTFIM_HAVE_AVX2

#include <immintrin.h>

namespace dtfim::simd {

struct Avx2Batch {
    static constexpr int width = 4;
    using D = __m256d;
    using U = __m256i;
    using M = __m256d;

    static D dset1(double v) { return _mm256_set1_pd(v); }
    static D dzero() { return _mm256_setzero_pd(); }
    static D add(D a, D b) { return _mm256_add_pd(a, b); }
    static D sub(D a, D b) { return _mm256_sub_pd(a, b); }
    static D mul(D a, D b) { return _mm256_mul_pd(a, b); }
    static D div(D a, D b) { return _mm256_div_pd(a, b); }
    static D sqrt_(D a) { return _mm256_sqrt_pd(a); }
    static M lt(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_LT_OQ); }
    static M gt(D a, D b) { return _mm256_cmp_pd(a, b, _CMP_GT_OQ); }
    static M mask_and(M a, M b) { return _mm256_and_pd(a, b); }
    static M mask_andnot(M a, M b) { return _mm256_andnot_pd(a, b); }
    static M mask_true() { return _mm256_castsi256_pd(_mm256_set1_epi64x(-1)); }
    static bool any(M m) { return _mm256_movemask_pd(m) != 0; }
    static D blend(D a, D b, M take_b) { return _mm256_blendv_pd(a, b, take_b); }
    static U ublend(U a, U b, M take_b) {
        return _mm256_castpd_si256(
            _mm256_blendv_pd(_mm256_castsi256_pd(a), _mm256_castsi256_pd(b), take_b));
    }
    static U uset1(std::uint64_t v) { return _mm256_set1_epi64x(static_cast<long long>(v)); }
    static U uadd(U a, U b) { return _mm256_add_epi64(a, b); }
    static U uxor(U a, U b) { return _mm256_xor_si256(a, b); }
    static U uand(U a, U b) { return _mm256_and_si256(a, b); }
    static U uor(U a, U b) { return _mm256_or_si256(a, b); }
    template <int K> static U shl(U a) { return _mm256_slli_epi64(a, K); }
    template <int K> static U shr(U a) { return _mm256_srli_epi64(a, K); }
    template <int K> static U rotl(U a) {
        return _mm256_or_si256(_mm256_slli_epi64(a, K), _mm256_srli_epi64(a, 64 - K));
    }
    static D bits_to_d(U u) { return _mm256_castsi256_pd(u); }
    static U d_to_bits(D d) { return _mm256_castpd_si256(d); }
    static U load_lanes(const std::uint64_t* p) {
        return _mm256_loadu_si256(reinterpret_cast<const __m256i*>(p));
    }
    static void store(double* p, D v) { _mm256_storeu_pd(p, v); }
};

void ou_paths_avx2(const OuPathArgs& args, long p0, long p1, double* out) {
    ou_paths_impl<Avx2Batch>(args, p0, p1, out);
}

void daxpy_avx2(long n, double a, const double* x, double* y) {
    const __m256d va = _mm256_set1_pd(a);
    long i = 0;
    for (; i + 8 <= n; i += 8) {
        __m256d y0 = _mm256_loadu_pd(y + i);
        __m256d y1 = _mm256_loadu_pd(y + i + 4);
        y0 = _mm256_add_pd(y0, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
        y1 = _mm256_add_pd(y1, _mm256_mul_pd(va, _mm256_loadu_pd(x + i + 4)));
        _mm256_storeu_pd(y + i, y0);
        _mm256_storeu_pd(y + i + 4, y1);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace dtfim::simd

#endif  // DTFIM_HAVE_AVX2
