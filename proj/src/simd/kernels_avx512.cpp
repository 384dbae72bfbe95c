// AVX-512F kernel variants: eight lanes per operation and native masking for
// the rejection loop. Compiled with -mavx512f only (no FMA contraction), so
// per-lane arithmetic still matches the scalar reference bit for bit.

#include "dtfim/simd/ou_batch.hpp"

#ifdef DTFIM_HAVE_AVX512

#include <immintrin.h>

namespace dtfim::simd {

struct Avx512Batch {
    static constexpr int width = 8;
    using D = __m512d;
    using U = __m512i;
    using M = __mmask8;

    static D dset1(double v) { return _mm512_set1_pd(v); }
    static D dzero() { return _mm512_setzero_pd(); }
    static D add(D a, D b) { return _mm512_add_pd(a, b); }
    static D sub(D a, D b) { return _mm512_sub_pd(a, b); }
    static D mul(D a, D b) { return _mm512_mul_pd(a, b); }
    static D div(D a, D b) { return _mm512_div_pd(a, b); }
    static D sqrt_(D a) { return _mm512_sqrt_pd(a); }
    static M lt(D a, D b) { return _mm512_cmp_pd_mask(a, b, _CMP_LT_OQ); }
    static M gt(D a, D b) { return _mm512_cmp_pd_mask(a, b, _CMP_GT_OQ); }
    static M mask_and(M a, M b) { return a & b; }
    static M mask_andnot(M a, M b) { return static_cast<M>(~a & b); }
    static M mask_true() { return static_cast<M>(0xff); }
    static bool any(M m) { return m != 0; }
    static D blend(D a, D b, M take_b) { return _mm512_mask_blend_pd(take_b, a, b); }
    static U ublend(U a, U b, M take_b) { return _mm512_mask_blend_epi64(take_b, a, b); }
    static U uset1(std::uint64_t v) { return _mm512_set1_epi64(static_cast<long long>(v)); }
    static U uadd(U a, U b) { return _mm512_add_epi64(a, b); }
    static U uxor(U a, U b) { return _mm512_xor_si512(a, b); }
    static U uand(U a, U b) { return _mm512_and_si512(a, b); }
    static U uor(U a, U b) { return _mm512_or_si512(a, b); }
    template <int K> static U shl(U a) { return _mm512_slli_epi64(a, K); }
    template <int K> static U shr(U a) { return _mm512_srli_epi64(a, K); }
    template <int K> static U rotl(U a) { return _mm512_rol_epi64(a, K); }
    static D bits_to_d(U u) { return _mm512_castsi512_pd(u); }
    static U d_to_bits(D d) { return _mm512_castpd_si512(d); }
    static U load_lanes(const std::uint64_t* p) {
        return _mm512_loadu_si512(reinterpret_cast<const void*>(p));
    }
    static void store(double* p, D v) { _mm512_storeu_pd(p, v); }
};

void ou_paths_avx512(const OuPathArgs& args, long p0, long p1, double* out) {
    ou_paths_impl<Avx512Batch>(args, p0, p1, out);
}

void daxpy_avx512(long n, double a, const double* x, double* y) {
    const __m512d va = _mm512_set1_pd(a);
    long i = 0;
    for (; i + 8 <= n; i += 8) {
        const __m512d yv = _mm512_loadu_pd(y + i);
        _mm512_storeu_pd(y + i, _mm512_add_pd(yv, _mm512_mul_pd(va, _mm512_loadu_pd(x + i))));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

}  // namespace dtfim::simd

#endif  // DTFIM_HAVE_AVX512
