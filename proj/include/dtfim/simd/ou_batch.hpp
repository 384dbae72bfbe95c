#pragma once

// Batch-templated bodies of the SIMD kernels. Each ISA translation unit
// instantiates these with its own batch type; the scalar batch is the
// reference semantics and every vector batch must reproduce it bit for bit
// (same operations, same order, no FMA contraction).

#include <bit>
#include <cmath>
#include <cstdint>

#include "dtfim/simd/kernels.hpp"

namespace dtfim::simd {

inline std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Width-1 batch: plain IEEE doubles and uint64 lanes.
struct ScalarBatch {
    static constexpr int width = 1;
    using D = double;
    using U = std::uint64_t;
    using M = bool;

    static D dset1(double v) { return v; }
    static D dzero() { return 0.0; }
    static D add(D a, D b) { return a + b; }
    static D sub(D a, D b) { return a - b; }
    static D mul(D a, D b) { return a * b; }
    static D div(D a, D b) { return a / b; }
    static D sqrt_(D a) { return std::sqrt(a); }
    static M lt(D a, D b) { return a < b; }
    static M gt(D a, D b) { return a > b; }
    static M mask_and(M a, M b) { return a && b; }
    static M mask_andnot(M a, M b) { return !a && b; }
    static M mask_true() { return true; }
    static bool any(M m) { return m; }
    static D blend(D a, D b, M take_b) { return take_b ? b : a; }
    static U ublend(U a, U b, M take_b) { return take_b ? b : a; }
    static U uset1(std::uint64_t v) { return v; }
    static U uadd(U a, U b) { return a + b; }
    static U uxor(U a, U b) { return a ^ b; }
    static U uand(U a, U b) { return a & b; }
    static U uor(U a, U b) { return a | b; }
    template <int K> static U shl(U a) { return a << K; }
    template <int K> static U shr(U a) { return a >> K; }
    template <int K> static U rotl(U a) { return (a << K) | (a >> (64 - K)); }
    static D bits_to_d(U u) { return std::bit_cast<double>(u); }
    static U d_to_bits(D d) { return std::bit_cast<std::uint64_t>(d); }
    static U load_lanes(const std::uint64_t* p) { return p[0]; }
    static void store(double* p, D v) { p[0] = v; }
};

/// Exact conversion of a < 2^52 integer lane to double via the 2^52 addend
/// trick (no native uint64->double conversion below AVX-512).
template <class B>
inline typename B::D u52_to_double(typename B::U u) {
    auto x = B::uor(u, B::uset1(0x4330000000000000ull));
    return B::sub(B::bits_to_d(x), B::dset1(0x1p52));
}

/// Uniform double in [-1, 1) from the top 52 bits of a uint64 lane.
template <class B>
inline typename B::D uniform_pm1(typename B::U r) {
    auto d = u52_to_double<B>(B::template shr<12>(r));
    return B::sub(B::mul(d, B::dset1(0x1p-51)), B::dset1(1.0));
}

/// Natural log for normal positive inputs (Cephes rational approximation,
/// ~1 ulp over the reduced interval). No special-case handling: callers feed
/// values from (0, 1).
template <class B>
inline typename B::D vlog(typename B::D x) {
    using D = typename B::D;
    const auto bits = B::d_to_bits(x);
    const auto ebits = B::uand(B::template shr<52>(bits), B::uset1(0x7ffull));
    D e = B::sub(u52_to_double<B>(ebits), B::dset1(1022.0));
    const auto mbits = B::uor(B::uand(bits, B::uset1(0x000fffffffffffffull)),
                              B::uset1(0x3fe0000000000000ull));
    D m = B::bits_to_d(mbits);  // [0.5, 1)

    const auto below = B::lt(m, B::dset1(0.70710678118654752440));
    e = B::blend(e, B::sub(e, B::dset1(1.0)), below);
    D z = B::blend(B::sub(m, B::dset1(1.0)),
                   B::sub(B::add(m, m), B::dset1(1.0)), below);

    D z2 = B::mul(z, z);
    D num = B::dset1(1.01875663804580931796e-4);
    num = B::add(B::mul(num, z), B::dset1(4.97494994976747001425e-1));
    num = B::add(B::mul(num, z), B::dset1(4.70579119878881725854e0));
    num = B::add(B::mul(num, z), B::dset1(1.44989225341610930846e1));
    num = B::add(B::mul(num, z), B::dset1(1.79368678507819816313e1));
    num = B::add(B::mul(num, z), B::dset1(7.70838733755885391666e0));
    D den = B::add(z, B::dset1(1.12873587189167450590e1));
    den = B::add(B::mul(den, z), B::dset1(4.52279145837532221105e1));
    den = B::add(B::mul(den, z), B::dset1(8.29875266912776603211e1));
    den = B::add(B::mul(den, z), B::dset1(7.11544750618563894466e1));
    den = B::add(B::mul(den, z), B::dset1(2.31251620126765340583e1));

    D y = B::mul(z, B::mul(z2, B::div(num, den)));
    y = B::sub(y, B::mul(e, B::dset1(2.121944400546905827679e-4)));
    y = B::sub(y, B::mul(B::dset1(0.5), z2));
    D r = B::add(z, y);
    r = B::add(r, B::mul(e, B::dset1(0.693359375)));
    return r;
}

/// Per-lane xoshiro256++ advanced in lockstep; inactive lanes keep both their
/// state and their previous output, so per-path streams are identical no
/// matter how lanes are grouped.
template <class B>
struct LaneRng {
    typename B::U s0, s1, s2, s3;

    void seed(std::uint64_t seed, long first_path) {
        std::uint64_t lanes[4][B::width];
        for (int l = 0; l < B::width; ++l) {
            std::uint64_t x =
                seed ^ (0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(first_path + l + 1));
            std::uint64_t st[4];
            for (auto& s : st) s = splitmix64(x);
            if ((st[0] | st[1] | st[2] | st[3]) == 0) st[0] = 1;
            for (int k = 0; k < 4; ++k) lanes[k][l] = st[k];
        }
        s0 = B::load_lanes(lanes[0]);
        s1 = B::load_lanes(lanes[1]);
        s2 = B::load_lanes(lanes[2]);
        s3 = B::load_lanes(lanes[3]);
    }

    void next_masked(typename B::M active, typename B::U& out) {
        using U = typename B::U;
        const U r = B::uadd(B::template rotl<23>(B::uadd(s0, s3)), s0);
        const U t = B::template shl<17>(s1);
        U n2 = B::uxor(s2, s0);
        U n3 = B::uxor(s3, s1);
        const U n1 = B::uxor(s1, n2);
        const U n0 = B::uxor(s0, n3);
        n2 = B::uxor(n2, t);
        n3 = B::template rotl<45>(n3);
        s0 = B::ublend(s0, n0, active);
        s1 = B::ublend(s1, n1, active);
        s2 = B::ublend(s2, n2, active);
        s3 = B::ublend(s3, n3, active);
        out = B::ublend(out, r, active);
    }
};

/// Standard-normal pairs by the polar (Marsaglia) method with masked
/// rejection. A lane that has accepted stops consuming random numbers.
template <class B>
struct GaussGen {
    LaneRng<B> rng;

    void pair(typename B::D& z0, typename B::D& z1) {
        using D = typename B::D;
        typename B::M pending = B::mask_true();
        typename B::U r1 = B::uset1(0), r2 = B::uset1(0);
        D u1 = B::dzero(), u2 = B::dzero(), s = B::dset1(0.5);
        do {
            rng.next_masked(pending, r1);
            rng.next_masked(pending, r2);
            const D c1 = uniform_pm1<B>(r1);
            const D c2 = uniform_pm1<B>(r2);
            const D cs = B::add(B::mul(c1, c1), B::mul(c2, c2));
            u1 = B::blend(u1, c1, pending);
            u2 = B::blend(u2, c2, pending);
            s = B::blend(s, cs, pending);
            const auto ok = B::mask_and(B::lt(cs, B::dset1(1.0)), B::gt(cs, B::dset1(1e-300)));
            pending = B::mask_andnot(ok, pending);
        } while (B::any(pending));
        const D f = B::sqrt_(B::div(B::mul(B::dset1(-2.0), vlog<B>(s)), s));
        z0 = B::mul(u1, f);
        z1 = B::mul(u2, f);
    }
};

/// Euler-Maruyama for dz = A z dt + B dW from z(0) = 0. Three normals per
/// step; the polar pairs yield two at a time, so odd steps reuse the spare
/// from the previous step. The carry depends only on the step index, never on
/// the lane, so per-path streams stay batch-width independent.
template <class B>
void ou_paths_impl(const OuPathArgs& g, long p0, long p1, double* out) {
    using D = typename B::D;
    const double sqdt = std::sqrt(g.dt);
    long p = p0;
    for (; p + B::width <= p1; p += B::width) {
        GaussGen<B> gen;
        gen.rng.seed(g.seed, p);
        D z0 = B::dzero(), z1 = B::dzero(), z2 = B::dzero();
        D spare = B::dzero();
        bool have_spare = false;
        for (long k = 0; k < g.n_steps; ++k) {
            D x0, x1, x2;
            if (have_spare) {
                x0 = spare;
                gen.pair(x1, x2);
                have_spare = false;
            } else {
                gen.pair(x0, x1);
                gen.pair(x2, spare);
                have_spare = true;
            }
            const D d0 = B::add(B::add(B::mul(B::dset1(g.a[0]), z0), B::mul(B::dset1(g.a[1]), z1)),
                                B::mul(B::dset1(g.a[2]), z2));
            const D d1 = B::add(B::add(B::mul(B::dset1(g.a[3]), z0), B::mul(B::dset1(g.a[4]), z1)),
                                B::mul(B::dset1(g.a[5]), z2));
            const D d2 = B::add(B::add(B::mul(B::dset1(g.a[6]), z0), B::mul(B::dset1(g.a[7]), z1)),
                                B::mul(B::dset1(g.a[8]), z2));
            const D n0 = B::add(B::add(B::mul(B::dset1(g.b[0]), x0), B::mul(B::dset1(g.b[1]), x1)),
                                B::mul(B::dset1(g.b[2]), x2));
            const D n1 = B::add(B::add(B::mul(B::dset1(g.b[3]), x0), B::mul(B::dset1(g.b[4]), x1)),
                                B::mul(B::dset1(g.b[5]), x2));
            const D n2 = B::add(B::add(B::mul(B::dset1(g.b[6]), x0), B::mul(B::dset1(g.b[7]), x1)),
                                B::mul(B::dset1(g.b[8]), x2));
            z0 = B::add(z0, B::add(B::mul(B::dset1(g.dt), d0), B::mul(B::dset1(sqdt), n0)));
            z1 = B::add(z1, B::add(B::mul(B::dset1(g.dt), d1), B::mul(B::dset1(sqdt), n1)));
            z2 = B::add(z2, B::add(B::mul(B::dset1(g.dt), d2), B::mul(B::dset1(sqdt), n2)));
        }
        double buf0[B::width], buf1[B::width], buf2[B::width];
        B::store(buf0, z0);
        B::store(buf1, z1);
        B::store(buf2, z2);
        for (int l = 0; l < B::width; ++l) {
            double* o = out + 3 * (p - p0 + l);
            o[0] = buf0[l];
            o[1] = buf1[l];
            o[2] = buf2[l];
        }
    }
    if constexpr (B::width > 1) {
        if (p < p1) ou_paths_impl<ScalarBatch>(g, p, p1, out + 3 * (p - p0));
    }
}

}  // namespace dtfim::simd
