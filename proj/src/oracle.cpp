#include "dtfim/oracle.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <numeric>

#include "dtfim/fluctuations.hpp"
#include "dtfim/meanfield.hpp"
#include "dtfim/simd/kernels.hpp"
#include "dtfim/smalleig.hpp"

namespace dtfim {

namespace {

int popcount(int x) { return std::popcount(static_cast<unsigned>(x)); }

void check_size(int natoms, int n_max) {
    if (natoms < 1) throw InvalidParams("oracle: natoms must be >= 1");
    if (natoms > n_max)
        throw TooLarge("oracle: N = " + std::to_string(natoms) + " exceeds the guard (" +
                       std::to_string(n_max) + "); the Liouvillian would act on 4^N amplitudes");
}

}  // namespace

double DensityMatrix::hermiticity_deviation() const {
    double dev = 0.0;
    for (int r = 0; r < dim; ++r)
        for (int c = 0; c < dim; ++c)
            dev = std::max(dev, std::abs(at(r, c) - std::conj(at(c, r))));
    return dev;
}

double DensityMatrix::trace_deviation() const {
    cplx tr = 0.0;
    for (int r = 0; r < dim; ++r) tr += at(r, r);
    return std::abs(tr - 1.0);
}

double DensityMatrix::min_eigenvalue() const {
    return herm_eigenvalues(rho, dim).front();
}

std::array<cplx, 4> pauli_x() { return {cplx(0), cplx(1), cplx(1), cplx(0)}; }
std::array<cplx, 4> pauli_y() {
    // rows/cols ordered (ground, excited): <g|sy|e> = i, <e|sy|g> = -i
    return {cplx(0), cplx(0, 1), cplx(0, -1), cplx(0)};
}
std::array<cplx, 4> pauli_z() { return {cplx(-1), cplx(0), cplx(0), cplx(1)}; }
std::array<cplx, 4> sigma_minus() { return {cplx(0), cplx(1), cplx(0), cplx(0)}; }
std::array<cplx, 4> sigma_plus() { return {cplx(0), cplx(0), cplx(1), cplx(0)}; }

std::vector<cplx> site_operator(const std::array<cplx, 4>& op, int atom, int natoms) {
    const int d = 1 << natoms;
    const int b = 1 << atom;
    std::vector<cplx> m(static_cast<size_t>(d) * d, cplx(0));
    // op indexed [row_bit * 2 + col_bit] with bit 1 = excited
    for (int i = 0; i < d; ++i) {
        const int ri = (i & b) ? 1 : 0;
        for (int cj = 0; cj < 2; ++cj) {
            const cplx val = op[ri * 2 + cj];
            if (val == cplx(0)) continue;
            const int j = cj ? (i | b) : (i & ~b);
            m[static_cast<size_t>(i) * d + j] += val;
        }
    }
    return m;
}

std::vector<cplx> collective_operator(const std::array<cplx, 4>& op, int natoms) {
    const int d = 1 << natoms;
    std::vector<cplx> sum(static_cast<size_t>(d) * d, cplx(0));
    for (int n = 0; n < natoms; ++n) {
        const auto m = site_operator(op, n, natoms);
        for (size_t k = 0; k < sum.size(); ++k) sum[k] += m[k];
    }
    return sum;
}

std::vector<cplx> mat_mul(const std::vector<cplx>& a, const std::vector<cplx>& b, int dim) {
    std::vector<cplx> c(static_cast<size_t>(dim) * dim, cplx(0));
    for (int i = 0; i < dim; ++i)
        for (int k = 0; k < dim; ++k) {
            const cplx aik = a[static_cast<size_t>(i) * dim + k];
            if (aik == cplx(0)) continue;
            const cplx* brow = b.data() + static_cast<size_t>(k) * dim;
            cplx* crow = c.data() + static_cast<size_t>(i) * dim;
            for (int j = 0; j < dim; ++j) crow[j] += aik * brow[j];
        }
    return c;
}

cplx trace_product(const std::vector<cplx>& a, const std::vector<cplx>& b, int dim) {
    cplx tr = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            tr += a[static_cast<size_t>(i) * dim + j] * b[static_cast<size_t>(j) * dim + i];
    return tr;
}

std::vector<cplx> build_hamiltonian(const SystemParams& p, int natoms, int n_max) {
    p.validate();
    check_size(natoms, n_max);
    const int d = 1 << natoms;
    std::vector<cplx> h(static_cast<size_t>(d) * d, cplx(0));
    const double zcoef = -0.5 * p.delta + 0.25 * p.vint;
    const double qcoef = p.vint / (8.0 * static_cast<double>(natoms));
    for (int i = 0; i < d; ++i) {
        const double jz = 2.0 * popcount(i) - natoms;
        h[static_cast<size_t>(i) * d + i] = zcoef * jz + qcoef * jz * jz;
        for (int n = 0; n < natoms; ++n)
            h[static_cast<size_t>(i) * d + (i ^ (1 << n))] += 0.5 * p.omega;
    }
    return h;
}

Liouvillian::Liouvillian(const SystemParams& p, int natoms, int n_max)
    : params_(p), natoms_(natoms), dim_(1 << natoms) {
    p.validate();
    check_size(natoms, n_max);
    hdiag_.resize(dim_);
    const double zcoef = -0.5 * p.delta + 0.25 * p.vint;
    const double qcoef = p.vint / (8.0 * static_cast<double>(natoms));
    for (int i = 0; i < dim_; ++i) {
        const double jz = 2.0 * popcount(i) - natoms;
        hdiag_[i] = zcoef * jz + qcoef * jz * jz;
    }
}

Liouvillian build_liouvillian(const SystemParams& p, int natoms, int n_max) {
    return Liouvillian(p, natoms, n_max);
}

void Liouvillian::apply(const cplx* rho, cplx* out) const {
    const int d = dim_;
    const double g = params_.gamma;
    const cplx mi(0.0, -1.0);

    // Diagonal commutator plus the anticommutator of the decay channel, both
    // elementwise in the z basis: popcount counts excited atoms.
    for (int i = 0; i < d; ++i) {
        const double hi = hdiag_[i];
        const double pi_ = popcount(i);
        const cplx* src = rho + static_cast<size_t>(i) * d;
        cplx* dst = out + static_cast<size_t>(i) * d;
        for (int j = 0; j < d; ++j)
            dst[j] = (mi * (hi - hdiag_[j]) - 0.5 * g * (pi_ + popcount(j))) * src[j];
    }

    // Transverse drive: -i (Omega/2) (Jx rho - rho Jx), Jx flips one bit.
    const cplx mo(0.0, -0.5 * params_.omega);
    for (int n = 0; n < natoms_; ++n) {
        const int b = 1 << n;
        for (int i = 0; i < d; ++i) {
            const cplx* left = rho + static_cast<size_t>(i ^ b) * d;
            const cplx* right = rho + static_cast<size_t>(i) * d;
            cplx* dst = out + static_cast<size_t>(i) * d;
            for (int j = 0; j < d; ++j) dst[j] += mo * (left[j] - right[j ^ b]);
        }
    }

    // Jump terms: gamma s- rho s+ moves an excitation out of both indices.
    for (int n = 0; n < natoms_; ++n) {
        const int b = 1 << n;
        for (int i = b; i < d; ++i) {
            if (!(i & b)) continue;
            const cplx* src = rho + static_cast<size_t>(i) * d;
            cplx* dst = out + static_cast<size_t>(i & ~b) * d;
            for (int j = b; j < d; ++j)
                if (j & b) dst[j & ~b] += g * src[j];
        }
    }
}

std::vector<cplx> Liouvillian::apply(const std::vector<cplx>& rho) const {
    std::vector<cplx> out(rho.size());
    apply(rho.data(), out.data());
    return out;
}

std::vector<cplx> Liouvillian::dense() const {
    const size_t d = dim_;
    const size_t dd = d * d;
    std::vector<cplx> l(dd * dd, cplx(0));
    std::vector<cplx> basis(dd, cplx(0)), image(dd);
    for (size_t a = 0; a < d; ++a)
        for (size_t b = 0; b < d; ++b) {
            basis[a * d + b] = 1.0;
            apply(basis.data(), image.data());
            basis[a * d + b] = 0.0;
            const size_t col = a + b * d;  // column-major stacking of rho
            for (size_t r = 0; r < d; ++r)
                for (size_t c = 0; c < d; ++c)
                    l[(r + c * d) * dd + col] = image[r * d + c];
        }
    return l;
}

double Liouvillian::spectral_bound() const {
    const double n = natoms_;
    const double hmax = std::abs(-0.5 * params_.delta + 0.25 * params_.vint) * n +
                        0.5 * params_.omega * n +
                        std::abs(params_.vint) / (8.0 * n) * n * n;
    return 2.0 * (2.0 * hmax) + 2.0 * params_.gamma * n + params_.gamma;
}

namespace {

void hermitize_unit_trace(DensityMatrix& dm) {
    const int d = dm.dim;
    for (int r = 0; r < d; ++r)
        for (int c = r; c < d; ++c) {
            const cplx s = 0.5 * (dm.at(r, c) + std::conj(dm.at(c, r)));
            dm.at(r, c) = s;
            dm.at(c, r) = std::conj(s);
        }
    double tr = 0.0;
    for (int r = 0; r < d; ++r) tr += dm.at(r, r).real();
    if (std::abs(tr) < 1e-300) throw DegenerateSteadyState("steady state has zero trace");
    for (auto& x : dm.rho) x /= tr;
}

DensityMatrix steady_state_svd(const Liouvillian& l) {
    const int d = l.dim();
    const int dd = d * d;
    const SvdResult svd = jacobi_svd(l.dense(), dd);
    const double smax = svd.sigma.front();
    int null_count = 0;
    for (double s : svd.sigma)
        if (s < 1e-10 * smax) ++null_count;
    if (null_count > 1)
        throw DegenerateSteadyState("Liouvillian null space has dimension " +
                                    std::to_string(null_count));

    DensityMatrix dm;
    dm.natoms = l.natoms();
    dm.dim = d;
    dm.rho.resize(static_cast<size_t>(dd));
    // Smallest singular value is last after the descending sort; its right
    // singular vector is the vectorized steady state (column-major stacking).
    const int k = dd - 1;
    for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
            dm.at(a, b) = svd.v_at(a + b * d, k);

    // Fix the arbitrary overall phase first: rotate so the trace is real > 0.
    // The one-dimensional null space is Hermitian up to this phase.
    cplx tr = 0.0;
    for (int r = 0; r < d; ++r) tr += dm.at(r, r);
    if (std::abs(tr) < 1e-8) throw DegenerateSteadyState("null vector is traceless");
    const cplx phase = std::conj(tr) / std::abs(tr);
    for (auto& x : dm.rho) x *= phase;
    if (dm.hermiticity_deviation() > 1e-10)
        throw Error("steady_state: null vector is not Hermitian to 1e-10 before symmetrization");
    hermitize_unit_trace(dm);
    return dm;
}

DensityMatrix relax_from(const Liouvillian& l, std::vector<cplx> rho, double tol,
                         double t_max) {
    const int d = l.dim();
    const size_t dd = static_cast<size_t>(d) * d;
    const double dt = 2.2 / l.spectral_bound();
    const long check_every = std::max<long>(1, std::lround(0.5 / (l.params().gamma * dt)));

    std::vector<cplx> k1(dd), k2(dd), k3(dd), k4(dd), tmp(dd);
    const auto daxpy = simd::daxpy_fn(simd::KernelKind::automatic);
    auto dview = [](std::vector<cplx>& v) { return reinterpret_cast<double*>(v.data()); };
    auto cview = [](const std::vector<cplx>& v) {
        return reinterpret_cast<const double*>(v.data());
    };
    const long n2 = static_cast<long>(2 * dd);

    double t = 0.0;
    long step = 0;
    while (t < t_max) {
        l.apply(rho.data(), k1.data());
        std::memcpy(tmp.data(), rho.data(), dd * sizeof(cplx));
        daxpy(n2, 0.5 * dt, cview(k1), dview(tmp));
        l.apply(tmp.data(), k2.data());
        std::memcpy(tmp.data(), rho.data(), dd * sizeof(cplx));
        daxpy(n2, 0.5 * dt, cview(k2), dview(tmp));
        l.apply(tmp.data(), k3.data());
        std::memcpy(tmp.data(), rho.data(), dd * sizeof(cplx));
        daxpy(n2, dt, cview(k3), dview(tmp));
        l.apply(tmp.data(), k4.data());
        daxpy(n2, dt / 6.0, cview(k1), dview(rho));
        daxpy(n2, dt / 3.0, cview(k2), dview(rho));
        daxpy(n2, dt / 3.0, cview(k3), dview(rho));
        daxpy(n2, dt / 6.0, cview(k4), dview(rho));
        t += dt;
        if (++step % check_every == 0) {
            l.apply(rho.data(), k1.data());
            double res = 0.0;
            for (const auto& x : k1) res = std::max(res, std::abs(x));
            if (res <= tol) break;
        }
    }
    l.apply(rho.data(), k1.data());
    double res = 0.0;
    for (const auto& x : k1) res = std::max(res, std::abs(x));
    if (res > tol)
        throw Error("steady-state relaxation did not converge: residual " +
                    std::to_string(res));

    DensityMatrix dm;
    dm.natoms = l.natoms();
    dm.dim = d;
    dm.rho = std::move(rho);
    hermitize_unit_trace(dm);
    return dm;
}

DensityMatrix steady_state_propagate(const Liouvillian& l) {
    const int d = l.dim();
    const size_t dd = static_cast<size_t>(d) * d;
    const SystemParams& p = l.params();
    const double scale =
        std::max(1.0, (std::abs(p.delta) + p.omega + std::abs(p.vint)) / p.gamma +
                          static_cast<double>(l.natoms()));
    const double tol = 1e-12 * p.gamma * scale;
    const double t_max = 600.0 / p.gamma;

    std::vector<cplx> mixed(dd, cplx(0));
    for (int i = 0; i < d; ++i) mixed[static_cast<size_t>(i) * d + i] = 1.0 / d;
    DensityMatrix a = relax_from(l, std::move(mixed), tol, t_max);

    // Second start from a deterministic pseudo-random pure state; agreement
    // is the uniqueness evidence the dense null-space route gets from the
    // singular spectrum.
    std::uint64_t s = 0x9E3779B97F4A7C15ull ^ (0xD1B54A32D192ED03ull * (l.natoms() + 1));
    std::vector<cplx> psi(d);
    double nrm = 0.0;
    for (int i = 0; i < d; ++i) {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        const double re = static_cast<double>(s >> 12) * 0x1p-51 - 1.0;
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        const double im = static_cast<double>(s >> 12) * 0x1p-51 - 1.0;
        psi[i] = cplx(re, im);
        nrm += std::norm(psi[i]);
    }
    nrm = std::sqrt(nrm);
    std::vector<cplx> pure(dd);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            pure[static_cast<size_t>(i) * d + j] = psi[i] * std::conj(psi[j]) / (nrm * nrm);
    DensityMatrix b = relax_from(l, std::move(pure), tol, t_max);

    double diff = 0.0;
    for (size_t k = 0; k < dd; ++k) diff = std::max(diff, std::abs(a.rho[k] - b.rho[k]));
    if (diff > 1e-9)
        throw DegenerateSteadyState("two relaxation starts disagree by " + std::to_string(diff));
    return a;
}

}  // namespace

DensityMatrix steady_state(const Liouvillian& l, SteadyStateMethod method) {
    if (method == SteadyStateMethod::automatic)
        method = (l.natoms() <= 4) ? SteadyStateMethod::svd : SteadyStateMethod::propagate;
    return method == SteadyStateMethod::svd ? steady_state_svd(l) : steady_state_propagate(l);
}

SpinMoments collective_moments(const DensityMatrix& rho) {
    const int n = rho.natoms;
    const int d = rho.dim;
    const double nn = static_cast<double>(n);
    std::array<std::vector<cplx>, 3> j = {collective_operator(pauli_x(), n),
                                          collective_operator(pauli_y(), n),
                                          collective_operator(pauli_z(), n)};
    SpinMoments out;
    for (int a = 0; a < 3; ++a) {
        const cplx m = trace_product(rho.rho, j[a], d) / nn;
        if (std::abs(m.imag()) > 1e-10)
            throw ImaginaryLeak("collective_moments: mean has imaginary part");
        out.mean[a] = m.real();
    }
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
            const auto ab = mat_mul(j[a], j[b], d);
            const auto ba = mat_mul(j[b], j[a], d);
            std::vector<cplx> sym(ab.size());
            for (size_t k = 0; k < sym.size(); ++k) sym[k] = 0.5 * (ab[k] + ba[k]);
            const cplx second = trace_product(rho.rho, sym, d) / (nn * nn);
            if (std::abs(second.imag()) > 1e-10)
                throw ImaginaryLeak("collective_moments: covariance has imaginary part");
            const double c = second.real() - out.mean[a] * out.mean[b];
            out.cov_at(a, b) = c;
            out.cov_at(b, a) = c;
        }
    return out;
}

double MomentResiduals::max_first_five() const {
    return std::max({jpm, jz, jpm2, jz2, jpjm});
}

MomentResiduals moment_rhs_check(const DensityMatrix& rho, const SystemParams& p) {
    p.validate();
    const int n = rho.natoms;
    const int d = rho.dim;
    const double nn = static_cast<double>(n);
    const double g = p.gamma;
    const cplx i1(0.0, 1.0);

    const Liouvillian l(p, n);
    std::vector<cplx> lrho(rho.rho.size());
    l.apply(rho.rho.data(), lrho.data());

    const auto jp = collective_operator(sigma_plus(), n);
    const auto jm = collective_operator(sigma_minus(), n);
    const auto jz = collective_operator(pauli_z(), n);

    auto ex = [&](const std::vector<cplx>& o) { return trace_product(o, rho.rho, d); };
    auto lhs = [&](const std::vector<cplx>& o) { return trace_product(o, lrho, d); };
    auto sym2 = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        auto ab = mat_mul(a, b, d);
        const auto ba = mat_mul(b, a, d);
        for (size_t k = 0; k < ab.size(); ++k) ab[k] = 0.5 * (ab[k] + ba[k]);
        return ab;
    };
    // <A^2 B>_S = (A^2 B + A B A + B A^2)/3 and the mirrored <A B^2>_S.
    auto sym_a2b = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        const auto aa = mat_mul(a, a, d);
        const auto ab = mat_mul(a, b, d);
        auto r = mat_mul(aa, b, d);
        const auto aba = mat_mul(ab, a, d);
        const auto baa = mat_mul(b, aa, d);
        for (size_t k = 0; k < r.size(); ++k) r[k] = (r[k] + aba[k] + baa[k]) / 3.0;
        return r;
    };
    auto sym_ab2 = [&](const std::vector<cplx>& a, const std::vector<cplx>& b) {
        const auto bb = mat_mul(b, b, d);
        const auto ba = mat_mul(b, a, d);
        auto r = mat_mul(a, bb, d);
        const auto bab = mat_mul(ba, b, d);
        const auto bba = mat_mul(bb, a, d);
        for (size_t k = 0; k < r.size(); ++k) r[k] = (r[k] + bab[k] + bba[k]) / 3.0;
        return r;
    };

    const auto jp2 = mat_mul(jp, jp, d);
    const auto jm2 = mat_mul(jm, jm, d);
    const auto jz2op = mat_mul(jz, jz, d);
    const auto jpjm_s = sym2(jp, jm);
    const auto jpjz_s = sym2(jp, jz);
    const auto jmjz_s = sym2(jm, jz);

    MomentResiduals r;

    for (int sign : {+1, -1}) {
        const auto& js = sign > 0 ? jp : jm;
        const auto& jsjz = sign > 0 ? jpjz_s : jmjz_s;
        const cplx rhs = -i1 * static_cast<double>(sign) *
                             ((p.delta - 0.5 * p.vint) * ex(js) + 0.5 * p.omega * ex(jz) -
                              0.5 * p.vint / nn * ex(jsjz)) -
                         0.5 * g * ex(js);
        r.jpm = std::max(r.jpm, std::abs(lhs(js) - rhs));
    }
    {
        const cplx rhs = -i1 * p.omega * (ex(jp) - ex(jm)) - g * ex(jz) - g * nn;
        r.jz = std::abs(lhs(jz) - rhs);
    }
    for (int sign : {+1, -1}) {
        const auto& js = sign > 0 ? jp : jm;
        const auto& js2 = sign > 0 ? jp2 : jm2;
        const auto& jsjz = sign > 0 ? jpjz_s : jmjz_s;
        const cplx rhs = -i1 * static_cast<double>(sign) *
                             ((2.0 * p.delta - p.vint) * ex(js2) + p.omega * ex(jsjz) -
                              p.vint / nn * ex(sym_a2b(js, jz))) -
                         g * ex(js2);
        r.jpm2 = std::max(r.jpm2, std::abs(lhs(js2) - rhs));
    }
    {
        const cplx rhs = -2.0 * i1 * p.omega * (ex(jpjz_s) - ex(jmjz_s)) - 2.0 * g * ex(jz2op) -
                         2.0 * g * (nn - 1.0) * ex(jz) + 2.0 * g * nn;
        r.jz2 = std::abs(lhs(jz2op) - rhs);
    }
    {
        const cplx rhs = 0.5 * i1 * p.omega * (ex(jpjz_s) - ex(jmjz_s)) - g * ex(jpjm_s) +
                         0.5 * g * nn;
        r.jpjm = std::abs(lhs(jpjm_s) - rhs);
    }
    for (int sign : {+1, -1}) {
        const auto& js = sign > 0 ? jp : jm;
        const auto& js2 = sign > 0 ? jp2 : jm2;
        const auto& jsjz = sign > 0 ? jpjz_s : jmjz_s;
        const cplx rhs =
            -i1 * static_cast<double>(sign) *
                ((p.delta - 0.5 * p.vint) * ex(jsjz) +
                 0.5 * p.omega * (2.0 * ex(js2) + ex(jz2op) - 2.0 * ex(jpjm_s)) -
                 0.5 * p.vint / nn * (ex(sym_ab2(js, jz)) - ex(js) / 3.0)) -
            1.5 * g * ex(jsjz) - g * (nn - 1.0) * ex(js);
        r.jpmjz = std::max(r.jpmjz, std::abs(lhs(jsjz) - rhs));
    }
    return r;
}

SqueezingResult exact_squeezing(const DensityMatrix& rho) {
    return squeezing_parameter(collective_moments(rho), rho.natoms);
}

ConvergenceStudy convergence_study(const SystemParams& p, std::span<const int> n_list,
                                   int n_max) {
    p.validate();
    const BranchSet bs = steady_states(p);
    if (bs.fixed_points.size() != 1 || !bs.fixed_points.front().stable)
        throw InvalidParams(
            "convergence_study: comparison needs a unique stable mean-field branch");
    const FluctuationModel model = make_fluctuation_model(p, bs.fixed_points.front());
    const SpinMoments analytic = covariances_xyz(model);
    const SqueezingResult sq = squeezing_parameter(analytic, p.natoms);

    ConvergenceStudy study;
    study.xi2_analytic = sq.xi2;
    for (int n : n_list) {
        SystemParams pn = p;
        pn.natoms = n;
        const Liouvillian l(pn, n, n_max);
        const DensityMatrix rho = steady_state(l);
        const SpinMoments exact = collective_moments(rho);
        ConvergenceRow row;
        row.natoms = n;
        row.xi2_exact = squeezing_parameter(exact, n).xi2;
        row.xi2_analytic = sq.xi2;
        row.dev_xi2 = std::abs(row.xi2_exact - sq.xi2);
        double dc = 0.0;
        for (int k = 0; k < 9; ++k)
            dc = std::max(dc, std::abs(n * exact.cov[k] - p.natoms * analytic.cov[k]));
        row.dev_ncov = dc;
        study.rows.push_back(row);
    }

    // Least-squares slope of log(dev) against log(N); dev ~ N^-p.
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    int cnt = 0;
    for (const auto& row : study.rows) {
        if (row.dev_xi2 <= 0.0) continue;
        const double x = std::log(static_cast<double>(row.natoms));
        const double y = std::log(row.dev_xi2);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++cnt;
    }
    if (cnt >= 2) {
        const double slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
        study.fitted_exponent = -slope;
    }
    return study;
}

size_t oracle_memory_estimate(int natoms) {
    const size_t d = size_t{1} << natoms;
    const size_t state = d * d * sizeof(cplx);
    if (natoms <= 4) {
        const size_t dd = d * d;
        return 3 * dd * dd * sizeof(cplx);  // dense superoperator + SVD workspace
    }
    return 8 * state;  // RK4 stage buffers
}

}  // namespace dtfim
