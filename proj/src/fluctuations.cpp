#include "dtfim/fluctuations.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include "dtfim/smalleig.hpp"

namespace dtfim {

std::string flags_to_string(unsigned flags) {
    if (flags == kFlagOk) return "ok";
    std::string s;
    auto add = [&](const char* name) {
        if (!s.empty()) s += '+';
        s += name;
    };
    if (flags & kFlagNearCritical) add("near_critical");
    if (flags & kFlagNoStable) add("no_stable");
    if (flags & kFlagNotUnique) add("not_unique");
    if (flags & kFlagZeroBloch) add("zero_bloch");
    if (flags & kFlagLyapunov) add("lyapunov_failed");
    if (flags & kFlagSolverError) add("solver_error");
    return s;
}

double FluctuationModel::lyapunov_residual() const {
    return (a * c + c * a.transpose() + d).max_abs();
}

Mat3 diffusion_matrix(const SystemParams& p, const FixedPoint& fp) {
    p.validate();
    const double g = p.gamma;
    const double invn = 1.0 / static_cast<double>(p.natoms);
    const cplx v = fp.state.v;
    Mat3 d;
    d(0, 0) = 0.0;
    d(0, 1) = 0.5 * g;
    d(0, 2) = g * v;
    d(1, 0) = 0.5 * g;
    d(1, 1) = 0.0;
    d(1, 2) = g * std::conj(v);
    d(2, 0) = g * v;
    d(2, 1) = g * std::conj(v);
    d(2, 2) = 2.0 * g * (fp.state.m + 1.0);
    return invn * d;
}

Mat3 solve_lyapunov(const Mat3& a, const Mat3& d) {
    // Column-major vec: vec(A C) = (I (x) A) vec(C), vec(C A^T) = (A (x) I) vec(C).
    std::vector<cplx> m(81, cplx(0));
    auto midx = [](int r, int c) { return static_cast<size_t>(r) * 9 + c; };
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) {
                // (I (x) A): block diagonal with A; row (j*3+i), col (j*3+k) += A(i,k)
                m[midx(j * 3 + i, j * 3 + k)] += a(i, k);
                // (A (x) I): row (j*3+i), col (k*3+i) += A(j,k)
                m[midx(j * 3 + i, k * 3 + i)] += a(j, k);
            }
    std::vector<cplx> rhs(9);
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) rhs[c * 3 + r] = -d(r, c);
    lu_solve(m, 9, rhs);
    Mat3 out;
    for (int c = 0; c < 3; ++c)
        for (int r = 0; r < 3; ++r) out(r, c) = rhs[c * 3 + r];
    // Exact symmetrization: the solution is complex symmetric by structure.
    for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c) {
            const cplx s = 0.5 * (out(r, c) + out(c, r));
            out(r, c) = out(c, r) = s;
        }
    return out;
}

FluctuationModel make_fluctuation_model(const SystemParams& p, const FixedPoint& fp) {
    FluctuationModel mod;
    mod.fixed_point = fp;
    mod.natoms = p.natoms;
    mod.a = jacobian(p, fp.state);
    mod.d = diffusion_matrix(p, fp);
    const double g3 = p.gamma * p.gamma * p.gamma;
    mod.near_critical = std::abs(det3(mod.a)) < 1e-8 * g3;
    mod.c = solve_lyapunov(mod.a, mod.d);
    return mod;
}

SpinMoments covariances_xyz(const FluctuationModel& model) {
    const cplx v = model.fixed_point.state.v;
    const double m = model.fixed_point.state.m;
    const Mat3& c = model.c;

    const cplx c11 = c(0, 0), c12 = c(0, 1), c13 = c(0, 2);
    const cplx c22 = c(1, 1), c23 = c(1, 2), c33 = c(2, 2);
    const cplx i(0.0, 1.0);

    // <Jx> = <J+> + <J->, <Jy> = -i(<J+> - <J->); second moments per the same
    // linear relations applied to central symmetric-ordered moments.
    std::array<cplx, 9> cov{};
    cov[0] = c22 + c11 + 2.0 * c12;        // xx
    cov[4] = -c22 - c11 + 2.0 * c12;       // yy
    cov[8] = c33;                          // zz
    cov[1] = cov[3] = -i * (c22 - c11);    // xy
    cov[2] = cov[6] = c23 + c13;           // xz
    cov[5] = cov[7] = -i * (c23 - c13);    // yz

    SpinMoments out;
    out.mean = {2.0 * v.real(), -2.0 * v.imag(), m};
    for (int k = 0; k < 9; ++k) {
        if (std::abs(cov[k].imag()) > 1e-10)
            throw ImaginaryLeak("covariances_xyz: conjugation structure violated upstream");
        out.cov[k] = cov[k].real();
    }
    return out;
}

namespace {

// T maps (v~, v~*, m~) to (x, y, m~): rows (1, 1, 0), (-i, i, 0), (0, 0, 1).
const Mat3& transform_t() {
    static const Mat3 t = [] {
        Mat3 m;
        m(0, 0) = 1.0;
        m(0, 1) = 1.0;
        m(1, 0) = cplx(0.0, -1.0);
        m(1, 1) = cplx(0.0, 1.0);
        m(2, 2) = 1.0;
        return m;
    }();
    return t;
}

const Mat3& transform_t_inv() {
    static const Mat3 ti = [] {
        Mat3 m;
        m(0, 0) = 0.5;
        m(0, 1) = cplx(0.0, 0.5);
        m(1, 0) = 0.5;
        m(1, 1) = cplx(0.0, -0.5);
        m(2, 2) = 1.0;
        return m;
    }();
    return ti;
}

RMat3 real_part_checked(const Mat3& m, const char* what) {
    RMat3 r;
    for (int k = 0; k < 9; ++k) {
        if (std::abs(m.a[k].imag()) > 1e-10)
            throw ImaginaryLeak(std::string(what) + ": residual imaginary part");
        r.a[k] = m.a[k].real();
    }
    return r;
}

}  // namespace

RMat3 drift_real_basis(const Mat3& a) {
    return real_part_checked(transform_t() * a * transform_t_inv(), "drift_real_basis");
}

RMat3 moment_real_basis(const Mat3& m) {
    return real_part_checked(transform_t() * m * transform_t().transpose(), "moment_real_basis");
}

double OuSample::standard_error(int i, int j) const {
    const double cii = cov(i, i), cjj = cov(j, j), cij = cov(i, j);
    return std::sqrt((cii * cjj + cij * cij) / static_cast<double>(n_paths));
}

OuSample sample_ou(const Mat3& a, const Mat3& d, long n_paths, double dt, double t_final,
                   std::uint64_t seed, simd::KernelKind kind) {
    if (n_paths < 2 || !(dt > 0.0) || !(t_final >= dt) || !std::isfinite(t_final))
        throw InvalidParams("sample_ou: need n_paths >= 2, dt > 0, finite t_final >= dt");

    const RMat3 ar = drift_real_basis(a);
    const RMat3 dr = moment_real_basis(d);

    // Noise factor B with B B^T = D_real; clip eigenvalue dust at zero.
    RVec3 w;
    RMat3 u;
    sym_eigen3(dr, w, u);
    double clipped = 0.0, trace = dr(0, 0) + dr(1, 1) + dr(2, 2);
    RMat3 b{};
    for (int k = 0; k < 3; ++k) {
        if (w[k] < 0.0) {
            clipped -= w[k];
            w[k] = 0.0;
        }
        const double s = std::sqrt(w[k]);
        for (int r = 0; r < 3; ++r) b(r, k) = u(r, k) * s;
    }
    if (clipped > 1e-10 * std::max(trace, 1e-300))
        throw NotPSD("sample_ou: diffusion matrix is not positive semidefinite");

    simd::OuPathArgs args;
    for (int k = 0; k < 9; ++k) {
        args.a[k] = ar.a[k];
        args.b[k] = b.a[k];
    }
    args.dt = dt;
    args.n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-12));
    args.seed = seed;

    const simd::KernelKind resolved = simd::resolve_kernel(kind);
    const auto kernel = simd::ou_paths_fn(resolved);

    std::vector<double> finals(static_cast<size_t>(n_paths) * 3);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const long chunk = std::max<long>(4096, (n_paths + hw - 1) / hw);
    if (n_paths > chunk) {
        std::vector<std::thread> pool;
        for (long begin = 0; begin < n_paths; begin += chunk) {
            const long end = std::min(n_paths, begin + chunk);
            pool.emplace_back([&, begin, end] {
                kernel(args, begin, end, finals.data() + 3 * begin);
            });
        }
        for (auto& t : pool) t.join();
    } else {
        kernel(args, 0, n_paths, finals.data());
    }

    // Accumulate in fixed path order so the result is thread-count invariant.
    OuSample out;
    out.n_paths = n_paths;
    out.dt = dt;
    out.t_final = t_final;
    out.kernel = resolved;
    RVec3 sum{};
    for (long p = 0; p < n_paths; ++p)
        for (int k = 0; k < 3; ++k) sum[k] += finals[3 * p + k];
    for (int k = 0; k < 3; ++k) out.mean[k] = sum[k] / static_cast<double>(n_paths);
    RMat3 acc{};
    for (long p = 0; p < n_paths; ++p) {
        const double* z = finals.data() + 3 * p;
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c)
                acc(r, c) += (z[r] - out.mean[r]) * (z[c] - out.mean[c]);
    }
    for (int r = 0; r < 3; ++r)
        for (int c = r; c < 3; ++c) {
            const double v = acc(r, c) / static_cast<double>(n_paths - 1);
            out.cov(r, c) = v;
            out.cov(c, r) = v;
        }
    return out;
}

std::vector<BranchEval> evaluate_sweep(const SystemParams& p, const SweepSpec& sweep) {
    const auto sets = scan_bifurcation(p, sweep);
    std::vector<BranchEval> rows;
    for (int i = 0; i < sweep.steps; ++i) {
        const double x = sweep.value_at(i);
        const SystemParams pi = sweep.apply(p, x);
        const BranchSet& bs = sets[i];
        if (bs.fixed_points.empty()) {
            // steady_states failed here; keep a placeholder so the point is
            // visible in the output rather than silently dropped.
            BranchEval row;
            row.sweep_value = x;
            row.flags = kFlagSolverError;
            rows.push_back(std::move(row));
            continue;
        }
        const bool any_stable =
            std::any_of(bs.fixed_points.begin(), bs.fixed_points.end(),
                        [](const FixedPoint& f) { return f.stable; });
        for (const auto& fp : bs.fixed_points) {
            BranchEval row;
            row.sweep_value = x;
            row.fixed_point = fp;
            if (!any_stable) row.flags |= kFlagNoStable;
            if (fp.stable) {
                try {
                    row.model = make_fluctuation_model(pi, fp);
                    row.has_model = true;
                    if (row.model.near_critical) row.flags |= kFlagNearCritical;
                } catch (const SingularLyapunov&) {
                    row.flags |= kFlagLyapunov | kFlagNearCritical;
                }
            }
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

std::vector<CorrelationRow> correlation_scan(const SystemParams& p, const SweepSpec& sweep) {
    std::vector<CorrelationRow> out;
    for (const auto& ev : evaluate_sweep(p, sweep)) {
        if (!ev.fixed_point.stable) continue;
        CorrelationRow row;
        row.sweep_value = ev.sweep_value;
        row.branch = ev.fixed_point.branch;
        row.flags = ev.flags;
        if (ev.has_model) {
            const double n = static_cast<double>(ev.model.natoms);
            row.n_var_jz = n * ev.model.c(2, 2).real();
            row.n_cov_jpjm = n * ev.model.c(0, 1).real();
        } else {
            row.n_var_jz = row.n_cov_jpjm = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace dtfim
