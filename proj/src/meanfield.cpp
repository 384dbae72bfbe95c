#include "dtfim/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dtfim/parallel.hpp"
#include "dtfim/smalleig.hpp"

namespace dtfim {

void SystemParams::validate() const {
    const bool finite = std::isfinite(delta) && std::isfinite(omega) &&
                        std::isfinite(vint) && std::isfinite(gamma);
    if (!finite) throw InvalidParams("system parameters must be finite");
    if (gamma <= 0.0) throw InvalidParams("gamma must be positive");
    if (natoms < 1) throw InvalidParams("natoms must be >= 1");
}

const char* to_string(BranchLabel label) {
    switch (label) {
        case BranchLabel::lower: return "lower";
        case BranchLabel::middle: return "middle";
        case BranchLabel::upper: return "upper";
    }
    return "?";
}

const FixedPoint* BranchSet::stable_branch(BranchLabel label) const {
    for (const auto& fp : fixed_points)
        if (fp.branch == label && fp.stable) return &fp;
    return nullptr;
}

double SweepSpec::value_at(int i) const {
    if (steps < 2) return lo;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
}

SystemParams SweepSpec::apply(const SystemParams& base, double x) const {
    SystemParams p = base;
    switch (axis) {
        case Axis::delta: p.delta = x; break;
        case Axis::omega: p.omega = x; break;
        case Axis::vint: p.vint = x; break;
    }
    return p;
}

SweepSpec::Axis axis_from_string(const std::string& s) {
    if (s == "delta") return SweepSpec::Axis::delta;
    if (s == "omega") return SweepSpec::Axis::omega;
    if (s == "vint") return SweepSpec::Axis::vint;
    throw InvalidParams("unknown sweep axis '" + s + "' (expected delta|omega|vint)");
}

const char* to_string(SweepSpec::Axis axis) {
    switch (axis) {
        case SweepSpec::Axis::delta: return "delta";
        case SweepSpec::Axis::omega: return "omega";
        case SweepSpec::Axis::vint: return "vint";
    }
    return "?";
}

std::array<double, 4> cubic_coefficients(const SystemParams& p) {
    p.validate();
    const double d = p.delta, o = p.omega, v = p.vint, g = p.gamma;
    return {v * v,
            v * (3.0 * v - 4.0 * d),
            4.0 * d * d + g * g - 8.0 * d * v + 3.0 * v * v + 2.0 * o * o,
            g * g + (v - 2.0 * d) * (v - 2.0 * d)};
}

double cubic_residual(const std::array<double, 4>& c, double m) {
    const double pm = ((c[0] * m + c[1]) * m + c[2]) * m + c[3];
    double scale = 0.0;
    for (double x : c) scale = std::max(scale, std::abs(x));
    return std::abs(pm) / (scale > 0.0 ? scale : 1.0);
}

namespace {

// Real roots of the steady-state polynomial, unpolished. V = 0 collapses the
// cubic to degree one; that case is reduced exactly instead of perturbed.
std::vector<double> physical_roots(const SystemParams& p, std::vector<cplx>* raw = nullptr) {
    const auto c = cubic_coefficients(p);
    std::vector<cplx> roots;
    if (p.vint == 0.0) {
        roots.push_back(-c[3] / c[2]);  // c2 > 0 always: gamma^2 + ... + 2 Omega^2
    } else {
        // Companion matrix of the monic cubic; already upper Hessenberg.
        const double a2 = c[1] / c[0], a1 = c[2] / c[0], a0 = c[3] / c[0];
        Mat3 comp;
        comp(0, 0) = 0.0; comp(0, 1) = 0.0; comp(0, 2) = -a0;
        comp(1, 0) = 1.0; comp(1, 1) = 0.0; comp(1, 2) = -a1;
        comp(2, 0) = 0.0; comp(2, 1) = 1.0; comp(2, 2) = -a2;
        auto ev = eigenvalues3(comp);
        roots.assign(ev.begin(), ev.end());
    }
    if (raw) *raw = roots;

    std::vector<double> ms;
    for (const auto& r : roots) {
        if (std::abs(r.imag()) > 1e-8) continue;
        double m = r.real();
        if (m < -1.0 - 1e-8 || m > 1e-8) continue;
        // Newton polish on the real cubic; companion eigenvalues carry a few
        // ulps of drift that the residual gate below would reject.
        for (int it = 0; it < 4; ++it) {
            const double f = ((c[0] * m + c[1]) * m + c[2]) * m + c[3];
            const double fp = (3.0 * c[0] * m + 2.0 * c[1]) * m + c[2];
            if (fp == 0.0) break;
            const double step = f / fp;
            m -= step;
            if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(m))) break;
        }
        m = std::clamp(m, -1.0, 0.0);
        ms.push_back(m);
    }
    std::sort(ms.begin(), ms.end());
    // Merge duplicates the companion solve may produce at a double root.
    ms.erase(std::unique(ms.begin(), ms.end(),
                         [](double x, double y) { return std::abs(x - y) < 1e-12; }),
             ms.end());
    return ms;
}

cplx vss_from_m(const SystemParams& p, double m) {
    const cplx denom(-p.gamma, 2.0 * p.delta - p.vint * (m + 1.0));
    if (std::abs(denom) < 1e-14)
        throw DegenerateDenominator("v_ss denominator vanished; parameters invalid");
    return cplx(0.0, -p.omega * m) / denom;
}

BranchLabel label_for(size_t index, size_t count, double m) {
    if (count == 3) {
        return index == 0 ? BranchLabel::lower
                          : (index == 1 ? BranchLabel::middle : BranchLabel::upper);
    }
    // Single root: classify by excitation so labels track the surviving
    // branch across the edges of a bistable window.
    return m <= -0.5 ? BranchLabel::lower : BranchLabel::upper;
}

FixedPoint classify(const SystemParams& p, double m, BranchLabel label) {
    FixedPoint fp;
    fp.state.m = m;
    fp.state.v = vss_from_m(p, m);
    fp.branch = label;
    const Mat3 a = jacobian(p, fp.state);
    fp.eigenvalues = eigenvalues3(a);
    double max_re = -std::numeric_limits<double>::infinity();
    for (const auto& e : fp.eigenvalues) max_re = std::max(max_re, e.real());
    fp.stable = max_re < -1e-12;
    fp.marginal = std::abs(max_re) <= 1e-12;
    return fp;
}

double discriminant(const std::array<double, 4>& c) {
    const double a = c[0], b = c[1], cc = c[2], d = c[3];
    return 18.0 * a * b * cc * d - 4.0 * b * b * b * d + b * b * cc * cc -
           4.0 * a * cc * cc * cc - 27.0 * a * a * d * d;
}

}  // namespace

BranchSet steady_states(const SystemParams& p) {
    p.validate();
    std::vector<cplx> raw;
    const auto ms = physical_roots(p, &raw);
    if (ms.empty()) {
        std::string msg = "no physical root in [-1, 0]; raw roots:";
        char buf[64];
        for (const auto& r : raw) {
            std::snprintf(buf, sizeof buf, " (%.6g%+.6gi)", r.real(), r.imag());
            msg += buf;
        }
        throw NoPhysicalRoot(msg);
    }
    BranchSet out;
    out.params = p;
    for (size_t i = 0; i < ms.size(); ++i)
        out.fixed_points.push_back(classify(p, ms[i], label_for(i, ms.size(), ms[i])));
    return out;
}

Mat3 jacobian(const SystemParams& p, const MeanFieldState& s) {
    if (!std::isfinite(s.m) || !std::isfinite(s.v.real()) || !std::isfinite(s.v.imag()))
        throw NonFinite("jacobian: state not finite");
    const double det_eff = p.delta - 0.5 * p.vint * (s.m + 1.0);
    const cplx i(0.0, 1.0);
    Mat3 a;
    a(0, 0) = i * det_eff - 0.5 * p.gamma;
    a(0, 1) = 0.0;
    a(0, 2) = 0.5 * i * (p.omega - p.vint * s.v);
    a(1, 0) = 0.0;
    a(1, 1) = -i * det_eff - 0.5 * p.gamma;
    a(1, 2) = -0.5 * i * (p.omega - p.vint * std::conj(s.v));
    a(2, 0) = i * p.omega;
    a(2, 1) = -i * p.omega;
    a(2, 2) = -p.gamma;
    return a;
}

namespace {

struct Deriv {
    cplx dv;
    double dm;
};

Deriv mf_rhs(const SystemParams& p, const cplx v, const double m) {
    const cplx i(0.0, 1.0);
    const double det_eff = p.delta - 0.5 * p.vint * (m + 1.0);
    Deriv d;
    d.dv = i * det_eff * v + 0.5 * i * p.omega * m - 0.5 * p.gamma * v;
    // i Omega (v - v*) = -2 Omega Im(v), real by construction.
    d.dm = -2.0 * p.omega * v.imag() - p.gamma * (m + 1.0);
    return d;
}

}  // namespace

Trajectory integrate_meanfield(const SystemParams& p, const MeanFieldState& init,
                               double t_final, double dt) {
    p.validate();
    if (!(dt > 0.0) || t_final < dt)
        throw InvalidParams("integrate_meanfield: need dt > 0 and t_final >= dt");

    const long nsteps = static_cast<long>(std::ceil(t_final / dt - 1e-12));
    Trajectory traj;
    traj.t.reserve(nsteps + 1);
    traj.state.reserve(nsteps + 1);

    cplx v = init.v;
    double m = init.m;
    traj.t.push_back(0.0);
    traj.state.push_back(init);
    traj.max_ball_excess = init.bloch_norm2() - 1.0;

    for (long k = 0; k < nsteps; ++k) {
        const double h = std::min(dt, t_final - static_cast<double>(k) * dt);
        const Deriv k1 = mf_rhs(p, v, m);
        const Deriv k2 = mf_rhs(p, v + 0.5 * h * k1.dv, m + 0.5 * h * k1.dm);
        const Deriv k3 = mf_rhs(p, v + 0.5 * h * k2.dv, m + 0.5 * h * k2.dm);
        const Deriv k4 = mf_rhs(p, v + h * k3.dv, m + h * k3.dm);
        v += (h / 6.0) * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv);
        m += (h / 6.0) * (k1.dm + 2.0 * k2.dm + 2.0 * k3.dm + k4.dm);
        if (!std::isfinite(m) || !std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw NonFinite("integrate_meanfield: state diverged");
        MeanFieldState s{v, m};
        traj.max_ball_excess = std::max(traj.max_ball_excess, s.bloch_norm2() - 1.0);
        traj.t.push_back(std::min(static_cast<double>(k + 1) * dt, t_final));
        traj.state.push_back(s);
    }
    return traj;
}

std::vector<BranchSet> scan_bifurcation(const SystemParams& p, const SweepSpec& sweep) {
    p.validate();
    if (sweep.steps < 2) throw InvalidParams("sweep needs at least 2 steps");
    std::vector<BranchSet> out(sweep.steps);
    parallel_for(sweep.steps, [&](long i) {
        const SystemParams pi = sweep.apply(p, sweep.value_at(static_cast<int>(i)));
        try {
            out[i] = steady_states(pi);
        } catch (const Error&) {
            out[i].params = pi;  // flagged point: no fixed points recorded
        }
    });
    return out;
}

std::vector<double> critical_points(const SystemParams& p, const SweepSpec& sweep) {
    p.validate();
    const int coarse = std::max(sweep.steps, 2048);
    auto disc_at = [&](double x) { return discriminant(cubic_coefficients(sweep.apply(p, x))); };

    std::vector<double> found;
    double x_prev = sweep.lo + (sweep.hi - sweep.lo) * 0.0;
    double d_prev = disc_at(x_prev);
    for (int i = 1; i < coarse; ++i) {
        const double x = sweep.lo + (sweep.hi - sweep.lo) * static_cast<double>(i) /
                                        static_cast<double>(coarse - 1);
        const double d = disc_at(x);
        if ((d_prev < 0.0) != (d < 0.0)) {
            double a = x_prev, b = x, da = d_prev;
            while (b - a > 1e-10 * p.gamma) {
                const double mid = 0.5 * (a + b);
                const double dm = disc_at(mid);
                if ((dm < 0.0) == (da < 0.0)) {
                    a = mid;
                    da = dm;
                } else {
                    b = mid;
                }
            }
            found.push_back(0.5 * (a + b));
        }
        x_prev = x;
        d_prev = d;
    }
    // Consistency against the Jacobian: the merging root must sit where the
    // linearized drift degenerates.
    for (const double xc : found) {
        const SystemParams pc = sweep.apply(p, xc);
        const FixedPoint fp = critical_fixed_point(pc);
        const double g3 = p.gamma * p.gamma * p.gamma;
        if (std::abs(det3(jacobian(pc, fp.state))) > 1e-6 * g3)
            throw Error("critical_points: det(A) does not vanish at a reported saddle-node");
    }
    return found;
}

FixedPoint critical_fixed_point(const SystemParams& p_at_critical) {
    // At a saddle-node the merging pair is a double root, i.e. also a root of
    // the derivative quadratic; that root is far better conditioned than the
    // nearly merged pair itself.
    const auto c = cubic_coefficients(p_at_critical);
    const double a = 3.0 * c[0], b = 2.0 * c[1], cc = c[2];
    const double disc = b * b - 4.0 * a * cc;
    if (a == 0.0 || disc < 0.0)
        throw NoPhysicalRoot("critical_fixed_point: derivative has no real root");
    const double sq = std::sqrt(disc);
    const double q = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    const double r1 = q / a, r2 = cc / q;
    // Pick the derivative root that best satisfies the cubic itself.
    const double m = (cubic_residual(c, r1) < cubic_residual(c, r2)) ? r1 : r2;
    FixedPoint fp;
    fp.state.m = std::clamp(m, -1.0, 0.0);
    fp.state.v = vss_from_m(p_at_critical, fp.state.m);
    fp.branch = BranchLabel::middle;
    fp.eigenvalues = eigenvalues3(jacobian(p_at_critical, fp.state));
    fp.stable = false;
    fp.marginal = true;
    return fp;
}

double p_drift_steady_state(const SystemParams& p, long natoms, BranchLabel follow) {
    p.validate();
    if (natoms < 1) throw InvalidParams("p_drift_steady_state: natoms must be >= 1");
    const BranchSet wigner = steady_states(p);
    const FixedPoint* ref = nullptr;
    for (const auto& fp : wigner.fixed_points)
        if (fp.branch == follow) ref = &fp;
    if (!ref) ref = &wigner.fixed_points.front();

    SystemParams shifted = p;
    shifted.delta -= p.vint / (2.0 * static_cast<double>(natoms));
    const BranchSet prep = steady_states(shifted);
    // Continuity: nearest root to the selected Wigner branch.
    double best = prep.fixed_points.front().state.m;
    for (const auto& fp : prep.fixed_points)
        if (std::abs(fp.state.m - ref->state.m) < std::abs(best - ref->state.m))
            best = fp.state.m;
    return best;
}

}  // namespace dtfim
