#include "dtfim/squeezing.hpp"

#include <cmath>
#include <limits>

#include "dtfim/parallel.hpp"

namespace dtfim {

std::pair<double, double> bloch_angles(const RVec3& mean) {
    const double r = norm(mean);
    if (r < 1e-14) throw ZeroBlochVector("bloch_angles: |mean| < 1e-14");
    const double theta = std::acos(std::clamp(mean[2] / r, -1.0, 1.0));
    const double phi = (mean[0] == 0.0 && mean[1] == 0.0) ? 0.0 : std::atan2(mean[1], mean[0]);
    return {theta, phi};
}

SqueezingResult squeezing_parameter(const SpinMoments& moments, long natoms) {
    if (natoms < 1) throw InvalidParams("squeezing_parameter: natoms must be >= 1");
    SqueezingResult res;
    const double r = norm(moments.mean);
    if (r < 1e-14) {
        // Fully mixed mean-field point (saturation limit): no Bloch frame
        // exists, span the x-y plane by convention.
        res.zero_bloch = true;
        res.theta = 0.0;
        res.phi = 0.0;
        res.n1 = {1.0, 0.0, 0.0};
        res.n2 = {0.0, 1.0, 0.0};
    } else {
        auto [theta, phi] = bloch_angles(moments.mean);
        res.theta = theta;
        res.phi = phi;
        res.n1 = {-std::sin(phi), std::cos(phi), 0.0};
        res.n2 = {std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi),
                  -std::sin(theta)};
    }

    RMat3 cov;
    for (int k = 0; k < 9; ++k) cov.a[k] = moments.cov[k];
    const RVec3 c1 = mul(cov, res.n1);
    const RVec3 c2 = mul(cov, res.n2);
    const double s11 = dot(res.n1, c1);
    const double s22 = dot(res.n2, c2);
    const double s12 = dot(res.n1, c2);

    const double n = static_cast<double>(natoms);
    const double root = std::hypot(s11 - s22, 2.0 * s12);
    res.xi2 = std::max(0.0, 0.5 * n * ((s11 + s22) - root));
    res.minimizing_angle = 0.5 * std::atan2(-2.0 * s12, -(s11 - s22));
    return res;
}

std::vector<SqueezingRow> squeezing_scan(const SystemParams& p, const SweepSpec& sweep) {
    std::vector<SqueezingRow> out;
    for (const auto& ev : evaluate_sweep(p, sweep)) {
        if (!ev.fixed_point.stable) continue;
        SqueezingRow row;
        row.sweep_value = ev.sweep_value;
        row.branch = ev.fixed_point.branch;
        row.flags = ev.flags;
        if (ev.has_model && !(ev.flags & kFlagNearCritical)) {
            const SqueezingResult sq = squeezing_parameter(covariances_xyz(ev.model), ev.model.natoms);
            row.xi2 = sq.xi2;
            if (sq.zero_bloch) row.flags |= kFlagZeroBloch;
        } else {
            row.xi2 = std::numeric_limits<double>::quiet_NaN();
        }
        out.push_back(row);
    }
    return out;
}

std::vector<MapCell> squeezing_map(const SystemParams& p, const MapSpec& grid) {
    p.validate();
    if (grid.v_steps < 2 || grid.omega_steps < 2)
        throw InvalidParams("squeezing_map: grid must be at least 2x2");
    std::vector<MapCell> cells(static_cast<size_t>(grid.v_steps) * grid.omega_steps);
    parallel_for(static_cast<long>(cells.size()), [&](long k) {
        const int iv = static_cast<int>(k) / grid.omega_steps;
        const int io = static_cast<int>(k) % grid.omega_steps;
        MapCell& cell = cells[k];
        cell.vint = grid.v_lo + (grid.v_hi - grid.v_lo) * iv / (grid.v_steps - 1);
        cell.omega =
            grid.omega_lo + (grid.omega_hi - grid.omega_lo) * io / (grid.omega_steps - 1);
        SystemParams pi = p;
        pi.vint = cell.vint;
        pi.omega = cell.omega;
        try {
            const BranchSet bs = steady_states(pi);
            if (bs.fixed_points.size() != 1) cell.flags |= kFlagNotUnique;
            const FixedPoint* fp = nullptr;
            for (const auto& f : bs.fixed_points)
                if (f.stable && !fp) fp = &f;
            if (!fp) {
                cell.flags |= kFlagNoStable;
                cell.xi2 = std::numeric_limits<double>::quiet_NaN();
            } else {
                const FluctuationModel mod = make_fluctuation_model(pi, *fp);
                if (mod.near_critical) cell.flags |= kFlagNearCritical;
                const SqueezingResult sq = squeezing_parameter(covariances_xyz(mod), pi.natoms);
                cell.xi2 = sq.xi2;
                if (sq.zero_bloch) cell.flags |= kFlagZeroBloch;
            }
        } catch (const Error&) {
            cell.flags |= kFlagLyapunov;
            cell.xi2 = std::numeric_limits<double>::quiet_NaN();
        }
    });
    return cells;
}

}  // namespace dtfim
