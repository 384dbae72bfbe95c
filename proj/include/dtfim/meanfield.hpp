#pragma once

#include <vector>

#include "dtfim/mat3.hpp"
#include "dtfim/types.hpp"

namespace dtfim {

/// One axis of a parameter sweep.
struct SweepSpec {
    enum class Axis { delta, omega, vint };
    Axis axis = Axis::delta;
    double lo = 0.0;
    double hi = 0.0;
    int steps = 2;

    /// Sweep value at grid index i (endpoints included).
    double value_at(int i) const;
    /// Copy of `base` with the swept field replaced by x.
    SystemParams apply(const SystemParams& base, double x) const;
};

SweepSpec::Axis axis_from_string(const std::string& s);
const char* to_string(SweepSpec::Axis axis);

/// Coefficients (c3, c2, c1, c0) of the steady-state inversion cubic
/// c3 m^3 + c2 m^2 + c1 m + c0 = 0.
std::array<double, 4> cubic_coefficients(const SystemParams& p);

/// Relative residual |p(m)| / scale of the cubic at m.
double cubic_residual(const std::array<double, 4>& c, double m);

/// All physical steady states (m in [-1, 0]) with stability classification,
/// ordered by ascending m. Roots come from the companion-matrix eigenvalues
/// followed by a Newton polish; the V = 0 degenerate case reduces the degree
/// explicitly.
BranchSet steady_states(const SystemParams& p);

/// Drift Jacobian of the mean-field flow, evaluated at an arbitrary state in
/// the (v, v*, m) basis.
Mat3 jacobian(const SystemParams& p, const MeanFieldState& s);

struct Trajectory {
    std::vector<double> t;
    std::vector<MeanFieldState> state;
    double max_ball_excess = 0.0;  ///< max over the path of 4|v|^2 + m^2 - 1

    const MeanFieldState& back() const { return state.back(); }
};

/// Fixed-step RK4 integration of the mean-field equations. Only v and m are
/// integrated; v* is the conjugate by construction.
Trajectory integrate_meanfield(const SystemParams& p, const MeanFieldState& init,
                               double t_final, double dt = 1e-3);

/// Branch structure along a sweep. Errors at single points are recorded as
/// empty BranchSets rather than aborting the scan.
std::vector<BranchSet> scan_bifurcation(const SystemParams& p, const SweepSpec& sweep);

/// Saddle-node locations inside [sweep.lo, sweep.hi], found by bisection on
/// sign changes of the cubic discriminant and refined to 1e-10 * gamma.
/// Empty when the cubic never degenerates (no bistability).
std::vector<double> critical_points(const SystemParams& p, const SweepSpec& sweep);

/// Fixed point of the merging pair at a critical parameter value: the double
/// root, taken from the cubic's derivative where it is well conditioned.
/// det(jacobian) vanishes here.
FixedPoint critical_fixed_point(const SystemParams& p_at_critical);

/// Steady-state inversion of the P-representation drift, which renormalizes
/// the detuning with (m + 1 + 1/N) instead of (m + 1). Returns the root
/// continuously connected to the given Wigner branch.
double p_drift_steady_state(const SystemParams& p, long natoms,
                            BranchLabel follow = BranchLabel::lower);

}  // namespace dtfim
