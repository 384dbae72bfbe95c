#pragma once

#include <array>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace dtfim {

using cplx = std::complex<double>;

/// Physical parameters of the driven-dissipative ensemble. All rates are
/// interpreted in units of the decay rate gamma; gamma itself is kept as an
/// explicit parameter so that dimensionful inputs also work.
struct SystemParams {
    double delta = 0.0;   ///< laser detuning
    double omega = 0.0;   ///< Rabi frequency of the drive
    double vint = 0.0;    ///< infinite-range Ising interaction strength
    double gamma = 1.0;   ///< single-atom spontaneous-emission rate (> 0)
    long natoms = 100;    ///< ensemble size N (ignored by mean-field operations)

    /// Throws InvalidParams unless gamma > 0, natoms >= 1 and all fields are finite.
    void validate() const;
};

/// Per-atom Bloch variables: v = <sigma_->, m = <sigma_z>.
/// The conjugate amplitude v* is reconstructed, never stored.
struct MeanFieldState {
    cplx v{0.0, 0.0};
    double m = -1.0;

    /// 4|v|^2 + m^2, which is <= 1 for any physical single-atom state.
    double bloch_norm2() const { return 4.0 * std::norm(v) + m * m; }
};

enum class BranchLabel { lower, middle, upper };

const char* to_string(BranchLabel label);

/// A mean-field steady state together with its linear stability data.
struct FixedPoint {
    MeanFieldState state;
    std::array<cplx, 3> eigenvalues{};  ///< spectrum of the drift Jacobian
    bool stable = false;                ///< max Re(eig) < -1e-12
    bool marginal = false;              ///< max Re(eig) within +-1e-12 of zero
    BranchLabel branch = BranchLabel::lower;
};

/// All physical fixed points at one parameter set, ordered by ascending m.
struct BranchSet {
    SystemParams params;
    std::vector<FixedPoint> fixed_points;

    bool bistable() const { return fixed_points.size() == 3; }
    /// Pointer to the stable fixed point with the given label, or nullptr.
    const FixedPoint* stable_branch(BranchLabel label) const;
};

/// Real means and symmetric-ordered central second moments of the scaled
/// collective spin (Jx/N, Jy/N, Jz/N).
struct SpinMoments {
    std::array<double, 3> mean{};
    std::array<double, 9> cov{};  ///< row-major symmetric 3x3

    double& cov_at(int r, int c) { return cov[3 * r + c]; }
    double cov_at(int r, int c) const { return cov[3 * r + c]; }
};

// ---------------------------------------------------------------------------
// Error types. Everything derives from Error so callers can catch broadly.
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InvalidParams : Error { using Error::Error; };

/// v_ss denominator below 1e-14; impossible for gamma > 0.
struct DegenerateDenominator : Error { using Error::Error; };

/// No real cubic root inside [-1, 0]; message carries the raw roots.
struct NoPhysicalRoot : Error { using Error::Error; };

/// State diverged during time integration.
struct NonFinite : Error { using Error::Error; };

/// The vectorized Lyapunov system is singular (evaluation at criticality).
struct SingularLyapunov : Error { using Error::Error; };

/// A nominally real quantity came out with |Im| > 1e-10.
struct ImaginaryLeak : Error { using Error::Error; };

/// Diffusion matrix lost more than 1e-10 of its trace to eigenvalue clipping.
struct NotPSD : Error { using Error::Error; };

/// Bloch vector shorter than 1e-14; no squeezing frame exists.
struct ZeroBlochVector : Error { using Error::Error; };

/// Requested oracle size exceeds the memory guard.
struct TooLarge : Error { using Error::Error; };

/// Liouvillian null space has dimension > 1.
struct DegenerateSteadyState : Error { using Error::Error; };

}  // namespace dtfim
