#pragma once

#include <cstdint>
#include <vector>

#include "dtfim/mat3.hpp"
#include "dtfim/meanfield.hpp"
#include "dtfim/simd/kernels.hpp"
#include "dtfim/types.hpp"

namespace dtfim {

/// Per-point status flags; OR-combined.
enum PointFlag : unsigned {
    kFlagOk = 0,
    kFlagNearCritical = 1u << 0,  ///< |det A| < 1e-8 gamma^3, linear theory unreliable
    kFlagNoStable = 1u << 1,      ///< no stable fixed point at this parameter set
    kFlagNotUnique = 1u << 2,     ///< more than one branch where one was asserted
    kFlagZeroBloch = 1u << 3,     ///< squeezing frame chosen by convention
    kFlagLyapunov = 1u << 4,      ///< Lyapunov solve failed (at/near criticality)
    kFlagSolverError = 1u << 5,   ///< steady-state solve failed at this point
};

std::string flags_to_string(unsigned flags);

/// Linearized Fokker-Planck data around one stable fixed point, in the
/// (v~, v~*, m~) basis. A is the drift Jacobian, D the diffusion matrix
/// (scaling as 1/N), and C the stationary covariance solving A C + C A^T = -D
/// (transpose, not adjoint). All three share the conjugation structure
/// conj(M) = S M S with S the 1<->2 index swap, and C is complex symmetric.
struct FluctuationModel {
    Mat3 a;
    Mat3 d;
    Mat3 c;
    FixedPoint fixed_point;
    long natoms = 0;
    bool near_critical = false;  ///< guard |det A| < 1e-8 gamma^3 tripped

    /// max-norm Lyapunov residual ||A C + C A^T + D||.
    double lyapunov_residual() const;
};

/// Diffusion matrix of the linearized Fokker-Planck equation at a fixed point.
/// V does not enter; only the fixed point and gamma/N do.
Mat3 diffusion_matrix(const SystemParams& p, const FixedPoint& fp);

/// Unique solution of A C + C A^T = -D via the dense 9x9 vectorized system.
/// Throws SingularLyapunov when eigenvalues pair to zero (criticality).
Mat3 solve_lyapunov(const Mat3& a, const Mat3& d);

/// Builds A, D, C at a fixed point. Does not require stability: the guard and
/// the Lyapunov solve decide what is representable, and `near_critical` is set
/// from the |det A| threshold.
FluctuationModel make_fluctuation_model(const SystemParams& p, const FixedPoint& fp);

/// Maps the phase-space covariance to means and symmetric-ordered central
/// second moments of (Jx/N, Jy/N, Jz/N). Throws ImaginaryLeak if a nominally
/// real output carries |Im| > 1e-10.
SpinMoments covariances_xyz(const FluctuationModel& model);

/// Transform of the drift to the real coordinate basis
/// (x, y, m~) = (v~ + v~*, -i(v~ - v~*), m~):  T A T^{-1}.
RMat3 drift_real_basis(const Mat3& a);

/// Transform of a second-moment matrix (D or C) to the same basis: T M T^T.
RMat3 moment_real_basis(const Mat3& m);

/// Result of the Ornstein-Uhlenbeck sampling verification.
struct OuSample {
    RMat3 cov;          ///< sample covariance of the final points
    RVec3 mean;         ///< sample mean (theory: 0)
    long n_paths = 0;
    double dt = 0.0;
    double t_final = 0.0;
    simd::KernelKind kernel = simd::KernelKind::automatic;  ///< resolved kind

    /// Approximate standard error of cov(i,j) for a Gaussian sample.
    double standard_error(int i, int j) const;
};

/// Euler-Maruyama simulation of the linear SDE in the real coordinate basis.
/// The noise factor comes from the eigen-decomposition of the real-basis D
/// with negative eigenvalues clipped at zero; clipping more than 1e-10 of the
/// trace throws NotPSD. Deterministic for a fixed seed, independent of
/// threading and of the kernel batch width.
OuSample sample_ou(const Mat3& a, const Mat3& d, long n_paths, double dt, double t_final,
                   std::uint64_t seed, simd::KernelKind kind = simd::KernelKind::automatic);

/// One branch evaluated at one sweep point.
struct BranchEval {
    double sweep_value = 0.0;
    FixedPoint fixed_point;
    unsigned flags = kFlagOk;
    bool has_model = false;
    FluctuationModel model;  ///< valid when has_model
};

/// Evaluates every branch at every sweep point: steady states, stability and
/// (for stable branches away from criticality) the fluctuation model.
std::vector<BranchEval> evaluate_sweep(const SystemParams& p, const SweepSpec& sweep);

/// The two correlation scalars of a bifurcation scan, per stable branch:
/// N (<Jz~^2> - <Jz~>^2) and N (<J+~ J-~>_S - <J+~><J-~>). Both are
/// N-independent because C scales as 1/N.
struct CorrelationRow {
    double sweep_value = 0.0;
    BranchLabel branch = BranchLabel::lower;
    double n_var_jz = 0.0;
    double n_cov_jpjm = 0.0;
    unsigned flags = kFlagOk;
};

std::vector<CorrelationRow> correlation_scan(const SystemParams& p, const SweepSpec& sweep);

}  // namespace dtfim
