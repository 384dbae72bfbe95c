#pragma once

#include <span>
#include <vector>

#include "dtfim/squeezing.hpp"
#include "dtfim/types.hpp"

namespace dtfim {

/// Largest ensemble the exact solver accepts by default. The Liouvillian at
/// N = 7 acts on 16384-dimensional vectorized states; beyond that the dense
/// ground-truth approach stops being a desk-scale tool.
constexpr int kOracleNMax = 7;

/// Exact collective state of N atoms, dim = 2^N, row-major.
/// Basis convention: bit n of the index is 1 when atom n is excited, so index
/// 0 is the all-ground (dark) state.
struct DensityMatrix {
    int natoms = 0;
    int dim = 0;
    std::vector<cplx> rho;

    cplx& at(int r, int c) { return rho[static_cast<size_t>(r) * dim + c]; }
    const cplx& at(int r, int c) const { return rho[static_cast<size_t>(r) * dim + c]; }

    double hermiticity_deviation() const;  ///< max |rho - rho^dagger|
    double trace_deviation() const;        ///< |tr(rho) - 1|
    double min_eigenvalue() const;
};

/// Lindblad generator of the model: L[rho] = -i[H, rho]
/// + gamma sum_n (s_n^- rho s_n^+ - 1/2 {s_n^+ s_n^-, rho}).
/// Applied matrix-free; the dense superoperator (acting on column-stacked
/// rho) is materialized only for the small-N null-space route.
class Liouvillian {
  public:
    Liouvillian(const SystemParams& p, int natoms, int n_max = kOracleNMax);

    const SystemParams& params() const { return params_; }
    int natoms() const { return natoms_; }
    int dim() const { return dim_; }

    void apply(const cplx* rho, cplx* out) const;
    std::vector<cplx> apply(const std::vector<cplx>& rho) const;

    /// Dense (dim^2 x dim^2) superoperator, row-major, acting on vec(rho)
    /// with column-major stacking.
    std::vector<cplx> dense() const;

    /// Upper bound on the spectral radius; sets the stable RK4 step.
    double spectral_bound() const;

  private:
    SystemParams params_;
    int natoms_;
    int dim_;
    std::vector<double> hdiag_;  ///< diagonal of H in the z basis
};

/// Collective Hamiltonian (-Delta/2 + V/4) Jz + (Omega/2) Jx + V/(8N) Jz^2,
/// with the self-interaction term of the double sum included. Dense 2^N.
std::vector<cplx> build_hamiltonian(const SystemParams& p, int natoms,
                                    int n_max = kOracleNMax);

Liouvillian build_liouvillian(const SystemParams& p, int natoms, int n_max = kOracleNMax);

enum class SteadyStateMethod {
    automatic,  ///< svd up to N = 4, time propagation beyond
    svd,        ///< null vector of the dense superoperator (one-sided Jacobi SVD)
    propagate,  ///< RK4 relaxation of the master equation, matrix-free
};

/// Exact steady state. The SVD route checks that exactly one singular value
/// falls below 1e-10 sigma_max (unique null space); the propagation route
/// relaxes two independent initial states and verifies they agree.
DensityMatrix steady_state(const Liouvillian& l,
                           SteadyStateMethod method = SteadyStateMethod::automatic);

/// Means and symmetric-ordered central second moments of (Jx/N, Jy/N, Jz/N).
SpinMoments collective_moments(const DensityMatrix& rho);

/// Residuals of the six moment equations of motion: for each observable O,
/// | tr(O L[rho]) - closed-form RHS | evaluated from exact expectations
/// (max over the +/- sign variants where applicable). The rhs of the J+-Jz
/// equation includes the third-order symmetric moments and the (1/3)<J+->
/// term of the interaction coupling.
struct MomentResiduals {
    double jpm = 0.0;      ///< d<J+->/dt
    double jz = 0.0;       ///< d<Jz>/dt
    double jpm2 = 0.0;     ///< d<J+-^2>/dt
    double jz2 = 0.0;      ///< d<Jz^2>/dt
    double jpjm = 0.0;     ///< d<J+J->_S/dt
    double jpmjz = 0.0;    ///< d<J+-Jz>_S/dt

    double max_first_five() const;
};

MomentResiduals moment_rhs_check(const DensityMatrix& rho, const SystemParams& p);

SqueezingResult exact_squeezing(const DensityMatrix& rho);

struct ConvergenceRow {
    int natoms = 0;
    double xi2_exact = 0.0;
    double xi2_analytic = 0.0;
    double dev_xi2 = 0.0;
    double dev_ncov = 0.0;  ///< max |N cov_exact - N cov_analytic|
};

struct ConvergenceStudy {
    std::vector<ConvergenceRow> rows;
    double fitted_exponent = 0.0;  ///< p in dev ~ N^-p (log-log least squares)
    double xi2_analytic = 0.0;
};

/// Exact-versus-linearized comparison across system sizes. Requires a unique
/// stable mean-field branch; bistable parameter points are rejected because
/// the finite-N steady state mixes both branches there.
ConvergenceStudy convergence_study(const SystemParams& p, std::span<const int> n_list,
                                   int n_max = kOracleNMax);

/// Rough memory footprint of a steady-state solve at size N, in bytes.
size_t oracle_memory_estimate(int natoms);

// Dense helpers shared with the tests (all matrices row-major, dim 2^N).
std::vector<cplx> site_operator(const std::array<cplx, 4>& op, int atom, int natoms);
std::vector<cplx> collective_operator(const std::array<cplx, 4>& op, int natoms);
std::array<cplx, 4> pauli_x();
std::array<cplx, 4> pauli_y();
std::array<cplx, 4> pauli_z();
std::array<cplx, 4> sigma_plus();
std::array<cplx, 4> sigma_minus();
std::vector<cplx> mat_mul(const std::vector<cplx>& a, const std::vector<cplx>& b, int dim);
cplx trace_product(const std::vector<cplx>& a, const std::vector<cplx>& b, int dim);

}  // namespace dtfim
