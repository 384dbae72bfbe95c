#pragma once

#include <vector>

#include "dtfim/mat3.hpp"
#include "dtfim/types.hpp"

namespace dtfim {

/// Eigenvalues of a general complex 3x3 matrix via Hessenberg reduction and
/// shifted QR iteration. Unordered.
std::array<cplx, 3> eigenvalues3(const Mat3& m);

/// Eigen-decomposition of a real symmetric 3x3 matrix (cyclic Jacobi).
/// Eigenvalues ascending; eigenvectors are the columns of `vectors`.
void sym_eigen3(const RMat3& m, RVec3& values, RMat3& vectors);

/// Eigenvalues only, ascending.
RVec3 sym_eigenvalues3(const RMat3& m);

/// Solves the dense complex system M x = b in place (partial-pivot LU).
/// M is n x n row-major and is destroyed. Throws SingularLyapunov when a pivot
/// falls below 1e-13 times the largest initial entry.
void lu_solve(std::vector<cplx>& m, int n, std::vector<cplx>& b);

/// Thin SVD of a square complex matrix by one-sided Jacobi rotations.
/// Singular values descending; `v` holds the right singular vectors
/// column-major, so column k of V pairs with sigma[k].
struct SvdResult {
    int n = 0;
    std::vector<double> sigma;
    std::vector<cplx> v;

    cplx v_at(int row, int col) const { return v[static_cast<size_t>(col) * n + row]; }
};

SvdResult jacobi_svd(std::vector<cplx> a, int n);

/// Eigenvalues of a complex Hermitian n x n matrix (two-sided Jacobi),
/// ascending. Only the lower/upper consistency of `a` is assumed via (a+a^H)/2.
std::vector<double> herm_eigenvalues(std::vector<cplx> a, int n);

}  // namespace dtfim
