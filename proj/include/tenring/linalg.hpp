#pragma once

// Small dense factorizations used by the ALS solvers. All solves are in
// right-hand orientation (Z * A = B), matching the shape of the ALS
// subproblems G_n(2) * S = M.

#include "tenring/tensor.hpp"

namespace tenring {

/// Thin QR with k = min(rows, cols): q is rows x k with orthonormal columns,
/// r is k x cols upper trapezoidal with a nonnegative diagonal.
struct QrPair {
    Matrix q;
    Matrix r;
};

QrPair qr_economy(const Matrix& a);

struct SpdSolveResult {
    Matrix z;
    /// Cholesky failed and a column-pivoted QR solve was used instead.
    bool fallback_used = false;
};

/// Z with Z * s = rhs for symmetric s (s must be symmetric within 1e-8 relative).
SpdSolveResult spd_solve(const Matrix& s, const Matrix& rhs);

/// Default degeneracy floor of tri_solve_right, relative to max |r_ij|.
inline constexpr double kTriangularFloor = 1e-13;

/// Z with Z * r^T = rhs for square upper triangular r, by back-substitution.
/// Throws DegenerateTriangular if some |r_ii| < relative_floor * max|r|.
Matrix tri_solve_right(const Matrix& r, const Matrix& rhs, double relative_floor = kTriangularFloor);

/// Minimum-norm least-squares Z of Z * r^T = rhs, singular values below
/// rcond * sigma_max treated as zero.
Matrix svd_solve_right(const Matrix& r, const Matrix& rhs, double rcond = 1e-12);

/// Least-squares Z minimising ||a * Z^T - b^T||_F through a Householder QR of a.
/// This is the coefficient-matrix form of the baseline ALS subproblem.
Matrix lstsq_qr_right(const Matrix& a, const Matrix& b);

/// Kronecker product, b's index running fastest.
Matrix kron(const Matrix& a, const Matrix& b);

}  // namespace tenring
