#pragma once

#include <complex>
#include <vector>

#include "chainset/types.hpp"

namespace chainset {

/// Splitting of R^n into the Lyapunov spaces of A: L+ (positive real
/// parts), L0 (vanishing), L- (negative). Bases are orthonormal within
/// each block; the projections are along the complementary Lyapunov
/// spaces, not orthogonal.
struct SpectralSplit {
    Matrix basis_plus;   // n x k+
    Matrix basis_zero;   // n x k0
    Matrix basis_minus;  // n x k-
    Matrix proj_plus;    // n x n, onto L+ along L- + L0
    Matrix proj_zero;    // n x n, onto L0 along L+ + L-
    Matrix proj_minus;   // n x n
    Matrix proj_h;       // proj_plus + proj_minus, onto L+ + L- along L0
    double tol_re = 0.0;
    std::vector<std::complex<double>> eigenvalues;
    bool near_threshold = false;  // some |Re lambda| within 10x of tol_re

    int dim_plus() const { return static_cast<int>(basis_plus.cols()); }
    int dim_zero() const { return static_cast<int>(basis_zero.cols()); }
    int dim_minus() const { return static_cast<int>(basis_minus.cols()); }
    int dim() const { return static_cast<int>(proj_plus.rows()); }

    /// Orthonormal basis of the hyperbolic subspace L+ + L- (columns of
    /// basis_plus followed by basis_minus, re-orthonormalized).
    Matrix hyperbolic_basis() const;
};

double default_tol_re(const Matrix& A);

/// Lyapunov-space splitting from an ordered real Schur form. Eigenvalues
/// with |Re lambda| <= tol_re are assigned to L0, never split.
SpectralSplit lyapunov_split(const Matrix& A, double tol_re = -1.0);

/// e^{A t} by scaling-and-squaring with Pade approximants.
Matrix matrix_exp(const Matrix& A, double t = 1.0);

/// Orthonormal basis of C = Im [B AB ... A^{n-1}B] (Krylov recursion,
/// rank by singular values with cutoff 1e-10 * sigma_max).
Matrix controllability_subspace(const Matrix& A, const Matrix& B);

inline bool is_hyperbolic(const SpectralSplit& split) { return split.dim_zero() == 0; }

}  // namespace chainset
