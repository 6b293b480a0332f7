#pragma once

#include "chainset/convex.hpp"
#include "chainset/spectral.hpp"

namespace chainset {

struct ReachOptions {
    double horizon_T = -1.0;  // <= 0: certified automatic horizon
    double quad_tol = 1e-8;   // relative quadrature tolerance
};

/// Induced system on a Lyapunov subspace, in the coordinates of an
/// orthonormal basis V: xi' = (V^T A V) xi + (V^T pi B) u.
struct InducedSystem {
    Matrix A;  // k x k
    Matrix B;  // k x m
    const ControlRange* U = nullptr;
};

/// Support function of the time-T reachable set from 0:
///   h(d) = int_0^T h_U(B^T e^{A^T s} d) ds
/// by adaptive composite Simpson quadrature.
double reach_support(const Matrix& A, const Matrix& B, const ControlRange& U, double T,
                     const Vector& d, double quad_tol = 1e-8);
double reach_support(const LinearSystem& sys, double T, const Vector& d, double quad_tol = 1e-8);

/// Certified truncation horizon for an asymptotically stable block:
/// T* = max(20, (1/mu) ln(c h_max ||B|| / 1e-8)), extended when needed so
/// the reported tail bound c e^{-mu T*/2} h_max ||B|| (2/mu) is <= 1e-8.
struct Horizon {
    double T = 20.0;
    double tail_bound = 0.0;
    double mu = 0.0;  // spectral gap of the stable block
    double c = 1.0;   // ||e^{At}|| <= c e^{-mu t / 2}
};
Horizon certified_horizon(const Matrix& A_stable, double scale);

/// D- = closure(pi^- R(0)) as a body in L- coordinates (point at 0 when
/// L- is trivial or B vanishes on it).
ConvexBody stable_reach_set(const LinearSystem& sys, const SpectralSplit& split,
                            const ReachOptions& opt = {});

/// closure(D+) = closure(pi^+ C(0)) in L+ coordinates; computed as the
/// stable reach set of the time-reversed induced system.
ConvexBody unstable_ctrl_set(const LinearSystem& sys, const SpectralSplit& split,
                             const ReachOptions& opt = {});

/// closure(D0) = closure(D+) (+) (L0 int C) (+) closure(D-).
struct ControlSetResult {
    AffineSetSum D0_closure;    // compact hyperbolic factor (+) (L0 int C)
    ConvexBody D_minus;         // in L- coordinates
    ConvexBody D_plus;          // in L+ coordinates
    Matrix center_cap_C_basis;  // orthonormal basis of L0 int C
    SpectralSplit split;
    Matrix ctrb_basis;                        // basis of C
    bool degenerate_hyperbolic_factor = false;  // dim(L^pm int C) < dim L^pm
};

ControlSetResult control_set(const LinearSystem& sys, const ReachOptions& opt = {});

/// Chain control set E = closure(D0) + L0: compact part closure(D0^h)
/// in hyperbolic coordinates, subspace the full center space L0.
AffineSetSum chain_control_set(const LinearSystem& sys, const ReachOptions& opt = {});
AffineSetSum chain_control_set(const LinearSystem& sys, const ControlSetResult& cs);

}  // namespace chainset
