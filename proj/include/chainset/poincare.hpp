#pragma once

#include <vector>

#include "chainset/reachsets.hpp"

namespace chainset {

/// Point of projective space P^{n}, stored as a canonical unit
/// representative (sign fixed so the first nonzero coordinate is
/// positive); rep and -rep compare equal.
struct ProjPoint {
    Vector rep;

    static ProjPoint from(const Vector& x);  // x != 0
    int dim() const { return static_cast<int>(rep.size()) - 1; }
};

/// d(P x, P y) = min{ ||x/|x| - y/|y|||, ||x/|x| + y/|y||| }.
double proj_distance(const ProjPoint& p, const ProjPoint& q);

/// Hemisphere embedding x -> P(x, 1); never lands on the equator P^{n,0}.
ProjPoint lift_h1(const Vector& x);

/// Projective distance from p to the equator {P(w, 0)}.
double equator_distance(const ProjPoint& p);

/// Piecewise-constant control: value of the last breakpoint <= t,
/// extended constantly on both ends.
struct PCWControl {
    std::vector<double> breakpoints;  // strictly increasing
    std::vector<Vector> values;       // one per breakpoint, each in U

    static PCWControl constant(const Vector& u0);
    Vector value_at(double t) const;
    void validate(const ControlRange& U, double slack = 1e-9) const;
};

/// e(u, 0) of the induced hyperbolic system, computed blockwise with
/// exact per-piece integration over a truncation window.
struct BoundedSolution {
    Vector coords_plus;   // L+ coordinates
    Vector coords_minus;  // L- coordinates
    Vector ambient;       // embedded back into R^n
    double tail_bound = 0.0;
    double window_T = 0.0;

    Vector hyperbolic_coords() const {
        Vector e(coords_plus.size() + coords_minus.size());
        e << coords_plus, coords_minus;
        return e;
    }
};

BoundedSolution bounded_solution_e0(const LinearSystem& sys, const SpectralSplit& split,
                                    const PCWControl& u, double window_T = -1.0);

/// Central Selgrade fiber over u: span{(-e(u,0), 1)} (+) L0 x {0};
/// dimension 1 + dim L0.
struct CentralFiber {
    PCWControl u;
    Vector e0;            // hyperbolic coordinates of the bounded solution
    Matrix center_basis;  // basis of L0
    Matrix fiber_basis;   // (n+1) x (1 + dim L0), orthonormal
    int dimension = 0;
};

CentralFiber central_fiber(const LinearSystem& sys, const SpectralSplit& split, const PCWControl& u);

/// Point cloud of the projective chain control set E_c^1 = P(E x {1}):
/// P(-e(u,0) + z, 1) for a deterministic family of vertex-valued
/// piecewise-constant controls u and a grid of center-space offsets z.
/// Every preimage is checked for membership in E (slack 1e-6).
struct ProjectiveCloud {
    std::vector<ProjPoint> points;
    std::vector<Vector> preimages;  // -e(u,0) + z, in R^n
    AffineSetSum E;                 // exact description (provenance)
    int fiber_dimension = 0;        // 1 + dim L0
};

ProjectiveCloud projective_chain_control_set(const LinearSystem& sys, int samples,
                                             double r_plot = 2.0, const ReachOptions& opt = {});

}  // namespace chainset
