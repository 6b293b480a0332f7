#include "chainset/reachsets.hpp"

#include <cmath>

namespace chainset {

namespace {

// Adaptive composite Simpson with a hard panel budget of 2^20.
class Simpson {
public:
    Simpson(std::function<double(double)> f, double rel_tol) : f_(std::move(f)), tol_(rel_tol) {}

    double integrate(double a, double b) {
        panels_ = 0;
        const double fa = f_(a), fb = f_(b), fm = f_(0.5 * (a + b));
        const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        const double scale = std::max({std::abs(whole), (b - a) * 1e-12, 1e-30});
        return recurse(a, b, fa, fm, fb, whole, tol_ * scale, 40);
    }

private:
    double recurse(double a, double b, double fa, double fm, double fb, double whole, double tol,
                   int depth) {
        if (++panels_ > (1 << 20)) throw QuadratureFailure("panel budget exceeded");
        const double m = 0.5 * (a + b);
        const double fl = f_(0.5 * (a + m)), fr = f_(0.5 * (m + b));
        const double left = (m - a) / 6.0 * (fa + 4.0 * fl + fm);
        const double right = (b - m) / 6.0 * (fm + 4.0 * fr + fb);
        const double err = left + right - whole;
        if (depth <= 0 || std::abs(err) <= 15.0 * tol)
            return left + right + err / 15.0;
        return recurse(a, m, fa, fl, fm, left, 0.5 * tol, depth - 1) +
               recurse(m, b, fm, fr, fb, right, 0.5 * tol, depth - 1);
    }

    std::function<double(double)> f_;
    double tol_;
    long panels_ = 0;
};

double control_support_max(const ControlRange& U) {
    double h = 0.0;
    for (int v = 0; v < U.vertices().cols(); ++v) h = std::max(h, U.vertices().col(v).norm());
    return h;
}

}  // namespace

double reach_support(const Matrix& A, const Matrix& B, const ControlRange& U, double T,
                     const Vector& d, double quad_tol) {
    if (T < 0.0) throw QuadratureFailure("negative horizon");
    if (d.size() != A.rows()) throw DimensionMismatch("reach_support direction");
    if (T == 0.0 || B.size() == 0 || B.norm() == 0.0) return 0.0;
    // h(d) = int_0^T h_U(B^T e^{A^T s} d) ds  (s = T - original time)
    auto integrand = [&](double s) {
        const Vector w = B.transpose() * (matrix_exp(A.transpose(), s) * d);
        return U.support(w);
    };
    return Simpson(integrand, quad_tol).integrate(0.0, T);
}

double reach_support(const LinearSystem& sys, double T, const Vector& d, double quad_tol) {
    return reach_support(sys.A, sys.B, sys.U, T, d, quad_tol);
}

Horizon certified_horizon(const Matrix& A_stable, double scale) {
    Horizon h;
    if (A_stable.rows() == 0) return h;
    const Eigen::VectorXcd ev = A_stable.eigenvalues();
    double max_re = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < ev.size(); ++i) max_re = std::max(max_re, ev[i].real());
    if (max_re >= 0.0) throw NotHyperbolic("stable block has a nonnegative real part");
    h.mu = -max_re;
    // sampled bound ||e^{At}|| <= c e^{-mu t / 2}
    const double t_max = std::min(200.0, 60.0 / h.mu);
    double c = 1.0;
    for (int k = 0; k <= 400; ++k) {
        const double t = t_max * k / 400.0;
        const Matrix E = matrix_exp(A_stable, t);
        c = std::max(c, E.operatorNorm() * std::exp(0.5 * h.mu * t));
    }
    h.c = 2.0 * c;
    const double target = 1e-8;
    const double amp = std::max(h.c * std::max(scale, 1e-30), 1e-30);
    double T = std::max(20.0, std::log(amp / target) / h.mu);
    // tail bound: int_T^inf c e^{-mu s/2} ds * scale
    auto tail = [&](double t) { return scale * h.c * (2.0 / h.mu) * std::exp(-0.5 * h.mu * t); };
    if (tail(T) > target)
        T = std::max(T, (2.0 / h.mu) * std::log(scale * h.c * (2.0 / h.mu) / target));
    h.T = T;
    h.tail_bound = tail(T);
    return h;
}

namespace {

// Induced system on span(V) (V orthonormal, A-invariant):
// xi' = (V^T A V) xi + (V^T pi B) u.
InducedSystem induced(const LinearSystem& sys, const Matrix& V, const Matrix& pi) {
    InducedSystem s;
    s.A = V.transpose() * sys.A * V;
    s.B = V.transpose() * (pi * sys.B);
    s.U = &sys.U;
    return s;
}

ConvexBody stable_body(const InducedSystem& s, const ReachOptions& opt) {
    const int k = static_cast<int>(s.A.rows());
    if (k == 0) return ConvexBody::from_support(0, [](const Vector&) { return 0.0; });
    if (s.B.norm() == 0.0) return ConvexBody::origin(k);
    double T = opt.horizon_T;
    if (T <= 0.0) {
        const double scale = control_support_max(*s.U) * std::max(s.B.operatorNorm(), 1e-30);
        T = certified_horizon(s.A, scale).T;
    }
    return ConvexBody::from_support(
        k, [&](const Vector& d) { return reach_support(s.A, s.B, *s.U, T, d, opt.quad_tol); });
}

}  // namespace

ConvexBody stable_reach_set(const LinearSystem& sys, const SpectralSplit& split,
                            const ReachOptions& opt) {
    return stable_body(induced(sys, split.basis_minus, split.proj_minus), opt);
}

ConvexBody unstable_ctrl_set(const LinearSystem& sys, const SpectralSplit& split,
                             const ReachOptions& opt) {
    // time reversal: C(0) of (A, B) is R(0) of (-A, -B), and L+ of A is
    // the stable space of -A.
    const LinearSystem rev = sys.time_reversed();
    InducedSystem s = induced(rev, split.basis_plus, split.proj_plus);
    ConvexBody b = stable_body(s, opt);
    b.open_interior = true;  // D+ is open relative to L+ (closure stored)
    return b;
}

ControlSetResult control_set(const LinearSystem& sys, const ReachOptions& opt) {
    ControlSetResult r;
    r.split = lyapunov_split(sys.A);
    r.ctrb_basis = controllability_subspace(sys.A, sys.B);
    r.D_minus = stable_reach_set(sys, r.split, opt);
    r.D_plus = unstable_ctrl_set(sys, r.split, opt);
    r.center_cap_C_basis = subspace_intersection(r.split.basis_zero, r.ctrb_basis);

    const Matrix Vp = r.split.basis_plus, Vm = r.split.basis_minus;
    const ConvexBody Dp = r.D_plus, Dm = r.D_minus;
    r.D0_closure = AffineSetSum::from_oracle(
        sys.state_dim(), r.center_cap_C_basis, [&](const Vector& d) {
            return Dp.support(Vp.transpose() * d) + Dm.support(Vm.transpose() * d);
        });

    const int dim_pc = static_cast<int>(subspace_intersection(r.split.basis_plus, r.ctrb_basis).cols());
    const int dim_mc = static_cast<int>(subspace_intersection(r.split.basis_minus, r.ctrb_basis).cols());
    r.degenerate_hyperbolic_factor =
        dim_pc < r.split.dim_plus() || dim_mc < r.split.dim_minus();
    return r;
}

AffineSetSum chain_control_set(const LinearSystem& sys, const ControlSetResult& cs) {
    const Matrix Vp = cs.split.basis_plus, Vm = cs.split.basis_minus;
    const ConvexBody& Dp = cs.D_plus;
    const ConvexBody& Dm = cs.D_minus;
    return AffineSetSum::from_oracle(sys.state_dim(), cs.split.basis_zero, [&](const Vector& d) {
        return Dp.support(Vp.transpose() * d) + Dm.support(Vm.transpose() * d);
    });
}

AffineSetSum chain_control_set(const LinearSystem& sys, const ReachOptions& opt) {
    return chain_control_set(sys, control_set(sys, opt));
}

}  // namespace chainset
