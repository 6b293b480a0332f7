#include "chainset/poincare.hpp"

#include <algorithm>
#include <cmath>

namespace chainset {

ProjPoint ProjPoint::from(const Vector& x) {
    const double n = x.norm();
    if (!(n > 0.0) || !x.allFinite()) throw NonFinite("projective representative");
    Vector r = x / n;
    for (int i = 0; i < r.size(); ++i) {
        if (std::abs(r[i]) > 1e-14) {
            if (r[i] < 0.0) r = -r;
            break;
        }
    }
    return ProjPoint{r};
}

double proj_distance(const ProjPoint& p, const ProjPoint& q) {
    if (p.rep.size() != q.rep.size()) throw DimensionMismatch("proj_distance");
    return std::min((p.rep - q.rep).norm(), (p.rep + q.rep).norm());
}

ProjPoint lift_h1(const Vector& x) {
    Vector y(x.size() + 1);
    y << x, 1.0;
    return ProjPoint::from(y);
}

double equator_distance(const ProjPoint& p) {
    const int n = static_cast<int>(p.rep.size()) - 1;
    const double r = p.rep.head(n).norm();
    if (r <= 1e-300) return std::sqrt(2.0);  // pole to equator
    // nearest equator point is P(head(p), 0)
    return std::sqrt(std::max(0.0, 2.0 - 2.0 * r));
}

PCWControl PCWControl::constant(const Vector& u0) { return PCWControl{{0.0}, {u0}}; }

Vector PCWControl::value_at(double t) const {
    if (breakpoints.empty()) throw ParseError("piecewise control without breakpoints");
    // last breakpoint <= t, clamped at the ends
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const auto idx = it == breakpoints.begin() ? 0 : (it - breakpoints.begin() - 1);
    return values[static_cast<size_t>(idx)];
}

void PCWControl::validate(const ControlRange& U, double slack) const {
    if (breakpoints.size() != values.size() || breakpoints.empty())
        throw ParseError("piecewise control needs one value per breakpoint");
    for (size_t i = 1; i < breakpoints.size(); ++i)
        if (!(breakpoints[i] > breakpoints[i - 1]))
            throw ParseError("piecewise control breakpoints must increase");
    for (const auto& v : values)
        if (!U.contains(v, slack)) throw ParseError("piecewise control value outside U");
}

namespace {

// int_a^b e^{-A s} ds * w  =  A^{-1} (e^{-A a} - e^{-A b}) w   (A invertible)
Vector exp_integral(const Matrix& A, double a, double b, const Vector& w) {
    if (A.rows() == 0) return Vector(0);
    const Matrix Ea = matrix_exp(A, -a);
    const Matrix Eb = matrix_exp(A, -b);
    return A.fullPivLu().solve((Ea - Eb) * w);
}

struct HypBlocks {
    Matrix Ap, Bp;  // L+ coordinates
    Matrix Am, Bm;  // L- coordinates
    double mu = 0.0, c = 1.0;
};

HypBlocks hyperbolic_blocks(const LinearSystem& sys, const SpectralSplit& split) {
    HypBlocks h;
    h.Ap = split.basis_plus.transpose() * sys.A * split.basis_plus;
    h.Bp = split.basis_plus.transpose() * (split.proj_plus * sys.B);
    h.Am = split.basis_minus.transpose() * sys.A * split.basis_minus;
    h.Bm = split.basis_minus.transpose() * (split.proj_minus * sys.B);

    double mu = std::numeric_limits<double>::infinity();
    if (h.Ap.rows() > 0) {
        const Eigen::VectorXcd ev = h.Ap.eigenvalues();
        for (int i = 0; i < ev.size(); ++i) {
            if (ev[i].real() <= 0.0) throw NotHyperbolic("L+ block has a nonpositive real part");
            mu = std::min(mu, ev[i].real());
        }
    }
    if (h.Am.rows() > 0) {
        const Eigen::VectorXcd ev = h.Am.eigenvalues();
        for (int i = 0; i < ev.size(); ++i) {
            if (ev[i].real() >= 0.0) throw NotHyperbolic("L- block has a nonnegative real part");
            mu = std::min(mu, -ev[i].real());
        }
    }
    h.mu = mu;

    // sampled constant for ||e^{-A+ t}||, ||e^{A- t}|| <= c e^{-mu t/2}, t >= 0
    double c = 1.0;
    const double t_max = std::isfinite(mu) ? std::min(200.0, 60.0 / mu) : 0.0;
    for (int k = 0; k <= 200 && t_max > 0.0; ++k) {
        const double t = t_max * k / 200.0;
        if (h.Ap.rows() > 0)
            c = std::max(c, matrix_exp(h.Ap, -t).operatorNorm() * std::exp(0.5 * mu * t));
        if (h.Am.rows() > 0)
            c = std::max(c, matrix_exp(h.Am, t).operatorNorm() * std::exp(0.5 * mu * t));
    }
    h.c = 2.0 * c;
    return h;
}

}  // namespace

BoundedSolution bounded_solution_e0(const LinearSystem& sys, const SpectralSplit& split,
                                    const PCWControl& u, double window_T) {
    u.validate(sys.U);
    const HypBlocks h = hyperbolic_blocks(sys, split);
    const int kp = static_cast<int>(h.Ap.rows());
    const int km = static_cast<int>(h.Am.rows());

    BoundedSolution out;
    out.coords_plus = Vector::Zero(kp);
    out.coords_minus = Vector::Zero(km);
    if (kp + km == 0) {
        out.ambient = Vector::Zero(sys.state_dim());
        return out;
    }

    double u_max = 0.0;
    for (const auto& v : u.values) u_max = std::max(u_max, v.norm());
    const double bnorm = std::max(std::max(kp > 0 ? h.Bp.operatorNorm() : 0.0,
                                           km > 0 ? h.Bm.operatorNorm() : 0.0),
                                  1e-30);
    const double scale = h.c * bnorm * std::max(u_max, 1e-30) * 2.0 / h.mu;
    if (window_T <= 0.0) {
        window_T = 1.05 * (2.0 / h.mu) * std::log(std::max(scale / 1e-8, 10.0));
        window_T = std::max(window_T, 1.0);
    }
    out.window_T = window_T;
    out.tail_bound = scale * std::exp(-0.5 * h.mu * window_T);
    if (out.tail_bound > 1e-6) throw WindowTooSmall("tail bound " + std::to_string(out.tail_bound));

    // piece boundaries of u clipped to [-W, 0] and [0, W]
    auto pieces = [&](double lo, double hi) {
        std::vector<double> cuts{lo};
        for (double b : u.breakpoints)
            if (b > lo && b < hi) cuts.push_back(b);
        cuts.push_back(hi);
        std::sort(cuts.begin(), cuts.end());
        return cuts;
    };

    // e-(u,0) = int_{-W}^0 e^{-A- s} B- u(s) ds
    if (km > 0 && h.Bm.norm() > 0.0) {
        const auto cuts = pieces(-window_T, 0.0);
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            const Vector v = u.value_at(0.5 * (cuts[i] + cuts[i + 1]));
            out.coords_minus += exp_integral(h.Am, cuts[i], cuts[i + 1], h.Bm * v);
        }
    }
    // e+(u,0) = -int_0^W e^{-A+ s} B+ u(s) ds
    if (kp > 0 && h.Bp.norm() > 0.0) {
        const auto cuts = pieces(0.0, window_T);
        for (size_t i = 0; i + 1 < cuts.size(); ++i) {
            const Vector v = u.value_at(0.5 * (cuts[i] + cuts[i + 1]));
            out.coords_plus -= exp_integral(h.Ap, cuts[i], cuts[i + 1], h.Bp * v);
        }
    }
    out.ambient = split.basis_plus * out.coords_plus + split.basis_minus * out.coords_minus;
    return out;
}

CentralFiber central_fiber(const LinearSystem& sys, const SpectralSplit& split,
                           const PCWControl& u) {
    const BoundedSolution e = bounded_solution_e0(sys, split, u);
    const int n = sys.state_dim();
    const int k0 = split.dim_zero();

    CentralFiber f;
    f.u = u;
    f.e0 = e.hyperbolic_coords();
    f.center_basis = split.basis_zero;
    f.dimension = 1 + k0;

    Matrix raw(n + 1, 1 + k0);
    raw.col(0).head(n) = -e.ambient;
    raw(n, 0) = 1.0;
    for (int j = 0; j < k0; ++j) {
        raw.col(1 + j).head(n) = split.basis_zero.col(j);
        raw(n, 1 + j) = 0.0;
    }
    Eigen::HouseholderQR<Matrix> qr(raw);
    f.fiber_basis = qr.householderQ() * Matrix::Identity(n + 1, 1 + k0);
    return f;
}

namespace {

// Deterministic vertex-valued piecewise-constant control family:
// constants at the U vertices first, then two-piece switches between
// ordered vertex pairs at a small set of switching times.
std::vector<PCWControl> sample_controls(const ControlRange& U, int samples) {
    std::vector<PCWControl> out;
    const Matrix& V = U.vertices();
    const int nv = static_cast<int>(V.cols());
    for (int i = 0; i < nv && static_cast<int>(out.size()) < samples; ++i)
        out.push_back(PCWControl::constant(V.col(i)));
    static const double switch_times[] = {-1.5, -0.75, 0.75, 1.5};
    for (double ts : switch_times) {
        for (int i = 0; i < nv; ++i) {
            for (int j = 0; j < nv; ++j) {
                if (i == j) continue;
                if (static_cast<int>(out.size()) >= samples) return out;
                out.push_back(PCWControl{{ts - 1.0, ts}, {V.col(i), V.col(j)}});
            }
        }
    }
    // richer alternation when very many samples are requested
    int level = 0;
    while (static_cast<int>(out.size()) < samples) {
        const int i = level % nv, j = (level / nv) % nv;
        const double t0 = -2.0 + 0.1 * (level % 37);
        out.push_back(PCWControl{{t0, t0 + 0.5, t0 + 1.0}, {V.col(i), V.col(j), V.col(i)}});
        ++level;
    }
    return out;
}

std::vector<Vector> center_grid(const Matrix& basis, double r_plot) {
    std::vector<Vector> out;
    const int k = static_cast<int>(basis.cols());
    const int n = static_cast<int>(basis.rows());
    if (k == 0) {
        out.push_back(Vector::Zero(n));
        return out;
    }
    const int per_axis = k == 1 ? 9 : (k == 2 ? 5 : 3);
    std::vector<int> idx(k, 0);
    while (true) {
        Vector z = Vector::Zero(n);
        Vector c(k);
        for (int i = 0; i < k; ++i)
            c[i] = per_axis == 1 ? 0.0 : -r_plot + 2.0 * r_plot * idx[i] / (per_axis - 1);
        if (c.norm() <= r_plot + 1e-12) {
            z = basis * c;
            out.push_back(z);
        }
        int i = 0;
        for (; i < k; ++i) {
            if (++idx[i] < per_axis) break;
            idx[i] = 0;
        }
        if (i == k) break;
    }
    return out;
}

}  // namespace

ProjectiveCloud projective_chain_control_set(const LinearSystem& sys, int samples, double r_plot,
                                             const ReachOptions& opt) {
    const ControlSetResult cs = control_set(sys, opt);
    ProjectiveCloud cloud;
    cloud.E = chain_control_set(sys, cs);
    cloud.fiber_dimension = 1 + cs.split.dim_zero();

    const auto controls = sample_controls(sys.U, std::max(samples, 1));
    const auto offsets = center_grid(cs.split.basis_zero, r_plot);
    for (const auto& u : controls) {
        const BoundedSolution e = bounded_solution_e0(sys, cs.split, u);
        for (const auto& z : offsets) {
            const Vector x = -e.ambient + z;
            if (!membership(cloud.E, x, 1e-6))
                throw Error(ErrorKind::Numerical, "cloud preimage escaped the chain control set");
            ProjPoint p = lift_h1(x);
            bool dup = false;
            for (const auto& q : cloud.points)
                if (proj_distance(p, q) <= 1e-12) { dup = true; break; }
            if (!dup) {
                cloud.points.push_back(std::move(p));
                cloud.preimages.push_back(x);
            }
        }
    }
    return cloud;
}

}  // namespace chainset
