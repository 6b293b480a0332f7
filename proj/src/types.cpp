#include "chainset/types.hpp"

#include <cmath>

namespace chainset {

bool all_finite(const Matrix& M) { return M.allFinite(); }

ControlRange ControlRange::box(const Vector& lo, const Vector& hi) {
    if (lo.size() != hi.size() || lo.size() == 0)
        throw DimensionMismatch("control box bounds");
    if (!lo.allFinite() || !hi.allFinite()) throw NonFinite("control box bounds");
    for (int i = 0; i < lo.size(); ++i) {
        if (!(lo[i] < 0.0 && 0.0 < hi[i]))
            throw ParseError("control box must satisfy lo < 0 < hi componentwise");
    }
    ControlRange r;
    r.kind_ = Kind::Box;
    r.dim_ = static_cast<int>(lo.size());
    r.lo_ = lo;
    r.hi_ = hi;
    const int m = r.dim_;
    if (m > 16) throw GridTooLarge("box control range with m > 16 (vertex enumeration)");
    const int nv = 1 << m;
    r.vertices_.resize(m, nv);
    for (int v = 0; v < nv; ++v)
        for (int i = 0; i < m; ++i) r.vertices_(i, v) = (v >> i) & 1 ? hi[i] : lo[i];
    return r;
}

ControlRange ControlRange::polytope(const Matrix& vertices) {
    if (vertices.cols() == 0 || vertices.rows() == 0)
        throw ParseError("polytope control range needs a nonempty vertex list");
    if (!vertices.allFinite()) throw NonFinite("polytope vertices");
    ControlRange r;
    r.kind_ = Kind::Polytope;
    r.dim_ = static_cast<int>(vertices.rows());
    r.vertices_ = vertices;
    // 0 strictly interior: support of the hull is positive in every direction.
    const int m = r.dim_;
    const int probes = std::max(2 * m, 16);
    for (int k = 0; k < probes; ++k) {
        Vector d = Vector::Zero(m);
        if (k < 2 * m) {
            d[k / 2] = (k % 2 == 0) ? 1.0 : -1.0;
        } else {
            for (int i = 0; i < m; ++i) d[i] = std::cos(0.7 * (k + 1) * (i + 1));
            if (d.norm() < 1e-12) d[0] = 1.0;
            d.normalize();
        }
        if (r.support(d) <= 1e-12)
            throw ParseError("origin is not strictly interior to the control polytope");
    }
    return r;
}

double ControlRange::support(const Vector& d) const {
    if (d.size() != dim_) throw DimensionMismatch("support direction");
    if (kind_ == Kind::Box) {
        double h = 0.0;
        for (int i = 0; i < dim_; ++i) h += d[i] > 0.0 ? hi_[i] * d[i] : lo_[i] * d[i];
        return h;
    }
    return (vertices_.transpose() * d).maxCoeff();
}

bool ControlRange::contains(const Vector& u, double slack) const {
    if (u.size() != dim_) return false;
    if (kind_ == Kind::Box) {
        for (int i = 0; i < dim_; ++i)
            if (u[i] < lo_[i] - slack || u[i] > hi_[i] + slack) return false;
        return true;
    }
    // Outer support check over a deterministic direction set; exact for
    // m = 1, adequate at control dimensions used here.
    const int m = dim_;
    const int nd = std::max(2 * m, 8 * m);
    for (int k = 0; k < nd; ++k) {
        Vector d(m);
        if (k < 2 * m) {
            d.setZero();
            d[k / 2] = (k % 2 == 0) ? 1.0 : -1.0;
        } else {
            for (int i = 0; i < m; ++i) d[i] = std::sin(1.3 * (k + 1) * (i + 2)) + std::cos(0.41 * (k + 1));
            if (d.norm() < 1e-12) d[0] = 1.0;
            d.normalize();
        }
        if (u.dot(d) > support(d) + slack) return false;
    }
    return true;
}

bool ControlRange::is_symmetric(double tol) const {
    if (kind_ == Kind::Box) {
        for (int i = 0; i < dim_; ++i)
            if (std::abs(lo_[i] + hi_[i]) > tol) return false;
        return true;
    }
    for (int v = 0; v < vertices_.cols(); ++v)
        if (!contains(-vertices_.col(v), tol + 1e-9)) return false;
    return true;
}

LinearSystem LinearSystem::make(const Matrix& A, const Matrix& B, const ControlRange& U) {
    if (A.rows() != A.cols() || A.rows() < 1) throw DimensionMismatch("A must be square, n >= 1");
    if (B.rows() != A.rows() || B.cols() < 1) throw DimensionMismatch("B must be n x m, m >= 1");
    if (!A.allFinite()) throw NonFinite("A");
    if (!B.allFinite()) throw NonFinite("B");
    if (U.dim() != B.cols()) throw DimensionMismatch("control range dimension vs columns of B");
    return LinearSystem{A, B, U};
}

LinearSystem LinearSystem::time_reversed() const { return LinearSystem{-A, -B, U}; }

}  // namespace chainset
