#include "chainset/convex.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace chainset {

namespace {

constexpr double kDirMatchTol = 1e-9;
constexpr double kDegenerateWidth = 1e-10;

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

// Beasley-Springer-Moro inverse normal CDF (good to ~1e-9, plenty for a
// direction sequence).
double inv_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425, phigh = 1 - plow;
    double q, r;
    if (p < plow) {
        q = std::sqrt(-2 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
    }
    if (p <= phigh) {
        q = p - 0.5;
        r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
    }
    q = std::sqrt(-2 * std::log(1 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
}

int nth_prime(int k) {
    static const int primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};
    return primes[k % 16];
}

// Polar angle sort for 2-D vertex lists (CCW starting from angle of
// vertex - centroid).
Matrix sort_ccw(const Matrix& pts) {
    const int nv = static_cast<int>(pts.cols());
    if (nv <= 1) return pts;
    Vector c = pts.rowwise().mean();
    std::vector<int> idx(nv);
    for (int i = 0; i < nv; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        const double ta = std::atan2(pts(1, a) - c[1], pts(0, a) - c[0]);
        const double tb = std::atan2(pts(1, b) - c[1], pts(0, b) - c[0]);
        return ta < tb;
    });
    Matrix out(2, nv);
    for (int i = 0; i < nv; ++i) out.col(i) = pts.col(idx[i]);
    return out;
}

double cross2(const Vector& o, const Vector& a, const Vector& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Monotone-chain hull, CCW, duplicates merged.
Matrix hull_2d(const Matrix& pts_in) {
    std::vector<Vector> pts;
    for (int i = 0; i < pts_in.cols(); ++i) {
        Vector p = pts_in.col(i);
        bool dup = false;
        for (const auto& q : pts)
            if ((p - q).norm() <= 1e-12) { dup = true; break; }
        if (!dup) pts.push_back(p);
    }
    const int n = static_cast<int>(pts.size());
    if (n <= 2) {
        Matrix out(2, n);
        for (int i = 0; i < n; ++i) out.col(i) = pts[i];
        return n == 2 ? sort_ccw(out) : out;
    }
    std::sort(pts.begin(), pts.end(), [](const Vector& a, const Vector& b) {
        return a[0] < b[0] || (a[0] == b[0] && a[1] < b[1]);
    });
    std::vector<Vector> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross2(h[k - 2], h[k - 1], pts[i]) <= 1e-14) k--;
        h[k++] = pts[i];
    }
    for (int i = n - 2, t = k + 1; i >= 0; i--) {
        while (k >= t && cross2(h[k - 2], h[k - 1], pts[i]) <= 1e-14) k--;
        h[k++] = pts[i];
    }
    h.resize(k - 1);
    Matrix out(2, h.size());
    for (size_t i = 0; i < h.size(); ++i) out.col(static_cast<int>(i)) = h[i];
    return out;
}

// Small dense simplex on the dual  min h^T y  s.t.  D y = w, y >= 0
// (= support of the outer polyhedron {x : D^T x <= h} in direction w).
// Basis size equals the ambient dimension, so this stays cheap.
double support_lp(const Matrix& D, const Vector& h, const Vector& w) {
    const int n = static_cast<int>(D.rows());
    const int m = static_cast<int>(D.cols());

    // Phase 1 with artificial variables sign-matched to w.
    Matrix Dx(n, m + n);
    Dx.leftCols(m) = D;
    Dx.rightCols(n).setZero();
    for (int i = 0; i < n; ++i) Dx(i, m + i) = w[i] >= 0.0 ? 1.0 : -1.0;
    Vector cost1 = Vector::Zero(m + n);
    cost1.tail(n).setOnes();

    std::vector<int> basis(n);
    for (int i = 0; i < n; ++i) basis[i] = m + i;

    auto solve = [&](const Vector& cost, int total, int max_iter) -> bool {
        for (int iter = 0; iter < max_iter; ++iter) {
            Matrix Bm(n, n);
            for (int i = 0; i < n; ++i) Bm.col(i) = Dx.col(basis[i]);
            Eigen::FullPivLU<Matrix> lu(Bm);
            if (!lu.isInvertible()) return false;
            Vector xb = lu.solve(w);
            Vector cb(n);
            for (int i = 0; i < n; ++i) cb[i] = cost[basis[i]];
            Vector y = lu.transpose().solve(cb);  // simplex multipliers
            // Bland's rule: first column with negative reduced cost.
            int enter = -1;
            for (int j = 0; j < total; ++j) {
                if (std::find(basis.begin(), basis.end(), j) != basis.end()) continue;
                const double rc = cost[j] - y.dot(Dx.col(j));
                if (rc < -1e-11) { enter = j; break; }
            }
            if (enter < 0) return true;  // optimal
            Vector dir = lu.solve(Dx.col(enter));
            int leave = -1;
            double best = 0.0;
            for (int i = 0; i < n; ++i) {
                if (dir[i] > 1e-12) {
                    const double ratio = xb[i] / dir[i];
                    if (leave < 0 || ratio < best - 1e-15 ||
                        (std::abs(ratio - best) <= 1e-15 && basis[i] < basis[leave])) {
                        leave = i;
                        best = ratio;
                    }
                }
            }
            if (leave < 0) return false;  // unbounded dual = infeasible primal direction
            basis[leave] = enter;
        }
        return false;
    };

    const int max_iter = 50 * (m + n);
    if (!solve(cost1, m + n, max_iter)) throw QuadratureFailure("support LP phase 1 stalled");
    {
        Matrix Bm(n, n);
        for (int i = 0; i < n; ++i) Bm.col(i) = Dx.col(basis[i]);
        Vector xb = Eigen::FullPivLU<Matrix>(Bm).solve(w);
        double art = 0.0;
        for (int i = 0; i < n; ++i)
            if (basis[i] >= m) art += std::abs(xb[i]);
        if (art > 1e-8) throw QuadratureFailure("support LP infeasible (direction outside cone)");
    }
    Vector cost2 = Vector::Zero(m + n);
    cost2.head(m) = h;
    cost2.tail(n).setConstant(1e20);  // keep artificials out
    if (!solve(cost2, m, max_iter)) throw QuadratureFailure("support LP phase 2 stalled");

    Matrix Bm(n, n);
    for (int i = 0; i < n; ++i) Bm.col(i) = Dx.col(basis[i]);
    Vector xb = Eigen::FullPivLU<Matrix>(Bm).solve(w);
    double val = 0.0;
    for (int i = 0; i < n; ++i) val += cost2[basis[i]] * xb[i];
    return val;
}

}  // namespace

Matrix default_directions(int dim) {
    if (dim <= 0) return Matrix(std::max(dim, 0), 0);
    if (dim == 1) {
        Matrix d(1, 2);
        d << 1.0, -1.0;
        return d;
    }
    if (dim == 2) {
        const int nd = 128;
        Matrix d(2, nd);
        for (int j = 0; j < nd; ++j) {
            const double th = 2.0 * std::numbers::pi * j / nd;
            d(0, j) = std::cos(th);
            d(1, j) = std::sin(th);
        }
        return d;
    }
    const int half = 32 * dim;
    Matrix d(dim, 2 * half);
    for (int j = 0; j < half; ++j) {
        Vector v(dim);
        for (int i = 0; i < dim; ++i) {
            double u = halton(j + 1, nth_prime(i));
            u = std::min(std::max(u, 1e-12), 1.0 - 1e-12);
            v[i] = inv_normal_cdf(u);
        }
        if (v.norm() < 1e-9) v[0] = 1.0;
        v.normalize();
        d.col(2 * j) = v;
        d.col(2 * j + 1) = -v;
    }
    return d;
}

ConvexBody ConvexBody::from_support(int dim, const std::function<double(const Vector&)>& h,
                                    Matrix dirs) {
    ConvexBody b;
    b.ambient_dim_ = dim;
    if (dim == 0) {
        b.directions_ = Matrix(0, 0);
        b.support_values_ = Vector(0);
        b.vertices_ = Matrix(0, 1);
        return b;
    }
    b.directions_ = dirs.size() == 0 ? default_directions(dim) : std::move(dirs);
    const int nd = static_cast<int>(b.directions_.cols());
    b.support_values_.resize(nd);
    for (int j = 0; j < nd; ++j) {
        const double v = h(b.directions_.col(j));
        if (!std::isfinite(v)) throw NonFinite("support sample");
        b.support_values_[j] = v;
    }
    if (dim <= 2) b.derive_vertices_2d();
    return b;
}

ConvexBody ConvexBody::from_points(const Matrix& points, Matrix dirs) {
    if (points.cols() == 0) throw DimensionMismatch("from_points needs at least one point");
    const int dim = static_cast<int>(points.rows());
    ConvexBody b;
    b.ambient_dim_ = dim;
    if (dim == 0) {
        b.directions_ = Matrix(0, 0);
        b.support_values_ = Vector(0);
        b.vertices_ = Matrix(0, 1);
        return b;
    }
    b.directions_ = dirs.size() == 0 ? default_directions(dim) : std::move(dirs);
    const int nd = static_cast<int>(b.directions_.cols());
    b.support_values_.resize(nd);
    for (int j = 0; j < nd; ++j)
        b.support_values_[j] = (points.transpose() * b.directions_.col(j)).maxCoeff();
    if (dim == 1) {
        Matrix v(1, 2);
        v(0, 0) = points.minCoeff();
        v(0, 1) = points.maxCoeff();
        if (std::abs(v(0, 1) - v(0, 0)) <= kDegenerateWidth) b.vertices_ = v.leftCols(1);
        else b.vertices_ = v;
    } else if (dim == 2) {
        b.vertices_ = hull_2d(points);
    }
    return b;
}

ConvexBody ConvexBody::box(const Vector& lo, const Vector& hi) {
    const int dim = static_cast<int>(lo.size());
    if (hi.size() != lo.size()) throw DimensionMismatch("box bounds");
    return ConvexBody::from_support(dim, [&](const Vector& d) {
        double h = 0.0;
        for (int i = 0; i < dim; ++i) h += d[i] > 0.0 ? hi[i] * d[i] : lo[i] * d[i];
        return h;
    });
}

ConvexBody ConvexBody::point(const Vector& p) {
    Matrix pts(p.size(), 1);
    pts.col(0) = p;
    return from_points(pts);
}

void ConvexBody::derive_vertices_2d() {
    if (ambient_dim_ == 1) {
        double hplus = 0.0, hminus = 0.0;
        for (int j = 0; j < directions_.cols(); ++j) {
            if (directions_(0, j) > 0) hplus = support_values_[j] / directions_(0, j);
            else hminus = support_values_[j] / -directions_(0, j);
        }
        Matrix v(1, 2);
        v(0, 0) = -hminus;
        v(0, 1) = hplus;
        if (hplus + hminus <= kDegenerateWidth) vertices_ = v.leftCols(1);
        else vertices_ = v;
        return;
    }

    // Outer polygon: intersect consecutive support lines in angular order.
    const int nd = static_cast<int>(directions_.cols());
    std::vector<int> order(nd);
    for (int i = 0; i < nd; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return std::atan2(directions_(1, a), directions_(0, a)) <
               std::atan2(directions_(1, b), directions_(0, b));
    });

    // Degenerate widths: body is a segment or a point.
    double min_width = std::numeric_limits<double>::infinity();
    int thin_dir = -1;
    for (int a = 0; a < nd; ++a) {
        for (int b = a + 1; b < nd; ++b) {
            if ((directions_.col(a) + directions_.col(b)).norm() > 1e-9) continue;
            const double w = support_values_[a] + support_values_[b];
            if (w < min_width) {
                min_width = w;
                thin_dir = a;
            }
        }
    }
    if (thin_dir >= 0 && min_width <= kDegenerateWidth) {
        const Vector dn = directions_.col(thin_dir);
        const Vector t = Vector{{-dn[1], dn[0]}};
        double hp = std::numeric_limits<double>::infinity();
        double hm = std::numeric_limits<double>::infinity();
        // supports along +-t from the sampled values (exact when +-t sampled,
        // outer estimate otherwise)
        for (int j = 0; j < nd; ++j) {
            const double ct = directions_.col(j).dot(t);
            if (std::abs(ct) < 1e-9) continue;
            // line point p = h(dn) dn + s t must satisfy <p, d_j> <= h_j
            const double room = support_values_[j] - support_values_[thin_dir] * directions_.col(j).dot(dn);
            if (ct > 0) hp = std::min(hp, room / ct);
            else hm = std::min(hm, room / -ct);
        }
        const Vector base = support_values_[thin_dir] * dn;
        if (!std::isfinite(hp) || !std::isfinite(hm)) { vertices_ = Matrix(2, 0); return; }
        if (hp + hm <= kDegenerateWidth) {
            Matrix v(2, 1);
            v.col(0) = base + 0.5 * (hp - hm) * t;
            vertices_ = v;
        } else {
            Matrix v(2, 2);
            v.col(0) = base - hm * t;
            v.col(1) = base + hp * t;
            vertices_ = v;
        }
        return;
    }

    std::vector<Vector> pts;
    for (int i = 0; i < nd; ++i) {
        const int a = order[i], b = order[(i + 1) % nd];
        Matrix M(2, 2);
        M.row(0) = directions_.col(a).transpose();
        M.row(1) = directions_.col(b).transpose();
        const double det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
        if (std::abs(det) < 1e-12) continue;  // parallel support lines
        Vector rhs{{support_values_[a], support_values_[b]}};
        Vector p = M.inverse() * rhs;
        pts.push_back(p);
    }
    Matrix P(2, pts.size());
    for (size_t i = 0; i < pts.size(); ++i) P.col(static_cast<int>(i)) = pts[i];
    vertices_ = hull_2d(P);
}

double ConvexBody::support(const Vector& d) const {
    if (ambient_dim_ == 0) return 0.0;
    if (d.size() != ambient_dim_) throw DimensionMismatch("support direction");
    const double nrm = d.norm();
    if (nrm <= 1e-300) return 0.0;
    if (vertices_ && vertices_->cols() > 0) return (vertices_->transpose() * d).maxCoeff();
    const Vector dn = d / nrm;
    for (int j = 0; j < directions_.cols(); ++j)
        if ((directions_.col(j) - dn).norm() <= kDirMatchTol) return nrm * support_values_[j];
    return nrm * support_lp(directions_, support_values_, dn);
}

bool ConvexBody::contains(const Vector& x, double slack) const {
    if (ambient_dim_ == 0) return true;
    if (x.size() != ambient_dim_) return false;
    for (int j = 0; j < directions_.cols(); ++j)
        if (x.dot(directions_.col(j)) > support_values_[j] + slack) return false;
    return true;
}

ConvexBody minkowski_sum(const ConvexBody& P, const ConvexBody& Q) {
    if (P.ambient_dim() != Q.ambient_dim()) throw DimensionMismatch("minkowski_sum");
    if (P.ambient_dim() == 0) return P;
    ConvexBody out;
    out.ambient_dim_ = P.ambient_dim();
    out.directions_ = P.directions_;
    const int nd = static_cast<int>(out.directions_.cols());
    out.support_values_.resize(nd);
    const bool shared = Q.directions_.cols() == P.directions_.cols() &&
                        (Q.directions_ - P.directions_).norm() <= 1e-12;
    for (int j = 0; j < nd; ++j) {
        const double hq = shared ? Q.support_values_[j] : Q.support(out.directions_.col(j));
        out.support_values_[j] = P.support_values_[j] + hq;
    }
    if (P.ambient_dim() <= 2 && P.vertices_ && Q.vertices_) {
        const Matrix& VP = *P.vertices_;
        const Matrix& VQ = *Q.vertices_;
        if (VP.cols() == 0 || VQ.cols() == 0) {
            out.vertices_ = Matrix(P.ambient_dim(), 0);
        } else {
            Matrix sums(P.ambient_dim(), VP.cols() * VQ.cols());
            int k = 0;
            for (int i = 0; i < VP.cols(); ++i)
                for (int j = 0; j < VQ.cols(); ++j) sums.col(k++) = VP.col(i) + VQ.col(j);
            if (P.ambient_dim() == 1) {
                Matrix v(1, 2);
                v(0, 0) = sums.row(0).minCoeff();
                v(0, 1) = sums.row(0).maxCoeff();
                out.vertices_ = (v(0, 1) - v(0, 0) <= kDegenerateWidth) ? v.leftCols(1) : v;
            } else {
                out.vertices_ = hull_2d(sums);
            }
        }
    }
    out.open_interior = P.open_interior && Q.open_interior;
    return out;
}

ConvexBody project_body(const ConvexBody& P, const Matrix& Pi) {
    if (Pi.rows() != Pi.cols() || Pi.rows() != P.ambient_dim())
        throw DimensionMismatch("project_body");
    if ((Pi * Pi - Pi).norm() > 1e-10 * std::max(1.0, Pi.norm()))
        throw NotIdempotent("project_body");
    if (P.ambient_dim() == 0) return P;
    if (P.has_vertices()) {
        Matrix pv = Pi * P.vertices();
        ConvexBody out = ConvexBody::from_points(pv, P.directions());
        out.open_interior = P.open_interior;
        return out;
    }
    ConvexBody out;
    out.ambient_dim_ = P.ambient_dim();
    out.directions_ = P.directions_;
    const int nd = static_cast<int>(out.directions_.cols());
    out.support_values_.resize(nd);
    for (int j = 0; j < nd; ++j) out.support_values_[j] = P.support(Pi.transpose() * out.directions_.col(j));
    out.open_interior = P.open_interior;
    return out;
}

double support_distance(const ConvexBody& P, const ConvexBody& Q) {
    if (P.ambient_dim() != Q.ambient_dim()) throw DimensionMismatch("support_distance");
    if (P.ambient_dim() == 0) return 0.0;
    double m = 0.0;
    const bool shared = Q.directions().cols() == P.directions().cols() &&
                        (Q.directions() - P.directions()).norm() <= 1e-12;
    for (int j = 0; j < P.directions().cols(); ++j) {
        const double hq =
            shared ? Q.support_values()[j] : Q.support(P.directions().col(j));
        m = std::max(m, std::abs(P.support_values()[j] - hq));
    }
    return m;
}

namespace {

double dist_point_segment(const Vector& p, const Vector& a, const Vector& b) {
    const Vector ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 <= 1e-300) return (p - a).norm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

double dist_point_polygon(const Vector& p, const Matrix& poly) {
    const int nv = static_cast<int>(poly.cols());
    if (nv == 0) return std::numeric_limits<double>::infinity();
    if (nv == 1) return (p - poly.col(0)).norm();
    if (point_in_polygon(poly, p)) return 0.0;
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nv; ++i)
        d = std::min(d, dist_point_segment(p, poly.col(i), poly.col((i + 1) % nv)));
    return d;
}

}  // namespace

double hausdorff_distance(const ConvexBody& P, const ConvexBody& Q) {
    if (P.ambient_dim() != Q.ambient_dim()) throw DimensionMismatch("hausdorff_distance");
    if (P.ambient_dim() == 2 && P.has_vertices() && Q.has_vertices() && P.vertices().cols() > 0 &&
        Q.vertices().cols() > 0) {
        double d = 0.0;
        for (int i = 0; i < P.vertices().cols(); ++i)
            d = std::max(d, dist_point_polygon(P.vertices().col(i), Q.vertices()));
        for (int i = 0; i < Q.vertices().cols(); ++i)
            d = std::max(d, dist_point_polygon(Q.vertices().col(i), P.vertices()));
        return d;
    }
    if (P.ambient_dim() == 1 && P.has_vertices() && Q.has_vertices() && P.vertices().cols() > 0 &&
        Q.vertices().cols() > 0) {
        const double plo = P.vertices().row(0).minCoeff(), phi = P.vertices().row(0).maxCoeff();
        const double qlo = Q.vertices().row(0).minCoeff(), qhi = Q.vertices().row(0).maxCoeff();
        return std::max(std::abs(plo - qlo), std::abs(phi - qhi));
    }
    return support_distance(P, Q);
}

bool point_in_polygon(const Matrix& poly, const Vector& x, double slack) {
    const int nv = static_cast<int>(poly.cols());
    if (nv == 0) return false;
    if (nv == 1) return (x - poly.col(0)).norm() <= std::max(slack, 1e-9);
    if (nv == 2) return dist_point_segment(x, poly.col(0), poly.col(1)) <= std::max(slack, 1e-9);
    for (int i = 0; i < nv; ++i) {
        const Vector a = poly.col(i), b = poly.col((i + 1) % nv);
        const double c = (b[0] - a[0]) * (x[1] - a[1]) - (b[1] - a[1]) * (x[0] - a[0]);
        const double scale = (b - a).norm();
        if (c < -slack * std::max(1.0, scale) - 1e-12 * scale) return false;
    }
    return true;
}

double distance_to_polygon_boundary(const Matrix& poly, const Vector& x) {
    const int nv = static_cast<int>(poly.cols());
    if (nv == 0) return std::numeric_limits<double>::infinity();
    if (nv <= 2) return dist_point_polygon(x, poly);
    double d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < nv; ++i)
        d = std::min(d, dist_point_segment(x, poly.col(i), poly.col((i + 1) % nv)));
    return d;
}

Matrix orthogonal_complement(int n, const Matrix& basis) {
    if (basis.cols() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(basis, Eigen::ComputeFullU);
    return svd.matrixU().rightCols(n - basis.cols());
}

Matrix subspace_intersection(const Matrix& U1, const Matrix& U2) {
    const int n = static_cast<int>(U1.rows());
    if (U2.rows() != n) throw DimensionMismatch("subspace_intersection");
    if (U1.cols() == 0 || U2.cols() == 0) return Matrix(n, 0);
    const Matrix N1 = orthogonal_complement(n, U1);
    const Matrix N2 = orthogonal_complement(n, U2);
    Matrix S(N1.cols() + N2.cols(), n);
    S << N1.transpose(), N2.transpose();
    if (S.rows() == 0) return Matrix::Identity(n, n);
    Eigen::JacobiSVD<Matrix> svd(S, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    int null_dim = n - static_cast<int>(sv.size());
    for (int i = static_cast<int>(sv.size()) - 1; i >= 0; --i)
        if (sv(i) <= 1e-10) ++null_dim;
    return svd.matrixV().rightCols(null_dim);
}

AffineSetSum AffineSetSum::from_oracle(int n, const Matrix& subspace_basis,
                                       const std::function<double(const Vector&)>& ambient_support) {
    AffineSetSum s;
    s.subspace_basis = subspace_basis;
    s.w_basis = orthogonal_complement(n, subspace_basis);
    const int wd = static_cast<int>(s.w_basis.cols());
    s.compact = ConvexBody::from_support(
        wd, [&](const Vector& d) { return ambient_support(s.w_basis * d); });
    return s;
}

bool membership(const AffineSetSum& S, const Vector& x, double slack) {
    if (x.size() != S.ambient_dim()) throw DimensionMismatch("membership");
    const Vector w = S.w_basis.transpose() * x;
    return S.compact.contains(w, slack);
}

Matrix AffineSetSum::clip_to_box_2d(const Vector& lo, const Vector& hi) const {
    if (ambient_dim() != 2) throw DimensionMismatch("clip_to_box_2d is 2-D only");
    // Build an ambient polygon for compact (+) S, then clip to the box.
    Matrix poly;
    const int k = static_cast<int>(subspace_basis.cols());
    const double big = 4.0 * ((hi - lo).norm() + hi.norm() + lo.norm() + 1.0);
    if (k == 2) {
        poly.resize(2, 4);
        poly << -big, big, big, -big, -big, -big, big, big;
    } else if (k == 1) {
        const Matrix& cv = compact.vertices();  // 1-D vertices in W coordinates
        double wlo = 0.0, whi = 0.0;
        if (cv.cols() > 0) {
            wlo = cv.row(0).minCoeff();
            whi = cv.row(0).maxCoeff();
        }
        const Vector wdir = w_basis.col(0), sdir = subspace_basis.col(0);
        Matrix quad(2, 4);
        quad.col(0) = wlo * wdir - big * sdir;
        quad.col(1) = whi * wdir - big * sdir;
        quad.col(2) = whi * wdir + big * sdir;
        quad.col(3) = wlo * wdir + big * sdir;
        poly = hull_2d(quad);
        if (poly.cols() < 3) poly = quad;  // degenerate band (segment sum)
    } else {
        if (!compact.has_vertices()) throw DimensionMismatch("compact part has no vertices");
        poly = compact.vertices();  // W = R^2
    }
    // Sutherland-Hodgman against the four box half-planes.
    auto clip_half = [](const Matrix& in, const Vector& nrm, double off) {
        std::vector<Vector> out;
        const int nv = static_cast<int>(in.cols());
        for (int i = 0; i < nv; ++i) {
            const Vector a = in.col(i), b = in.col((i + 1) % nv);
            const double da = nrm.dot(a) - off, db = nrm.dot(b) - off;
            if (da <= 1e-12) out.push_back(a);
            if ((da < -1e-12 && db > 1e-12) || (da > 1e-12 && db < -1e-12)) {
                const double t = da / (da - db);
                out.push_back(a + t * (b - a));
            }
        }
        Matrix o(2, out.size());
        for (size_t i = 0; i < out.size(); ++i) o.col(static_cast<int>(i)) = out[i];
        return o;
    };
    if (poly.cols() < 3) {
        // segment or point: clamp into the box componentwise
        Matrix out = poly;
        for (int i = 0; i < out.cols(); ++i)
            for (int r = 0; r < 2; ++r) out(r, i) = std::clamp(out(r, i), lo[r], hi[r]);
        return out;
    }
    poly = clip_half(poly, Vector{{1.0, 0.0}}, hi[0]);
    if (poly.cols() >= 3) poly = clip_half(poly, Vector{{-1.0, 0.0}}, -lo[0]);
    if (poly.cols() >= 3) poly = clip_half(poly, Vector{{0.0, 1.0}}, hi[1]);
    if (poly.cols() >= 3) poly = clip_half(poly, Vector{{0.0, -1.0}}, -lo[1]);
    return poly;
}

}  // namespace chainset
