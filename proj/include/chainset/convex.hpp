#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "chainset/types.hpp"

namespace chainset {

/// Deterministic direction set used for support sampling:
/// dim 1 -> {+1, -1}; dim 2 -> 128 uniformly spaced angles; dim k > 2 ->
/// 64*k directions from a Halton sphere sequence closed under negation.
Matrix default_directions(int dim);

/// Compact convex set carried as support-function samples on a fixed
/// direction set, plus an exact vertex list when the ambient dimension
/// is at most 2. Degenerate (segment / point) bodies are kept in the
/// ambient space.
class ConvexBody {
public:
    ConvexBody() = default;

    /// Sample a support oracle on `dirs` (default direction set if empty).
    /// For dim <= 2 the vertex list of the outer polytope is derived.
    static ConvexBody from_support(int dim, const std::function<double(const Vector&)>& h,
                                   Matrix dirs = Matrix());

    /// Hull of a point set (exact supports; vertices kept for dim <= 2).
    static ConvexBody from_points(const Matrix& points, Matrix dirs = Matrix());

    static ConvexBody box(const Vector& lo, const Vector& hi);
    static ConvexBody point(const Vector& p);  // degenerate singleton
    static ConvexBody origin(int dim) { return point(Vector::Zero(dim)); }

    int ambient_dim() const { return ambient_dim_; }
    const Matrix& directions() const { return directions_; }
    const Vector& support_values() const { return support_values_; }
    bool has_vertices() const { return vertices_.has_value(); }
    const Matrix& vertices() const { return *vertices_; }

    /// Support function at an arbitrary direction (positively homogeneous).
    /// Exact via vertices when present, exact at stored directions, and an
    /// outer-polyhedron LP otherwise.
    double support(const Vector& d) const;

    /// Membership in the outer polyhedron: <x, d_i> <= h_i + slack for all i.
    bool contains(const Vector& x, double slack = 1e-8) const;

    bool open_interior = false;  // metadata only; arithmetic uses closures

private:
    int ambient_dim_ = 0;
    Matrix directions_;      // dim x nd, unit columns
    Vector support_values_;  // nd
    std::optional<Matrix> vertices_;  // dim x nv (polar CCW order in 2-D)

    void derive_vertices_2d();
    friend ConvexBody minkowski_sum(const ConvexBody&, const ConvexBody&);
    friend ConvexBody project_body(const ConvexBody&, const Matrix&);
};

/// Support values add pointwise; 2-D vertex lists are combined exactly.
ConvexBody minkowski_sum(const ConvexBody& P, const ConvexBody& Q);

/// Image under an idempotent Pi: h_{Pi P}(d) = h_P(Pi^T d).
ConvexBody project_body(const ConvexBody& P, const Matrix& Pi);

/// max_d |h_P(d) - h_Q(d)| over the shared direction set.
double support_distance(const ConvexBody& P, const ConvexBody& Q);

/// Hausdorff distance; exact (Euclidean) via vertex lists in 2-D,
/// support-metric approximation otherwise.
double hausdorff_distance(const ConvexBody& P, const ConvexBody& Q);

/// Finitely encoded set  compact (+) S  for a subspace S: the compact
/// factor lives in coordinates of W = S-perp, so the least-squares
/// membership split x = w + s is exact.
struct AffineSetSum {
    ConvexBody compact;      // in w_basis coordinates
    Matrix subspace_basis;   // n x k, orthonormal columns spanning S
    Matrix w_basis;          // n x (n-k), orthonormal basis of W = S-perp

    int ambient_dim() const { return static_cast<int>(subspace_basis.rows()); }

    /// Compact convex set K (given in ambient coordinates through its
    /// support oracle) summed with span(subspace_basis).
    static AffineSetSum from_oracle(int n, const Matrix& subspace_basis,
                                    const std::function<double(const Vector&)>& ambient_support);

    /// 2-D only: polygon of the set clipped to an axis box (for plots and
    /// oracle comparisons). Columns are CCW vertices.
    Matrix clip_to_box_2d(const Vector& lo, const Vector& hi) const;
};

bool membership(const AffineSetSum& S, const Vector& x, double slack = 1e-8);

/// Orthonormal basis of the orthogonal complement of span(basis) in R^n.
Matrix orthogonal_complement(int n, const Matrix& basis);

/// Orthonormal basis of span(U1) int span(U2) (SVD of stacked orthogonal
/// complements, singular-value cutoff 1e-10).
Matrix subspace_intersection(const Matrix& U1, const Matrix& U2);

/// Distance from a point to a convex polygon boundary (2-D, CCW vertices).
double distance_to_polygon_boundary(const Matrix& poly, const Vector& x);
bool point_in_polygon(const Matrix& poly, const Vector& x, double slack = 1e-12);

}  // namespace chainset
