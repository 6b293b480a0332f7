#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "chainset/errors.hpp"

namespace chainset {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Compact convex control range U subset R^m with 0 in its interior.
/// Either an axis-aligned box {lo <= u <= hi} or the convex hull of a
/// vertex list.
class ControlRange {
public:
    enum class Kind { Box, Polytope };

    ControlRange() = default;  // empty range (dim 0), placeholder only

    static ControlRange box(const Vector& lo, const Vector& hi);
    static ControlRange polytope(const Matrix& vertices);  // m x nv, columns are vertices

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }

    /// Support function h_U(d) = max_{u in U} <u, d> for arbitrary d.
    double support(const Vector& d) const;

    /// Vertex list (box corners are enumerated; guarded to m <= 16).
    const Matrix& vertices() const { return vertices_; }

    const Vector& lo() const { return lo_; }
    const Vector& hi() const { return hi_; }

    /// Membership test with slack. Exact for boxes and m <= 2 polytopes,
    /// outer (support-sampled) for higher-dimensional polytopes.
    bool contains(const Vector& u, double slack = 1e-9) const;

    /// True when U = -U (support values agree at antipodal directions).
    bool is_symmetric(double tol = 1e-12) const;

private:
    Kind kind_ = Kind::Box;
    int dim_ = 0;
    Vector lo_, hi_;   // box form
    Matrix vertices_;  // m x nv
};

/// Linear control system xdot = A x + B u, u(t) in U.
struct LinearSystem {
    Matrix A;  // n x n
    Matrix B;  // n x m
    ControlRange U;

    int state_dim() const { return static_cast<int>(A.rows()); }
    int input_dim() const { return static_cast<int>(B.cols()); }

    /// Validates the type invariants (finiteness, dimensions, 0 interior to U).
    static LinearSystem make(const Matrix& A, const Matrix& B, const ControlRange& U);

    /// Time-reversed system (-A, -B) with the same control range.
    LinearSystem time_reversed() const;
};

bool all_finite(const Matrix& M);

}  // namespace chainset
