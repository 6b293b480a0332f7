#include "chainset/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <iostream>
#include <lapacke.h>

namespace chainset {

double default_tol_re(const Matrix& A) { return 1e-9 * (1.0 + A.norm()); }

namespace {

enum class EigClass { Plus, Zero, Minus };

EigClass classify(double re, double tol) {
    if (re > tol) return EigClass::Plus;
    if (re < -tol) return EigClass::Minus;
    return EigClass::Zero;
}

// Reorders a real Schur form so that the eigenvalues flagged in `select`
// appear first, and returns the leading columns of the updated Schur
// vectors (an orthonormal basis of the corresponding invariant subspace).
Matrix invariant_basis(const Matrix& T_in, const Matrix& Q_in, const std::vector<int>& select) {
    const int n = static_cast<int>(T_in.rows());
    int m_sel = 0;
    for (int s : select) m_sel += s;
    if (m_sel == 0) return Matrix(n, 0);
    if (m_sel == n) return Q_in;  // whole space

    Matrix T = T_in, Q = Q_in;
    std::vector<lapack_logical> sel(select.begin(), select.end());
    std::vector<double> wr(n), wi(n);
    lapack_int m = 0;
    double s_cond = 0.0, sep = 0.0;
    // explicit workspace: the high-level LAPACKE wrapper's internal
    // workspace query is unreliable on some reference-LAPACK builds
    std::vector<double> work(std::max(64, n * n));
    std::vector<lapack_int> iwork(std::max(64, n * n));
    lapack_int info = LAPACKE_dtrsen_work(
        LAPACK_COL_MAJOR, 'N', 'V', sel.data(), n, T.data(), n, Q.data(), n, wr.data(), wi.data(),
        &m, &s_cond, &sep, work.data(), static_cast<lapack_int>(work.size()), iwork.data(),
        static_cast<lapack_int>(iwork.size()));
    if (info != 0) throw SchurFailure("dtrsen info = " + std::to_string(info));
    return Q.leftCols(m);
}

}  // namespace

Matrix SpectralSplit::hyperbolic_basis() const {
    Matrix H(dim(), dim_plus() + dim_minus());
    H << basis_plus, basis_minus;
    if (H.cols() == 0) return H;
    Eigen::HouseholderQR<Matrix> qr(H);
    Matrix Q = qr.householderQ() * Matrix::Identity(dim(), H.cols());
    return Q;
}

SpectralSplit lyapunov_split(const Matrix& A, double tol_re) {
    if (A.rows() != A.cols() || A.rows() < 1) throw DimensionMismatch("lyapunov_split needs square A");
    if (!A.allFinite()) throw NonFinite("lyapunov_split");
    const int n = static_cast<int>(A.rows());
    if (tol_re <= 0.0) tol_re = default_tol_re(A);

    Eigen::RealSchur<Matrix> schur(A);
    if (schur.info() != Eigen::Success) throw SchurFailure("real Schur did not converge");
    const Matrix T = schur.matrixT();
    const Matrix Q = schur.matrixU();

    SpectralSplit out;
    out.tol_re = tol_re;

    // Diagonal blocks of the quasi-triangular factor; 2x2 blocks carry
    // complex pairs with a common real part.
    std::vector<int> sel_plus(n, 0), sel_zero(n, 0), sel_minus(n, 0);
    for (int i = 0; i < n;) {
        const bool pair = (i + 1 < n) && (T(i + 1, i) != 0.0);
        double re, im = 0.0;
        if (pair) {
            re = 0.5 * (T(i, i) + T(i + 1, i + 1));
            const double prod = (T(i, i) - T(i + 1, i + 1)) * 0.5;
            im = std::sqrt(std::max(0.0, -prod * prod - T(i + 1, i) * T(i, i + 1)));
        } else {
            re = T(i, i);
        }
        const EigClass cls = classify(re, tol_re);
        auto& sel = cls == EigClass::Plus ? sel_plus : cls == EigClass::Zero ? sel_zero : sel_minus;
        sel[i] = 1;
        out.eigenvalues.emplace_back(re, im);
        if (pair) {
            sel[i + 1] = 1;
            out.eigenvalues.emplace_back(re, -im);
            i += 2;
        } else {
            i += 1;
        }
        const double are = std::abs(re);
        if (are > 0.1 * tol_re && are <= 10.0 * tol_re) out.near_threshold = true;
    }
    if (out.near_threshold)
        std::cerr << "chainset: warning: eigenvalue real part within 10x of tol_re = " << tol_re
                  << "; center-space assignment may be sensitive\n";

    out.basis_plus = invariant_basis(T, Q, sel_plus);
    out.basis_zero = invariant_basis(T, Q, sel_zero);
    out.basis_minus = invariant_basis(T, Q, sel_minus);

    const int kp = out.dim_plus(), k0 = out.dim_zero(), km = out.dim_minus();
    if (kp + k0 + km != n) throw SchurFailure("Lyapunov block dimensions do not sum to n");

    // Oblique projections along the complementary Lyapunov spaces via
    // block inversion of the joint basis.
    Matrix S(n, n);
    S << out.basis_plus, out.basis_zero, out.basis_minus;
    Eigen::FullPivLU<Matrix> lu(S);
    if (!lu.isInvertible()) throw SchurFailure("joint Lyapunov basis is singular");
    const Matrix Sinv = lu.inverse();
    out.proj_plus = out.basis_plus * Sinv.topRows(kp);
    out.proj_zero = out.basis_zero * Sinv.middleRows(kp, k0);
    out.proj_minus = out.basis_minus * Sinv.bottomRows(km);
    out.proj_h = out.proj_plus + out.proj_minus;
    return out;
}

Matrix matrix_exp(const Matrix& A, double t) {
    if (A.rows() != A.cols()) throw DimensionMismatch("matrix_exp needs square A");
    if (!A.allFinite() || !std::isfinite(t)) throw NonFinite("matrix_exp input");
    Matrix E = (A * t).exp();
    if (!E.allFinite()) throw NonFinite("matrix_exp overflow");
    return E;
}

Matrix controllability_subspace(const Matrix& A, const Matrix& B) {
    if (A.rows() != A.cols() || B.rows() != A.rows())
        throw DimensionMismatch("controllability_subspace");
    if (!A.allFinite() || !B.allFinite()) throw NonFinite("controllability_subspace");
    const int n = static_cast<int>(A.rows());
    const int m = static_cast<int>(B.cols());
    Matrix K(n, n * m);
    Matrix blk = B;
    for (int i = 0; i < n; ++i) {
        K.middleCols(i * m, m) = blk;
        if (i + 1 < n) blk = A * blk;
    }
    Eigen::JacobiSVD<Matrix> svd(K, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    const double cutoff = sv.size() > 0 ? 1e-10 * sv(0) : 0.0;
    int r = 0;
    for (int i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff && sv(i) > 0.0) ++r;
    return svd.matrixU().leftCols(r);
}

}  // namespace chainset
