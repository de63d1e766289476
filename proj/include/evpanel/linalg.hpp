#pragma once

#include "evpanel/error.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace evpanel::linalg {

/// Thin QR factorization of the linearly independent columns of X, produced
/// in original column order. Columns whose residual norm after projection on
/// the preceding retained columns falls below rel_tol x (largest original
/// column norm) are dropped, so exact duplicates and exact linear
/// combinations of *earlier* columns are the ones reported, never their
/// sources. q is n x r with orthonormal columns, r_mat is r x r upper
/// triangular, and X(:, retained) = q * r_mat up to rounding.
template <typename Scalar>
struct RankRevealingQr {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> q;
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> r_mat;
    std::vector<Eigen::Index> retained;
    std::vector<Eigen::Index> dropped;

    Eigen::Index rank() const { return static_cast<Eigen::Index>(retained.size()); }

    /// Least-squares coefficients for the retained columns:
    /// solves r_mat * b = q' y by back substitution.
    template <typename Derived>
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> solve(const Eigen::MatrixBase<Derived>& y) const {
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> qty = q.transpose() * y;
        return r_mat.template triangularView<Eigen::Upper>().solve(qty);
    }
};

/// Modified Gram-Schmidt with one reorthogonalization pass. Processing is
/// strictly left to right; tolerances are relative to the largest original
/// column norm (the leading pivot of a fully pivoted factorization).
template <typename Derived>
RankRevealingQr<typename Derived::Scalar>
rank_revealing_qr(const Eigen::MatrixBase<Derived>& x,
                  typename Derived::Scalar rel_tol = typename Derived::Scalar(1e-10)) {
    using Scalar = typename Derived::Scalar;
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    const Eigen::Index n = x.rows();
    const Eigen::Index p = x.cols();
    if (n == 0 || p == 0)
        fail("rank_revealing_qr: empty matrix");
    if (!x.allFinite())
        fail("rank_revealing_qr: non-finite entries in matrix");

    Scalar scale = 0;
    for (Eigen::Index j = 0; j < p; ++j)
        scale = std::max(scale, x.col(j).norm());
    const Scalar threshold = rel_tol * scale;

    RankRevealingQr<Scalar> f;
    f.q.resize(n, std::min(n, p));
    f.r_mat.resize(std::min(n, p), p);
    Eigen::Index rank = 0;

    Vector v(n), proj(std::min(n, p));
    for (Eigen::Index j = 0; j < p; ++j) {
        v = x.col(j);
        Vector rj = Vector::Zero(rank);
        for (int pass = 0; pass < 2 && rank > 0; ++pass) {
            proj.head(rank).noalias() = f.q.leftCols(rank).transpose() * v;
            v.noalias() -= f.q.leftCols(rank) * proj.head(rank);
            rj += proj.head(rank);
        }
        const Scalar rnorm = v.norm();
        if (rnorm <= threshold || rank == n) {
            f.dropped.push_back(j);
            continue;
        }
        f.q.col(rank) = v / rnorm;
        f.r_mat.col(static_cast<Eigen::Index>(f.retained.size())).head(rank) = rj;
        f.r_mat(rank, static_cast<Eigen::Index>(f.retained.size())) = rnorm;
        f.retained.push_back(j);
        ++rank;
    }
    if (rank == 0)
        fail("rank_revealing_qr: all columns below tolerance");
    f.q.conservativeResize(n, rank);
    Matrix r_final = f.r_mat.topLeftCorner(rank, rank);
    r_final.template triangularView<Eigen::StrictlyLower>().setZero();
    f.r_mat = std::move(r_final);
    return f;
}

/// Solves A b = y by Gaussian elimination with partial pivoting, written as
/// explicit scalar loops. Kept free of any factorization machinery above so
/// it can serve as an independent route in cross-checks.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1>
gaussian_solve(Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a,
               Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y) {
    const Eigen::Index p = a.rows();
    if (a.cols() != p || y.size() != p)
        fail("gaussian_solve: dimension mismatch");
    for (Eigen::Index k = 0; k < p; ++k) {
        Eigen::Index pivot = k;
        for (Eigen::Index i = k + 1; i < p; ++i)
            if (std::abs(a(i, k)) > std::abs(a(pivot, k)))
                pivot = i;
        if (a(pivot, k) == Scalar(0))
            fail("gaussian_solve: singular matrix");
        if (pivot != k) {
            for (Eigen::Index j = 0; j < p; ++j)
                std::swap(a(k, j), a(pivot, j));
            std::swap(y(k), y(pivot));
        }
        for (Eigen::Index i = k + 1; i < p; ++i) {
            const Scalar m = a(i, k) / a(k, k);
            for (Eigen::Index j = k; j < p; ++j)
                a(i, j) -= m * a(k, j);
            y(i) -= m * y(k);
        }
    }
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> b(p);
    for (Eigen::Index i = p - 1; i >= 0; --i) {
        Scalar s = y(i);
        for (Eigen::Index j = i + 1; j < p; ++j)
            s -= a(i, j) * b(j);
        b(i) = s / a(i, i);
    }
    return b;
}

} // namespace evpanel::linalg
