#pragma once

// Independent scalar-loop oracles. These deliberately avoid the library's
// factorization and covariance code paths (and Eigen solvers): everything is
// written out as explicit loops over matrix entries so a disagreement with
// the library points at a real defect rather than a shared bug.

#include <Eigen/Dense>

#include <map>
#include <vector>

namespace evpanel::testing {

/// Inverse via Gauss-Jordan elimination with partial pivoting, scalar loops.
inline Eigen::MatrixXd invert_by_hand(Eigen::MatrixXd a) {
    const int p = static_cast<int>(a.rows());
    Eigen::MatrixXd inv = Eigen::MatrixXd::Identity(p, p);
    for (int k = 0; k < p; ++k) {
        int pivot = k;
        for (int i = k + 1; i < p; ++i)
            if (std::abs(a(i, k)) > std::abs(a(pivot, k)))
                pivot = i;
        if (pivot != k) {
            for (int j = 0; j < p; ++j) {
                std::swap(a(k, j), a(pivot, j));
                std::swap(inv(k, j), inv(pivot, j));
            }
        }
        const double d = a(k, k);
        for (int j = 0; j < p; ++j) {
            a(k, j) /= d;
            inv(k, j) /= d;
        }
        for (int i = 0; i < p; ++i) {
            if (i == k)
                continue;
            const double m = a(i, k);
            for (int j = 0; j < p; ++j) {
                a(i, j) -= m * a(k, j);
                inv(i, j) -= m * inv(k, j);
            }
        }
    }
    return inv;
}

/// Literal evaluation of the cluster sandwich
/// G/(G-1) * (n-1)/(n-p) * (X'X)^-1 (sum_g X_g' e_g e_g' X_g) (X'X)^-1.
inline Eigen::MatrixXd sandwich_by_hand(const Eigen::MatrixXd& x, const Eigen::VectorXd& e,
                                        const std::vector<int>& clusters) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());

    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
            for (int i = 0; i < n; ++i)
                xtx(a, b) += x(i, a) * x(i, b);
    const Eigen::MatrixXd bread = invert_by_hand(xtx);

    std::map<int, Eigen::VectorXd> scores;
    for (int i = 0; i < n; ++i) {
        auto it = scores.try_emplace(clusters[i], Eigen::VectorXd::Zero(p)).first;
        for (int a = 0; a < p; ++a)
            it->second(a) += x(i, a) * e(i);
    }
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
    for (const auto& [g, s] : scores)
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                meat(a, b) += s(a) * s(b);

    const double g_count = static_cast<double>(scores.size());
    const double factor = g_count / (g_count - 1.0) * (n - 1.0) / (n - p);

    Eigen::MatrixXd half = Eigen::MatrixXd::Zero(p, p);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
            for (int k = 0; k < p; ++k)
                half(a, b) += bread(a, k) * meat(k, b);
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(p, p);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
            for (int k = 0; k < p; ++k)
                cov(a, b) += half(a, k) * bread(k, b);
    return factor * cov;
}

/// Heteroskedasticity-robust covariance (every row its own cluster),
/// n/(n-p) * (X'X)^-1 (sum_i e_i^2 x_i x_i') (X'X)^-1, scalar loops.
inline Eigen::MatrixXd hc_by_hand(const Eigen::MatrixXd& x, const Eigen::VectorXd& e) {
    const int n = static_cast<int>(x.rows());
    const int p = static_cast<int>(x.cols());
    Eigen::MatrixXd xtx = Eigen::MatrixXd::Zero(p, p);
    for (int a = 0; a < p; ++a)
        for (int b = 0; b < p; ++b)
            for (int i = 0; i < n; ++i)
                xtx(a, b) += x(i, a) * x(i, b);
    const Eigen::MatrixXd bread = invert_by_hand(xtx);
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
    for (int i = 0; i < n; ++i)
        for (int a = 0; a < p; ++a)
            for (int b = 0; b < p; ++b)
                meat(a, b) += e(i) * e(i) * x(i, a) * x(i, b);
    return (static_cast<double>(n) / (n - p)) * bread * meat * bread;
}

} // namespace evpanel::testing
