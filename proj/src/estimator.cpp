#include "evpanel/estimator.hpp"

#include "evpanel/error.hpp"
#include "evpanel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

namespace evpanel {

namespace {
constexpr double kRankRelTol = 1e-10;
}

std::optional<double> FitResult::coefficient(int design_column) const {
    auto it = std::lower_bound(retained_columns.begin(), retained_columns.end(),
                               static_cast<Eigen::Index>(design_column));
    if (it == retained_columns.end() || *it != design_column)
        return std::nullopt;
    return coefficients(it - retained_columns.begin());
}

FitResult fit_least_squares(const DesignProblem& problem) {
    const Eigen::Index n = problem.x.rows();
    const Eigen::Index p = problem.x.cols();
    if (n == 0 || p == 0)
        fail("fit_least_squares: empty design");
    if (!problem.x.allFinite() || !problem.y.allFinite())
        fail("fit_least_squares: non-finite entries in design");

    auto qr = linalg::rank_revealing_qr(problem.x, kRankRelTol);
    if (static_cast<Eigen::Index>(qr.retained.size()) > n)
        fail("fit_least_squares: more retained columns than rows");

    FitResult fit;
    fit.n = n;
    fit.p_retained = qr.rank();
    fit.retained_columns = qr.retained;
    for (Eigen::Index j : qr.dropped)
        fit.dropped_columns.push_back(problem.column_labels[j]);
    fit.coefficients = qr.solve(problem.y);

    fit.residuals = problem.y;
    for (Eigen::Index k = 0; k < fit.p_retained; ++k)
        fit.residuals -= fit.coefficients(k) * problem.x.col(fit.retained_columns[k]);
    fit.rss = fit.residuals.squaredNorm();
    return fit;
}

Eigen::VectorXd normal_equations_solve(const DesignProblem& problem) {
    const Eigen::Index p = problem.x.cols();
    if (problem.x.rows() == 0 || p == 0)
        fail("normal_equations_solve: empty design");
    Eigen::MatrixXd gram = problem.x.transpose() * problem.x;
    Eigen::VectorXd xty = problem.x.transpose() * problem.y;
    return linalg::gaussian_solve(std::move(gram), std::move(xty));
}

Eigen::MatrixXd cluster_robust_cov(const DesignProblem& problem, const FitResult& fit) {
    const Eigen::Index n = fit.n;
    const Eigen::Index p = fit.p_retained;

    std::set<int> distinct(problem.clusters.begin(), problem.clusters.end());
    const int n_clusters = static_cast<int>(distinct.size());
    if (n_clusters < 2)
        fail("cluster_robust_cov: need at least 2 clusters, have " + std::to_string(n_clusters));

    if (fit.residuals.cwiseAbs().maxCoeff() == 0.0)
        return Eigen::MatrixXd::Zero(p, p); // perfect fit, no sampling variance

    if (n <= p)
        fail("cluster_robust_cov: no residual degrees of freedom (n = p)");

    Eigen::MatrixXd xr(n, p);
    for (Eigen::Index k = 0; k < p; ++k)
        xr.col(k) = problem.x.col(fit.retained_columns[k]);

    // meat: sum over clusters of (X_g' e_g)(X_g' e_g)'
    std::map<int, Eigen::VectorXd> scores;
    for (Eigen::Index i = 0; i < n; ++i) {
        auto [it, inserted] = scores.try_emplace(problem.clusters[i], Eigen::VectorXd::Zero(p));
        it->second += fit.residuals(i) * xr.row(i).transpose();
    }
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(p, p);
    for (const auto& [cluster, s] : scores)
        meat.noalias() += s * s.transpose();

    Eigen::MatrixXd bread = (xr.transpose() * xr).ldlt().solve(Eigen::MatrixXd::Identity(p, p));
    const double g = static_cast<double>(n_clusters);
    const double factor = g / (g - 1.0) * (static_cast<double>(n) - 1.0) /
                          (static_cast<double>(n) - static_cast<double>(p));
    return factor * bread * meat * bread;
}

EventStudyResult estimate(const Panel& panel, const EstimationSpec& spec) {
    const DesignProblem dp = build_design(panel, spec);
    const FitResult fit = fit_least_squares(dp);
    const Eigen::MatrixXd cov = cluster_robust_cov(dp, fit);

    // retained design column -> position in the retained ordering
    std::map<int, Eigen::Index> retained_pos;
    for (Eigen::Index k = 0; k < fit.p_retained; ++k)
        retained_pos[static_cast<int>(fit.retained_columns[k])] = k;

    EventStudyResult res;
    res.window_lo = spec.window_lo;
    res.window_hi = spec.window_hi;
    res.reference = spec.reference_event_time;
    const int width = spec.window_hi - spec.window_lo + 1;
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    res.alpha.assign(width, nan);
    res.alpha_se.assign(width, nan);
    res.ci_lo.assign(width, nan);
    res.ci_hi.assign(width, nan);
    res.alpha[spec.reference_event_time - spec.window_lo] = 0.0;
    res.alpha_se[spec.reference_event_time - spec.window_lo] = 0.0;
    res.ci_lo[spec.reference_event_time - spec.window_lo] = 0.0;
    res.ci_hi[spec.reference_event_time - spec.window_lo] = 0.0;

    auto read = [&](int col, double& value, double& se) {
        auto it = retained_pos.find(col);
        if (it == retained_pos.end())
            return; // dropped for collinearity: stays NaN
        value = fit.coefficients(it->second);
        se = std::sqrt(std::max(0.0, cov(it->second, it->second)));
    };

    for (const auto& [j, col] : dp.event_columns) {
        const int k = j - spec.window_lo;
        read(col, res.alpha[k], res.alpha_se[k]);
        if (std::isfinite(res.alpha[k])) {
            res.ci_lo[k] = res.alpha[k] - kNormalCritical95 * res.alpha_se[k];
            res.ci_hi[k] = res.alpha[k] + kNormalCritical95 * res.alpha_se[k];
        }
    }
    if (spec.multi_event()) {
        res.beta.assign(width, nan);
        res.beta_se.assign(width, nan);
        for (const auto& [j, col] : dp.concurrent_columns)
            read(col, res.beta[j - spec.window_lo], res.beta_se[j - spec.window_lo]);
    }

    res.dropped_columns = fit.dropped_columns;
    res.n = fit.n;
    res.n_clusters =
        static_cast<int>(std::set<int>(dp.clusters.begin(), dp.clusters.end()).size());
    res.p_retained = fit.p_retained;
    res.rss = fit.rss;
    return res;
}

} // namespace evpanel
