#pragma once

#include "evpanel/design.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace evpanel {

/// Least-squares fit over the linearly independent columns of a design.
struct FitResult {
    Eigen::VectorXd coefficients;               // one per retained column
    std::vector<Eigen::Index> retained_columns; // indices into the design
    std::vector<std::string> dropped_columns;   // labels removed for collinearity
    Eigen::VectorXd residuals;                  // per row
    Eigen::Index n = 0;
    Eigen::Index p_retained = 0;
    double rss = 0.0;

    /// Coefficient of a design column; nullopt when it was dropped.
    std::optional<double> coefficient(int design_column) const;
};

/// Rank-revealing orthogonal factorization with pivot-based column dropping
/// (relative tolerance 1e-10 against the leading pivot). Throws on empty or
/// non-finite input and when there are more retained columns than rows.
FitResult fit_least_squares(const DesignProblem& problem);

/// Independent oracle: solves (X'X) b = X'y by Gaussian elimination with
/// partial pivoting. Requires X full rank; used only for cross-checks.
Eigen::VectorXd normal_equations_solve(const DesignProblem& problem);

/// Cluster-robust sandwich covariance over the retained columns,
/// (X'X)^-1 (sum_g X_g' e_g e_g' X_g) (X'X)^-1 scaled by
/// G/(G-1) * (n-1)/(n-p). Throws with fewer than 2 clusters.
Eigen::MatrixXd cluster_robust_cov(const DesignProblem& problem, const FitResult& fit);

/// Event-study coefficient series with cluster-robust 95% bands. The
/// reference event time carries alpha = 0, se = 0 by construction; event or
/// concurrent columns dropped for collinearity carry NaN.
struct EventStudyResult {
    int window_lo = 0;
    int window_hi = 0;
    int reference = 0;

    // indexed by j - window_lo
    std::vector<double> alpha, alpha_se, ci_lo, ci_hi;
    std::vector<double> beta, beta_se; // empty for single-event variants

    std::vector<std::string> dropped_columns;
    Eigen::Index n = 0;
    int n_clusters = 0;
    Eigen::Index p_retained = 0;
    double rss = 0.0;

    double alpha_at(int j) const { return alpha[j - window_lo]; }
    double se_at(int j) const { return alpha_se[j - window_lo]; }
};

inline constexpr double kNormalCritical95 = 1.96;

/// Builds the design, fits, and extracts the event-study series.
EventStudyResult estimate(const Panel& panel, const EstimationSpec& spec);

} // namespace evpanel
