#ifndef PXG_PPMX_HPP
#define PXG_PPMX_HPP

#include <span>

#include "pxg/hyper.hpp"
#include "pxg/rng.hpp"

namespace pxg {

struct CovariateClusterParams {
    Vector mu;
    double sigmasq = 1.0;
};

/// Conjugate posterior of (mu, sigma^2) given the covariates of one cluster.
/// mu | sigma^2 ~ N_p(mu_star, shrink * sigma^2 I), sigma^2 ~ IG(b1_star, b2_star).
struct CovariatePosterior {
    Vector mu_star;
    double shrink = 1.0;
    double b1_star = 1.0;
    double b2_star = 1.0;
};

/// Sufficient statistics of a covariate block: count, column sums, sum of squared norms.
struct CovariateStats {
    int m = 0;
    Vector sum;
    double sumsq = 0.0;

    explicit CovariateStats(int p) : sum(Vector::Zero(p)) {}
    static CovariateStats of(const Matrix& xstar);
    static CovariateStats of_rows(const Matrix& x, std::span<const int> rows);
    void add(const Vector& x);
};

/// log c(S) = log alpha + log (|S| - 1)!
double log_cohesion(int cluster_size, double alpha);

CovariatePosterior covariate_posterior(const CovariateStats& stats, const CovariatePrior& prior);
CovariatePosterior covariate_posterior(const Matrix& xstar, const CovariatePrior& prior);

/// log g(X*): marginal likelihood of the cluster's covariates with (mu, sigma^2) integrated out.
double log_similarity(const CovariateStats& stats, const CovariatePrior& prior);
double log_similarity(const Matrix& xstar, const CovariatePrior& prior);

CovariateClusterParams draw_covariate_params(const CovariatePosterior& post, Rng& rng);

} // namespace pxg

#endif
