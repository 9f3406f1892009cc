#include "pxg/ppmx.hpp"

#include <cmath>

#include "pxg/density.hpp"

namespace pxg {

CovariateStats CovariateStats::of(const Matrix& xstar)
{
    CovariateStats s(static_cast<int>(xstar.cols()));
    for (Eigen::Index i = 0; i < xstar.rows(); ++i) s.add(xstar.row(i).transpose());
    return s;
}

CovariateStats CovariateStats::of_rows(const Matrix& x, std::span<const int> rows)
{
    CovariateStats s(static_cast<int>(x.cols()));
    for (int i : rows) s.add(x.row(i).transpose());
    return s;
}

void CovariateStats::add(const Vector& x)
{
    ++m;
    sum += x;
    sumsq += x.squaredNorm();
}

double log_cohesion(int cluster_size, double alpha)
{
    if (cluster_size < 1) throw InvalidArgument("log_cohesion: cluster size must be at least 1");
    return std::log(alpha) + std::lgamma(static_cast<double>(cluster_size));
}

CovariatePosterior covariate_posterior(const CovariateStats& stats, const CovariatePrior& prior)
{
    const double m = stats.m;
    const double p = static_cast<double>(prior.mu0.size());
    CovariatePosterior post;
    post.shrink = prior.sigma0sq / (m * prior.sigma0sq + 1.0);
    const Vector pooled = stats.sum + prior.mu0 / prior.sigma0sq;
    post.mu_star = post.shrink * pooled;
    post.b1_star = 0.5 * m * p + prior.b1;
    const double bracket = stats.sumsq + prior.mu0.squaredNorm() / prior.sigma0sq - pooled.dot(post.mu_star);
    // bracket >= 0 analytically; clamp rounding noise.
    post.b2_star = prior.b2 + 0.5 * std::max(bracket, 0.0);
    return post;
}

CovariatePosterior covariate_posterior(const Matrix& xstar, const CovariatePrior& prior)
{
    if (xstar.rows() > 0 && xstar.cols() != prior.mu0.size())
        throw InvalidArgument("covariate_posterior: column count differs from mu0");
    CovariateStats stats(static_cast<int>(prior.mu0.size()));
    for (Eigen::Index i = 0; i < xstar.rows(); ++i) stats.add(xstar.row(i).transpose());
    return covariate_posterior(stats, prior);
}

double log_similarity(const CovariateStats& stats, const CovariatePrior& prior)
{
    const double m = stats.m;
    const double p = static_cast<double>(prior.mu0.size());
    const CovariatePosterior post = covariate_posterior(stats, prior);
    return -0.5 * m * p * kLog2Pi - 0.5 * p * std::log(m * prior.sigma0sq + 1.0) + prior.b1 * std::log(prior.b2) -
           post.b1_star * std::log(post.b2_star) + std::lgamma(post.b1_star) - std::lgamma(prior.b1);
}

double log_similarity(const Matrix& xstar, const CovariatePrior& prior)
{
    if (xstar.rows() < 1) throw InvalidArgument("log_similarity: need at least one covariate row");
    if (xstar.cols() != prior.mu0.size()) throw InvalidArgument("log_similarity: column count differs from mu0");
    return log_similarity(CovariateStats::of(xstar), prior);
}

CovariateClusterParams draw_covariate_params(const CovariatePosterior& post, Rng& rng)
{
    CovariateClusterParams out;
    out.sigmasq = rng.inv_gamma(post.b1_star, post.b2_star);
    const double sd = std::sqrt(post.shrink * out.sigmasq);
    out.mu = post.mu_star + sd * rng.normal_vector(static_cast<int>(post.mu_star.size()));
    return out;
}

} // namespace pxg
