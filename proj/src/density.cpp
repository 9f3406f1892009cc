#include "pxg/density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pxg {

double log_sum_exp(std::span<const double> values)
{
    if (values.empty()) return -std::numeric_limits<double>::infinity();
    const double m = *std::max_element(values.begin(), values.end());
    if (!std::isfinite(m)) return m;
    double acc = 0.0;
    for (double v : values) acc += std::exp(v - m);
    return m + std::log(acc);
}

double gaussian_loglik(const Vector& y, const PrecisionMatrix& omega)
{
    if (y.size() != omega.size()) throw InvalidArgument("gaussian_loglik: dimension mismatch");
    const double quad = (omega.cholesky().transpose() * y).squaredNorm();
    return 0.5 * omega.log_det() - 0.5 * static_cast<double>(y.size()) * kLog2Pi - 0.5 * quad;
}

double pseudo_loglik(const Vector& y, const std::vector<NodeRegression>& regressions)
{
    const int q = static_cast<int>(y.size());
    if (static_cast<int>(regressions.size()) != q) throw InvalidArgument("pseudo_loglik: need one regression per node");
    double total = 0.0;
    for (int s = 0; s < q; ++s) {
        const NodeRegression& r = regressions[static_cast<std::size_t>(s)];
        if (!(r.tau > 0.0)) throw InvalidArgument("pseudo_loglik: tau must be positive");
        if (r.beta.size() != q - 1) throw InvalidArgument("pseudo_loglik: beta must have q-1 entries");
        double mean = 0.0;
        for (int k = 0; k < q - 1; ++k) mean += y(NodeRegression::other_node(s, k)) * r.beta(k);
        const double resid = y(s) - mean;
        total += -0.5 * (kLog2Pi + std::log(r.tau)) - 0.5 * resid * resid / r.tau;
    }
    return total;
}

std::vector<NodeRegression> omega_to_regressions(const PrecisionMatrix& omega)
{
    const int q = omega.size();
    std::vector<NodeRegression> out(static_cast<std::size_t>(q));
    for (int s = 0; s < q; ++s) {
        NodeRegression& r = out[static_cast<std::size_t>(s)];
        const double w_ss = omega(s, s);
        r.tau = 1.0 / w_ss;
        r.beta.resize(q - 1);
        r.included.assign(static_cast<std::size_t>(q - 1), 0);
        for (int k = 0; k < q - 1; ++k) {
            const int t = NodeRegression::other_node(s, k);
            r.beta(k) = -omega(s, t) / w_ss;
            r.included[static_cast<std::size_t>(k)] = std::abs(omega(s, t)) > kGraphTolerance;
        }
    }
    return out;
}

double mixture_density(const Vector& y, std::span<const double> weights, const std::vector<PrecisionMatrix>& omegas)
{
    if (weights.empty()) throw InvalidArgument("mixture_density: empty mixture");
    if (weights.size() != omegas.size()) throw InvalidArgument("mixture_density: weights and components differ in length");
    double sum = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw InvalidArgument("mixture_density: negative weight");
        sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-12) throw InvalidArgument("mixture_density: weights must sum to one");
    std::vector<double> terms(weights.size());
    for (std::size_t j = 0; j < weights.size(); ++j)
        terms[j] = std::log(weights[j]) + gaussian_loglik(y, omegas[j]);
    return std::exp(log_sum_exp(terms));
}

double log_isotropic_normal(const Vector& x, const Vector& mu, double sigmasq)
{
    const double p = static_cast<double>(x.size());
    return -0.5 * p * (kLog2Pi + std::log(sigmasq)) - 0.5 * (x - mu).squaredNorm() / sigmasq;
}

double partial_correlation(const Matrix& omega, int s, int t)
{
    return -omega(s, t) / std::sqrt(omega(s, s) * omega(t, t));
}

} // namespace pxg
