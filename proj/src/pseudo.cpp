#include "pxg/pseudo.hpp"

#include <cmath>

#include "pxg/density.hpp"

namespace pxg {

namespace {

// Rows/columns of the scatter matrix with node s removed.
Matrix drop_node(const Matrix& m, int s)
{
    const int q = static_cast<int>(m.rows());
    Matrix out(q - 1, q - 1);
    for (int a = 0; a < q - 1; ++a)
        for (int b = 0; b < q - 1; ++b)
            out(a, b) = m(NodeRegression::other_node(s, a), NodeRegression::other_node(s, b));
    return out;
}

Vector cross_column(const Matrix& m, int s)
{
    const int q = static_cast<int>(m.rows());
    Vector out(q - 1);
    for (int a = 0; a < q - 1; ++a) out(a) = m(NodeRegression::other_node(s, a), s);
    return out;
}

double slab_variance(bool included, const SpikeSlabParams& ss)
{
    return included ? ss.eta1 : ss.eta0;
}

void check_node(int s, const ClusterData& data, std::size_t included_size)
{
    const int q = static_cast<int>(data.scatter.rows());
    if (s < 0 || s >= q) throw InvalidArgument("pseudo backend: node index out of range");
    if (included_size != static_cast<std::size_t>(q - 1))
        throw InvalidArgument("pseudo backend: indicator vector must have length q-1");
}

} // namespace

double edge_inclusion_probability(double beta_st, double tau_s, const SpikeSlabParams& ss, double alpha_g)
{
    if (!(tau_s > 0.0)) throw InvalidArgument("edge_inclusion_probability: tau must be positive");
    if (alpha_g >= 1.0) return 1.0;
    if (alpha_g <= 0.0) return 0.0;
    const double v1 = ss.eta1 * tau_s;
    const double v0 = ss.eta0 * tau_s;
    const double b2 = beta_st * beta_st;
    const double log1 = std::log(alpha_g) - 0.5 * std::log(v1) - 0.5 * b2 / v1;
    const double log0 = std::log1p(-alpha_g) - 0.5 * std::log(v0) - 0.5 * b2 / v0;
    return 1.0 / (1.0 + std::exp(log0 - log1));
}

bool update_edge_indicator(double beta_st, double tau_s, const Hyperparameters& hyper, Rng& rng)
{
    return rng.uniform() < edge_inclusion_probability(beta_st, tau_s, hyper.spike_slab, hyper.alpha_g);
}

InvGammaParams tau_conditional(int s, const ClusterData& data, const Vector& beta_s,
                               const std::vector<std::uint8_t>& included, const Hyperparameters& hyper)
{
    check_node(s, data, included.size());
    const int q = static_cast<int>(data.scatter.rows());
    const Matrix s_rest = drop_node(data.scatter, s);
    const Vector s_cross = cross_column(data.scatter, s);
    const double rss = std::max(0.0, data.scatter(s, s) - 2.0 * beta_s.dot(s_cross) + beta_s.dot(s_rest * beta_s));
    double penalty = 0.0;
    for (int k = 0; k < q - 1; ++k)
        penalty += beta_s(k) * beta_s(k) / slab_variance(included[k] != 0, hyper.spike_slab);
    const SpikeSlabParams& ss = hyper.spike_slab;
    return {ss.a1 + 0.5 * data.n + 0.5 * (q - 1), ss.a2 + 0.5 * rss + 0.5 * penalty};
}

double update_tau(int s, const ClusterData& data, const Vector& beta_s, const std::vector<std::uint8_t>& included,
                  const Hyperparameters& hyper, Rng& rng)
{
    const InvGammaParams ig = tau_conditional(s, data, beta_s, included, hyper);
    return rng.inv_gamma(ig.shape, ig.rate);
}

BetaConditional beta_conditional(int s, const ClusterData& data, const std::vector<std::uint8_t>& included,
                                 const Hyperparameters& hyper)
{
    check_node(s, data, included.size());
    const int q = static_cast<int>(data.scatter.rows());
    Matrix precision = drop_node(data.scatter, s);
    for (int k = 0; k < q - 1; ++k) precision(k, k) += 1.0 / slab_variance(included[k] != 0, hyper.spike_slab);
    BetaConditional out;
    out.precision_llt.compute(precision);
    if (out.precision_llt.info() != Eigen::Success)
        throw NumericalError("beta_conditional: regression system is not positive definite");
    out.mean = out.precision_llt.solve(cross_column(data.scatter, s));
    return out;
}

Vector update_beta(int s, const ClusterData& data, double tau_s, const std::vector<std::uint8_t>& included,
                   const Hyperparameters& hyper, Rng& rng)
{
    if (!(tau_s > 0.0)) throw InvalidArgument("update_beta: tau must be positive");
    const BetaConditional cond = beta_conditional(s, data, included, hyper);
    const Vector z = rng.normal_vector(static_cast<int>(cond.mean.size()));
    const Vector noise = cond.precision_llt.matrixU().solve(z);
    return cond.mean + std::sqrt(tau_s) * noise;
}

void update_node(int s, NodeRegression& node, const ClusterData& data, const Hyperparameters& hyper, Rng& rng)
{
    const int m = static_cast<int>(node.beta.size());
    for (int k = 0; k < m; ++k) node.included[k] = update_edge_indicator(node.beta(k), node.tau, hyper, rng) ? 1 : 0;
    node.tau = update_tau(s, data, node.beta, node.included, hyper, rng);
    node.beta = update_beta(s, data, node.tau, node.included, hyper, rng);
}

std::vector<NodeRegression> draw_prior_regressions(int q, const Hyperparameters& hyper, Rng& rng)
{
    const SpikeSlabParams& ss = hyper.spike_slab;
    std::vector<NodeRegression> out(q);
    for (int s = 0; s < q; ++s) {
        NodeRegression& node = out[s];
        node.tau = rng.inv_gamma(ss.a1, ss.a2);
        node.included.assign(q - 1, 0);
        node.beta = Vector::Zero(q - 1);
        for (int k = 0; k < q - 1; ++k) {
            node.included[k] = rng.bernoulli(hyper.alpha_g) ? 1 : 0;
            node.beta(k) = std::sqrt(node.tau * slab_variance(node.included[k] != 0, ss)) * rng.normal();
        }
    }
    return out;
}

Matrix symmetrize(const Matrix& edge_prob, SymmetrizeRule rule)
{
    if (edge_prob.rows() != edge_prob.cols()) throw InvalidArgument("symmetrize: matrix must be square");
    const Eigen::Index q = edge_prob.rows();
    Matrix out = Matrix::Zero(q, q);
    for (Eigen::Index s = 0; s < q; ++s)
        for (Eigen::Index t = s + 1; t < q; ++t) {
            const double v = rule == SymmetrizeRule::Union ? std::max(edge_prob(s, t), edge_prob(t, s))
                                                           : std::min(edge_prob(s, t), edge_prob(t, s));
            out(s, t) = v;
            out(t, s) = v;
        }
    return out;
}

Eigen::MatrixXi indicator_matrix(const std::vector<NodeRegression>& nodes)
{
    const int q = static_cast<int>(nodes.size());
    Eigen::MatrixXi out = Eigen::MatrixXi::Zero(q, q);
    for (int s = 0; s < q; ++s)
        for (int k = 0; k < q - 1; ++k) out(s, NodeRegression::other_node(s, k)) = nodes[s].included[k];
    return out;
}

double log_pseudo_marginal(const Eigen::MatrixXi& indicators, const ClusterData& data, const SpikeSlabParams& ss)
{
    if (data.n == 0) return 0.0;
    const int q = static_cast<int>(data.scatter.rows());
    if (indicators.rows() != q || indicators.cols() != q)
        throw InvalidArgument("log_pseudo_marginal: indicator matrix has wrong shape");
    const double a1_star = ss.a1 + 0.5 * data.n;
    double total = 0.0;
    for (int s = 0; s < q; ++s) {
        Matrix precision = drop_node(data.scatter, s);
        double log_det_prior_prec = 0.0;
        for (int k = 0; k < q - 1; ++k) {
            const double inv = 1.0 / slab_variance(indicators(s, NodeRegression::other_node(s, k)) != 0, ss);
            precision(k, k) += inv;
            log_det_prior_prec += std::log(inv);
        }
        const Vector cross = cross_column(data.scatter, s);
        double log_det_post = 0.0;
        double quad = 0.0;
        if (q > 1) {
            Eigen::LLT<Matrix> llt(precision);
            if (llt.info() != Eigen::Success) throw NumericalError("log_pseudo_marginal: system not positive definite");
            log_det_post = 2.0 * Matrix(llt.matrixL()).diagonal().array().log().sum();
            quad = cross.dot(llt.solve(cross));
        }
        const double a2_star = ss.a2 + 0.5 * std::max(0.0, data.scatter(s, s) - quad);
        total += -0.5 * data.n * kLog2Pi + 0.5 * log_det_prior_prec - 0.5 * log_det_post + ss.a1 * std::log(ss.a2) -
                 a1_star * std::log(a2_star) + std::lgamma(a1_star) - std::lgamma(ss.a1);
    }
    return total;
}

double pseudo_partial_correlation(const std::vector<NodeRegression>& nodes, int s, int t)
{
    const double b_st = nodes[s].beta(NodeRegression::slot(s, t));
    const double b_ts = nodes[t].beta(NodeRegression::slot(t, s));
    const double prod = b_st * b_ts;
    if (!(prod > 0.0)) return 0.0;
    return (b_st > 0 ? 1.0 : -1.0) * std::sqrt(prod);
}

} // namespace pxg
