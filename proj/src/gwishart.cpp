#include "pxg/gwishart.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "pxg/density.hpp"

namespace pxg {

namespace {

double log_mv_gamma(int d, double a)
{
    double out = 0.25 * d * (d - 1) * std::log(std::numbers::pi);
    for (int i = 0; i < d; ++i) out += std::lgamma(a - 0.5 * i);
    return out;
}

Matrix submatrix(const Matrix& m, const std::vector<int>& idx)
{
    Matrix out(idx.size(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a)
        for (std::size_t b = 0; b < idx.size(); ++b) out(a, b) = m(idx[a], idx[b]);
    return out;
}

// Upper-triangular T with D^{-1} = T^T T.
Matrix inverse_scale_factor(const Matrix& D)
{
    const Eigen::Index q = D.rows();
    Eigen::LLT<Matrix> llt_d(D);
    if (llt_d.info() != Eigen::Success) throw NumericalError("G-Wishart scale is not positive definite");
    const Matrix d_inv = llt_d.solve(Matrix::Identity(q, q));
    Eigen::LLT<Matrix> llt(0.5 * (d_inv + d_inv.transpose()));
    if (llt.info() != Eigen::Success) throw NumericalError("inverse G-Wishart scale is not positive definite");
    return llt.matrixU();
}

// -tr(D Phi^T Phi) / 2 summed row by row.
double log_trace_kernel(const Matrix& phi, const Matrix& D)
{
    double acc = 0.0;
    for (Eigen::Index r = 0; r < phi.rows(); ++r) {
        const auto row = phi.row(r);
        acc += row * D * row.transpose();
    }
    return -0.5 * acc;
}

PrecisionMatrix to_precision(const Matrix& phi, const Graph& graph)
{
    Matrix omega = phi.transpose() * phi;
    const int q = graph.size();
    for (int s = 0; s < q; ++s)
        for (int t = s + 1; t < q; ++t)
            if (!graph.has_edge(s, t)) {
                omega(s, t) = 0.0;
                omega(t, s) = 0.0;
            }
    return PrecisionMatrix(0.5 * (omega + omega.transpose()));
}

} // namespace

ClusterData ClusterData::of(const Matrix& rows)
{
    return {static_cast<int>(rows.rows()), rows.transpose() * rows};
}

ClusterData ClusterData::of_rows(const Matrix& y, std::span<const int> rows)
{
    const Eigen::Index q = y.cols();
    ClusterData out{static_cast<int>(rows.size()), Matrix::Zero(q, q)};
    for (int i : rows) out.scatter.selfadjointView<Eigen::Lower>().rankUpdate(y.row(i).transpose());
    out.scatter = out.scatter.selfadjointView<Eigen::Lower>();
    return out;
}

double log_unnorm_density(const PrecisionMatrix& omega, const Graph& graph, const GWishartParams& params)
{
    if (omega.size() != graph.size() || params.D.rows() != omega.size())
        throw InvalidArgument("log_unnorm_density: dimension mismatch");
    if (!omega.compatible_with(graph)) throw InvalidArgument("log_unnorm_density: omega is not compatible with the graph");
    return 0.5 * (params.b - 2.0) * omega.log_det() - 0.5 * (params.D.cwiseProduct(omega.values())).sum();
}

double log_norm_constant_complete(double b, const Matrix& D)
{
    const int d = static_cast<int>(D.rows());
    if (d == 0) return 0.0;
    Eigen::LLT<Matrix> llt(D);
    if (llt.info() != Eigen::Success) throw NumericalError("Wishart constant: scale is not positive definite");
    const Matrix L = llt.matrixL();
    const double log_det_d = 2.0 * L.diagonal().array().log().sum();
    const double nu = b + d - 1.0;
    return 0.5 * nu * d * std::numbers::ln2 - 0.5 * nu * log_det_d + log_mv_gamma(d, 0.5 * nu);
}

McEstimate log_norm_constant_mc(const Graph& graph, const GWishartParams& params, int samples, Rng& rng)
{
    if (samples < 10) throw InvalidArgument("log_norm_constant_mc: need at least 10 samples");
    const int q = graph.size();
    if (params.D.rows() != q) throw InvalidArgument("log_norm_constant_mc: dimension mismatch");
    const double b = params.b;
    const Matrix T = inverse_scale_factor(params.D);

    std::vector<int> later(q, 0), earlier(q, 0);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j)
            if (j != i && graph.has_edge(i, j)) ++(j > i ? later[i] : earlier[i]);

    double log_front = 0.0;
    for (int i = 0; i < q; ++i) {
        const double a = b + later[i];
        log_front += 0.5 * a * std::numbers::ln2 + std::lgamma(0.5 * a) + 0.5 * later[i] * kLog2Pi +
                     (b + later[i] + earlier[i]) * std::log(T(i, i));
    }

    std::vector<double> log_f(static_cast<std::size_t>(samples));
    Matrix psi = Matrix::Zero(q, q);
    Matrix phi = Matrix::Zero(q, q);
    for (int m = 0; m < samples; ++m) {
        double nonfree_sq = 0.0;
        for (int j = 0; j < q; ++j) {
            for (int i = 0; i <= j; ++i) {
                if (i == j) {
                    psi(i, i) = std::sqrt(rng.chi_squared(b + later[i]));
                    phi(i, i) = psi(i, i) * T(i, i);
                    continue;
                }
                double partial = 0.0;
                for (int k = i; k < j; ++k) partial += psi(i, k) * T(k, j);
                if (graph.has_edge(i, j)) {
                    psi(i, j) = rng.normal();
                    phi(i, j) = partial + psi(i, j) * T(j, j);
                } else {
                    double acc = 0.0;
                    for (int r = 0; r < i; ++r) acc += phi(r, i) * phi(r, j);
                    phi(i, j) = -acc / phi(i, i);
                    psi(i, j) = (phi(i, j) - partial) / T(j, j);
                    nonfree_sq += psi(i, j) * psi(i, j);
                }
            }
        }
        log_f[static_cast<std::size_t>(m)] = -0.5 * nonfree_sq;
    }

    const double lse = log_sum_exp(log_f);
    if (!std::isfinite(lse)) {
        std::ostringstream os;
        os << "log_norm_constant_mc: importance weights degenerate (log-sum-exp = " << lse
           << ", front term = " << log_front << ", samples = " << samples << ")";
        throw NumericalError(os.str());
    }
    const double log_mean = lse - std::log(static_cast<double>(samples));
    // Delta-method standard error of log(mean w).
    const double w_max = *std::max_element(log_f.begin(), log_f.end());
    double s1 = 0.0, s2 = 0.0;
    for (double lf : log_f) {
        const double w = std::exp(lf - w_max);
        s1 += w;
        s2 += w * w;
    }
    const double mean_w = s1 / samples;
    const double var_w = std::max(0.0, (s2 - samples * mean_w * mean_w) / (samples - 1));
    McEstimate out;
    out.estimate = log_front + log_mean;
    out.mc_se = std::sqrt(var_w / samples) / mean_w;
    return out;
}

std::optional<std::vector<int>> perfect_ordering(const Graph& graph)
{
    const int q = graph.size();
    std::vector<int> order;
    std::vector<int> weight(q, 0);
    std::vector<bool> numbered(q, false);
    order.reserve(q);
    for (int step = 0; step < q; ++step) {
        int best = -1;
        for (int v = 0; v < q; ++v)
            if (!numbered[v] && (best < 0 || weight[v] > weight[best])) best = v;
        numbered[best] = true;
        order.push_back(best);
        for (int u : graph.neighbors(best))
            if (!numbered[u]) ++weight[u];
    }
    // Chordal iff every vertex's earlier-numbered neighbours form a clique.
    std::vector<int> position(q);
    for (int k = 0; k < q; ++k) position[order[k]] = k;
    for (int k = 0; k < q; ++k) {
        std::vector<int> parents;
        for (int u : graph.neighbors(order[k]))
            if (position[u] < k) parents.push_back(u);
        for (std::size_t a = 0; a < parents.size(); ++a)
            for (std::size_t c = a + 1; c < parents.size(); ++c)
                if (!graph.has_edge(parents[a], parents[c])) return std::nullopt;
    }
    return order;
}

bool is_decomposable(const Graph& graph)
{
    return perfect_ordering(graph).has_value();
}

double log_norm_constant_decomposable(const Graph& graph, const GWishartParams& params)
{
    const auto order = perfect_ordering(graph);
    if (!order) throw InvalidArgument("log_norm_constant_decomposable: graph is not decomposable");
    const int q = graph.size();
    std::vector<int> position(q);
    for (int k = 0; k < q; ++k) position[(*order)[k]] = k;
    // I_G = prod_k I(C_k) / I(pa_k) over a perfect numbering, C_k = {v_k} u pa_k.
    double total = 0.0;
    for (int k = 0; k < q; ++k) {
        const int v = (*order)[k];
        std::vector<int> parents;
        for (int u : graph.neighbors(v))
            if (position[u] < k) parents.push_back(u);
        std::vector<int> clique = parents;
        clique.push_back(v);
        total += log_norm_constant_complete(params.b, submatrix(params.D, clique));
        if (!parents.empty()) total -= log_norm_constant_complete(params.b, submatrix(params.D, parents));
    }
    return total;
}

PrecisionMatrix sample_wishart(const GWishartParams& params, Rng& rng)
{
    const int q = static_cast<int>(params.D.rows());
    const Matrix T = inverse_scale_factor(params.D);
    Matrix psi = Matrix::Zero(q, q);
    for (int i = 0; i < q; ++i) {
        psi(i, i) = std::sqrt(rng.chi_squared(params.b + (q - 1 - i)));
        for (int j = i + 1; j < q; ++j) psi(i, j) = rng.normal();
    }
    const Matrix phi = psi.triangularView<Eigen::Upper>() * T;
    const Matrix omega = phi.transpose() * phi;
    return PrecisionMatrix(0.5 * (omega + omega.transpose()));
}

namespace {

// Max-determinant completion for a decomposable graph: along a perfect numbering,
// K = sum_k [Sigma_{C_k}^{-1}]^0 - [Sigma_{pa_k}^{-1}]^0 with C_k = {v_k} u pa_k.
Matrix complete_decomposable(const Matrix& sigma, const Graph& graph, const std::vector<int>& order)
{
    const int q = graph.size();
    std::vector<int> position(q);
    for (int k = 0; k < q; ++k) position[order[k]] = k;
    Matrix omega = Matrix::Zero(q, q);
    auto add_inverse = [&](const std::vector<int>& idx, double sign) {
        const Matrix inv = submatrix(sigma, idx).llt().solve(Matrix::Identity(idx.size(), idx.size()));
        for (std::size_t a = 0; a < idx.size(); ++a)
            for (std::size_t c = 0; c < idx.size(); ++c) omega(idx[a], idx[c]) += sign * inv(a, c);
    };
    for (int k = 0; k < q; ++k) {
        const int v = order[k];
        std::vector<int> parents;
        for (int u : graph.neighbors(v))
            if (position[u] < k) parents.push_back(u);
        std::vector<int> clique = parents;
        clique.push_back(v);
        add_inverse(clique, 1.0);
        if (!parents.empty()) add_inverse(parents, -1.0);
    }
    return omega;
}

// Iterative regression completion of the covariance onto the graph.
Matrix complete_iterative(const Matrix& sigma, const Graph& graph, const CompletionSettings& settings)
{
    const int q = graph.size();
    Matrix w = sigma;
    std::vector<std::vector<int>> nbrs(q);
    for (int j = 0; j < q; ++j) nbrs[j] = graph.neighbors(j);

    double change = std::numeric_limits<double>::infinity();
    for (int sweep = 0; sweep < settings.max_sweeps; ++sweep) {
        change = 0.0;
        for (int j = 0; j < q; ++j) {
            const std::vector<int>& nb = nbrs[j];
            Vector column = Vector::Zero(q);
            if (!nb.empty()) {
                const int m = static_cast<int>(nb.size());
                Matrix w_nn(m, m);
                Vector rhs(m);
                for (int a = 0; a < m; ++a) {
                    rhs(a) = sigma(nb[a], j);
                    for (int c = 0; c < m; ++c) w_nn(a, c) = w(nb[a], nb[c]);
                }
                const Vector coef = w_nn.llt().solve(rhs);
                for (int k = 0; k < q; ++k) {
                    double acc = 0.0;
                    for (int a = 0; a < m; ++a) acc += w(k, nb[a]) * coef(a);
                    column(k) = acc;
                }
            }
            for (int k = 0; k < q; ++k) {
                if (k == j) continue;
                change = std::max(change, std::abs(w(k, j) - column(k)));
                w(k, j) = column(k);
                w(j, k) = column(k);
            }
        }
        if (change < settings.tolerance) break;
    }
    if (!(change < settings.tolerance)) {
        std::ostringstream os;
        os << "sample_gwishart: completion did not converge after " << settings.max_sweeps
           << " sweeps (last max change " << change << ")";
        throw NumericalError(os.str());
    }
    Eigen::LLT<Matrix> w_llt(w);
    if (w_llt.info() != Eigen::Success) throw NumericalError("sample_gwishart: completed covariance is not PD");
    return w_llt.solve(Matrix::Identity(q, q));
}

} // namespace

PrecisionMatrix sample_gwishart(const Graph& graph, const GWishartParams& params, Rng& rng,
                                const CompletionSettings& settings)
{
    const int q = graph.size();
    if (params.D.rows() != q) throw InvalidArgument("sample_gwishart: dimension mismatch");
    PrecisionMatrix unconstrained = sample_wishart(params, rng);
    if (graph.is_complete()) return unconstrained;

    // Complete on the correlation scale: the completion commutes with diagonal
    // rescaling, and an ill-conditioned draw no longer inflates the entries the
    // convergence tolerance is measured on.
    const Matrix sigma = Eigen::LLT<Matrix>(unconstrained.values()).solve(Matrix::Identity(q, q));
    const Vector inv_scale = sigma.diagonal().cwiseSqrt().cwiseInverse();
    const Matrix corr = inv_scale.asDiagonal() * sigma * inv_scale.asDiagonal();
    const auto order = perfect_ordering(graph);
    const Matrix k = order ? complete_decomposable(corr, graph, *order) : complete_iterative(corr, graph, settings);
    Matrix omega = inv_scale.asDiagonal() * k * inv_scale.asDiagonal();
    for (int s = 0; s < q; ++s)
        for (int t = s + 1; t < q; ++t)
            if (!graph.has_edge(s, t)) {
                omega(s, t) = 0.0;
                omega(t, s) = 0.0;
            }
    return PrecisionMatrix(0.5 * (omega + omega.transpose()));
}

PrecisionMatrix draw_posterior_omega(const Graph& graph, const ClusterData& data, const GWishartParams& prior,
                                     Rng& rng)
{
    GWishartParams post{prior.b + data.n, prior.D + data.scatter};
    return sample_gwishart(graph, post, rng);
}

PriorConstantCache::PriorConstantCache(GWishartParams prior, int mc_samples, std::uint64_t seed)
    : prior_(std::move(prior)), mc_samples_(mc_samples), seed_(seed)
{
}

double PriorConstantCache::log_constant(const Graph& graph)
{
    const std::string key = graph.key();
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = values_.find(key);
        if (it != values_.end()) return it->second;
    }
    double value;
    if (is_decomposable(graph)) {
        value = log_norm_constant_decomposable(graph, prior_);
    } else {
        Rng rng(derive_seed(seed_, {static_cast<std::uint64_t>(Stream::NormConstant), std::hash<std::string>{}(key)}));
        value = log_norm_constant_mc(graph, prior_, mc_samples_, rng).estimate;
    }
    std::lock_guard<std::mutex> lock(mutex_);
    values_.emplace(key, value);
    return value;
}

void complete_cholesky(Matrix& phi, const Graph& graph)
{
    const int q = graph.size();
    for (int j = 0; j < q; ++j)
        for (int i = 0; i < j; ++i) {
            if (graph.has_edge(i, j)) continue;
            double acc = 0.0;
            for (int r = 0; r < i; ++r) acc += phi(r, i) * phi(r, j);
            phi(i, j) = -acc / phi(i, i);
        }
}

EdgeMoveResult update_edge_and_omega(const Graph& graph, const PrecisionMatrix& omega, const ClusterData& data,
                                     const Hyperparameters& hyper, int s, int t, Rng& rng,
                                     PriorConstantCache& constants)
{
    if (s > t) std::swap(s, t);
    const int q = graph.size();
    if (s == t || s < 0 || t >= q) throw InvalidArgument("update_edge_and_omega: invalid edge");
    const Matrix d_post = hyper.gwishart.D + data.scatter;
    const bool present = graph.has_edge(s, t);

    Graph without = graph;
    without.set_edge(s, t, false);
    Graph with = graph;
    with.set_edge(s, t, true);

    const Matrix phi = omega.cholesky().transpose();
    Matrix phi_without = phi;
    complete_cholesky(phi_without, without);

    // Approximate conditional of phi_st given the rest of row s.
    double lin = 0.0;
    for (int l = s; l < q; ++l)
        if (l != t) lin += phi_without(s, l) * d_post(l, t);
    const double prop_mean = -lin / d_post(t, t);
    const double prop_var = 1.0 / d_post(t, t);

    Matrix phi_with;
    if (present) {
        phi_with = phi;
    } else {
        phi_with = phi_without;
        phi_with(s, t) = prop_mean + std::sqrt(prop_var) * rng.normal();
        complete_cholesky(phi_with, with);
    }
    const double x = phi_with(s, t);
    const double log_prop = -0.5 * (kLog2Pi + std::log(prop_var)) - 0.5 * (x - prop_mean) * (x - prop_mean) / prop_var;

    bool accept;
    const double alpha_g = hyper.alpha_g;
    if (alpha_g >= 1.0 || alpha_g <= 0.0) {
        // Degenerate edge prior: only the permitted state has positive mass.
        const bool want = alpha_g >= 1.0;
        accept = present != want;
        if (accept) rng.uniform(); // keep stream consumption independent of the branch
    } else {
        const double log_add = log_trace_kernel(phi_with, d_post) - log_trace_kernel(phi_without, d_post) +
                               std::log(phi(s, s)) + constants.log_constant(without) - constants.log_constant(with) +
                               std::log(alpha_g) - std::log1p(-alpha_g) - log_prop;
        const double log_accept = present ? -log_add : log_add;
        accept = std::log(rng.uniform()) < log_accept;
    }

    EdgeMoveResult out;
    if (!accept) {
        out.graph = graph;
        out.omega = omega;
        out.accepted = false;
        return out;
    }
    out.graph = present ? without : with;
    try {
        out.omega = to_precision(present ? phi_without : phi_with, out.graph);
    } catch (const NumericalError&) {
        out.graph = graph;
        out.omega = omega;
        out.accepted = false;
        return out;
    }
    out.accepted = true;
    return out;
}

double log_marginal_gwishart(const Graph& graph, const ClusterData& data, const GWishartParams& prior,
                             int mc_samples, Rng& rng)
{
    if (data.n == 0) return 0.0;
    const int q = graph.size();
    GWishartParams post{prior.b + data.n, prior.D + data.scatter};
    double log_post, log_prior;
    if (is_decomposable(graph)) {
        log_post = log_norm_constant_decomposable(graph, post);
        log_prior = log_norm_constant_decomposable(graph, prior);
    } else {
        log_post = log_norm_constant_mc(graph, post, mc_samples, rng).estimate;
        log_prior = log_norm_constant_mc(graph, prior, mc_samples, rng).estimate;
    }
    return -0.5 * data.n * q * kLog2Pi + log_post - log_prior;
}

} // namespace pxg
