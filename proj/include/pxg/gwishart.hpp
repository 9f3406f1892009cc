#ifndef PXG_GWISHART_HPP
#define PXG_GWISHART_HPP

#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pxg/hyper.hpp"
#include "pxg/rng.hpp"

namespace pxg {

/// Sample size and scatter matrix Y*^T Y* of the responses in one cluster.
struct ClusterData {
    int n = 0;
    Matrix scatter;

    static ClusterData empty(int q) { return {0, Matrix::Zero(q, q)}; }
    static ClusterData of(const Matrix& rows);
    static ClusterData of_rows(const Matrix& y, std::span<const int> rows);
};

/// ((b-2)/2) log|Omega| - tr(D Omega)/2. Throws if omega is not graph-compatible.
double log_unnorm_density(const PrecisionMatrix& omega, const Graph& graph, const GWishartParams& params);

/// Closed-form log I_G for the complete graph on D (a Wishart constant with
/// b + dim - 1 degrees of freedom).
double log_norm_constant_complete(double b, const Matrix& D);

struct McEstimate {
    double estimate = 0.0;
    double mc_se = 0.0;
};

/// Importance-sampling estimate of log I_G(b, D) over the free Cholesky
/// elements of Omega, with a delta-method standard error.
McEstimate log_norm_constant_mc(const Graph& graph, const GWishartParams& params, int samples, Rng& rng);

/// Perfect elimination ordering from maximum cardinality search, or nullopt
/// when the graph is not chordal.
std::optional<std::vector<int>> perfect_ordering(const Graph& graph);
bool is_decomposable(const Graph& graph);

/// Exact log I_G for decomposable graphs (clique/separator factorization).
double log_norm_constant_decomposable(const Graph& graph, const GWishartParams& params);

/// Unconstrained Wishart draw with the G-Wishart convention (complete graph).
PrecisionMatrix sample_wishart(const GWishartParams& params, Rng& rng);

struct CompletionSettings {
    double tolerance = 1e-8;
    int max_sweeps = 1000;
};

/// Direct sampler: Wishart draw followed by iterative regression completion of
/// its inverse onto the graph.
PrecisionMatrix sample_gwishart(const Graph& graph, const GWishartParams& params, Rng& rng,
                                const CompletionSettings& settings = {});

/// Draw from G-Wishart(b + n_j, D + Y*^T Y*).
PrecisionMatrix draw_posterior_omega(const Graph& graph, const ClusterData& data, const GWishartParams& prior,
                                     Rng& rng);

/// Thread-safe memo of prior constants log I_G(b, D). Exact for decomposable
/// graphs; otherwise a Monte-Carlo estimate whose seed is a function of the
/// graph, so the cached value does not depend on evaluation order.
class PriorConstantCache {
public:
    PriorConstantCache(GWishartParams prior, int mc_samples, std::uint64_t seed);

    double log_constant(const Graph& graph);
    const GWishartParams& prior() const { return prior_; }

private:
    GWishartParams prior_;
    int mc_samples_;
    std::uint64_t seed_;
    std::mutex mutex_;
    std::map<std::string, double> values_;
};

struct EdgeMoveResult {
    Graph graph;
    PrecisionMatrix omega;
    bool accepted = false;
};

/// Reversible-jump flip of edge (s, t), s < t, in the upper Cholesky
/// parameterisation Omega = Phi^T Phi. The new free element phi_st is proposed
/// from its approximate conditional; non-free elements are re-completed so the
/// result stays PD and graph-compatible.
EdgeMoveResult update_edge_and_omega(const Graph& graph, const PrecisionMatrix& omega, const ClusterData& data,
                                     const Hyperparameters& hyper, int s, int t, Rng& rng,
                                     PriorConstantCache& constants);

/// -(n q / 2) log 2pi + log I_G(b + n, D + S) - log I_G(b, D). Constants are exact
/// on decomposable graphs and Monte-Carlo (mc_samples) otherwise.
double log_marginal_gwishart(const Graph& graph, const ClusterData& data, const GWishartParams& prior,
                             int mc_samples, Rng& rng);

/// Complete the non-free entries of an upper-triangular Phi so that
/// (Phi^T Phi)_st = 0 for every non-edge s < t. Exposed for tests.
void complete_cholesky(Matrix& phi, const Graph& graph);

} // namespace pxg

#endif
