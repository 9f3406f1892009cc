#ifndef PXG_PSEUDO_HPP
#define PXG_PSEUDO_HPP

#include <vector>

#include "pxg/gwishart.hpp"
#include "pxg/hyper.hpp"
#include "pxg/rng.hpp"

namespace pxg {

/// P(g_st = 1 | beta_st, tau_s) under the spike-and-slab prior.
double edge_inclusion_probability(double beta_st, double tau_s, const SpikeSlabParams& ss, double alpha_g);

bool update_edge_indicator(double beta_st, double tau_s, const Hyperparameters& hyper, Rng& rng);

struct InvGammaParams {
    double shape = 1.0;
    double rate = 1.0;
};

/// Full conditional of tau_s given beta_s and the indicators.
InvGammaParams tau_conditional(int s, const ClusterData& data, const Vector& beta_s,
                               const std::vector<std::uint8_t>& included, const Hyperparameters& hyper);

double update_tau(int s, const ClusterData& data, const Vector& beta_s, const std::vector<std::uint8_t>& included,
                  const Hyperparameters& hyper, Rng& rng);

/// Full conditional of beta_s: N(mean, tau_s * precision^{-1}) with
/// precision = Y_{-s}^T Y_{-s} + A_{-s}, A_{-s} = diag(1 / eta_{g_st}).
struct BetaConditional {
    Vector mean;
    Eigen::LLT<Matrix> precision_llt;
};

BetaConditional beta_conditional(int s, const ClusterData& data, const std::vector<std::uint8_t>& included,
                                 const Hyperparameters& hyper);

Vector update_beta(int s, const ClusterData& data, double tau_s, const std::vector<std::uint8_t>& included,
                   const Hyperparameters& hyper, Rng& rng);

/// One scan over node s: indicators, then tau, then beta.
void update_node(int s, NodeRegression& node, const ClusterData& data, const Hyperparameters& hyper, Rng& rng);

/// Node regressions drawn from their prior (used for empty clusters).
std::vector<NodeRegression> draw_prior_regressions(int q, const Hyperparameters& hyper, Rng& rng);

enum class SymmetrizeRule { Union, Intersection };

/// Union: elementwise max(p_st, p_ts); intersection: min. Output has zero diagonal.
Matrix symmetrize(const Matrix& edge_prob, SymmetrizeRule rule = SymmetrizeRule::Union);

/// Row indicators of all q regressions packed into a q x q 0/1 matrix.
Eigen::MatrixXi indicator_matrix(const std::vector<NodeRegression>& nodes);

/// Sum over nodes of the closed-form normal / inverse-gamma marginal likelihood
/// of each node regression given its row indicators (beta and tau integrated out).
double log_pseudo_marginal(const Eigen::MatrixXi& indicators, const ClusterData& data, const SpikeSlabParams& ss);

/// sign(beta_st) sqrt(max(0, beta_st beta_ts)); zero when the signs disagree.
double pseudo_partial_correlation(const std::vector<NodeRegression>& nodes, int s, int t);

} // namespace pxg

#endif
