#ifndef PXG_SUMMARY_HPP
#define PXG_SUMMARY_HPP

#include <cstdint>
#include <vector>

#include "pxg/gibbs.hpp"
#include "pxg/pseudo.hpp"

namespace pxg {

struct DahlResult {
    Allocation partition;
    std::size_t draw_index = 0;
    double loss = 0.0;
};

/// Retained draw closest in squared loss to the mean co-clustering matrix;
/// ties go to the earliest draw.
DahlResult dahl_partition(const TraceStore& trace);

/// Per-observation partition-averaged summaries.
struct EdgeProbabilityField {
    std::vector<Matrix> prob;          // symmetric, zero diagonal
    std::vector<Matrix> omega_hat;     // averaged precision entries
    std::vector<Matrix> partial_corr;  // averaged partial correlations
    std::vector<Eigen::MatrixXi> graphs; // prob > cutoff
};

EdgeProbabilityField partition_average(const TraceStore& trace, double cutoff = 0.5);

/// Point-estimate graph of each occupied cluster of `partition` (in label
/// order): member-averaged edge probabilities thresholded at cutoff.
std::vector<Graph> cluster_graphs(const Allocation& partition, const EdgeProbabilityField& field,
                                  double cutoff = 0.5);

/// Probability-sorted edge list (s < t) for one probability matrix, for FDR-style reporting.
struct RankedEdge {
    int s = 0;
    int t = 0;
    double prob = 0.0;
};
std::vector<RankedEdge> ranked_edges(const Matrix& prob);

enum class PredictMode { RaoBlackwell, Sampled };

struct Prediction {
    Matrix prob;
    Matrix omega_hat;
    Matrix partial_corr;
};

/// Graph and precision prediction at a new covariate vector; no response needed.
Prediction predict_graph(const TraceStore& trace, const Vector& x_new, PredictMode mode = PredictMode::RaoBlackwell,
                         std::uint64_t seed = 0);

/// Cluster weights w_j proportional to pi_j N_p(x_new; mu_j, s2_j I) for one retained draw.
Vector predictive_weights(const TraceDraw& draw, const Vector& x_new);

/// Sample variance with a (B - 1) denominator; 0 for fewer than two values.
double sample_variance(const std::vector<double>& values);

struct DicReport {
    double value = 0.0;
    double deviance = 0.0;
    double penalty = 0.0;
};

/// log p(Y*_j | G) for the trace's backend with Omega (or beta, tau) integrated out.
double log_graph_marginal(const TraceStore& trace, const Graph& graph, const ClusterData& data, std::uint64_t salt);

DicReport dic_full(const TraceStore& trace, double cutoff = 0.5);
DicReport dic_graph_only(const TraceStore& trace, double cutoff = 0.5);
/// Requires the companion single-cluster fit over all of Y.
DicReport dic_cov_only(const TraceStore& trace, const TraceStore& pooled, double cutoff = 0.5);

} // namespace pxg

#endif
