#ifndef PXG_GIBBS_HPP
#define PXG_GIBBS_HPP

#include <cstdint>
#include <memory>
#include <vector>

#include "pxg/gwishart.hpp"
#include "pxg/hyper.hpp"
#include "pxg/ppmx.hpp"
#include "pxg/rng.hpp"

namespace pxg {

using EdgeMatrix = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Which likelihood scores y_i against a cluster in the allocation step when
// the pseudo backend is active.
enum class AllocationLikelihood { Pseudo, Gaussian };

struct SamplerOptions {
    int iterations = 1500; // total sweeps, burn-in included
    int burn_in = 500;
    int thin = 1;
    std::uint64_t seed = 1;
    int threads = 1;
    int mc_samples = 100;     // prior-constant estimates inside edge moves
    int dic_mc_samples = 200; // posterior constants for DIC on non-decomposable graphs
    int init_clusters = 5;
    bool record_dic = true;
    bool single_cluster = false; // companion pooled fit (K = 1)
    AllocationLikelihood allocation_likelihood = AllocationLikelihood::Pseudo;

    void validate() const;
};

/// One full MCMC state.
struct ChainState {
    Vector V;
    Vector pi;
    Allocation z;
    std::vector<CovariateClusterParams> cov;
    // Gaussian-G-Wishart backend
    std::vector<Graph> graphs;
    std::vector<PrecisionMatrix> omegas;
    // pseudo-likelihood backend: K clusters x q node regressions
    std::vector<std::vector<NodeRegression>> nodes;
    long iteration = 0;

    int K() const { return static_cast<int>(pi.size()); }
    /// Throws NumericalError describing the first violated invariant.
    void check_invariants(Backend backend) const;
};

/// Cluster j of a retained draw. For the pseudo backend edges is the raw
/// (asymmetric) indicator matrix and params holds beta_st off the diagonal and
/// tau_s on it; for G-Wishart they are the graph adjacency and Omega.
struct ClusterRecord {
    EdgeMatrix edges;
    Matrix params;
    CovariateClusterParams cov;
};

struct TraceDraw {
    long iteration = 0;
    std::vector<int> z;
    Vector pi;
    std::vector<ClusterRecord> clusters;
    double loglik_graph = 0.0;   // sum_j log p(Y*_j | G_j) over occupied clusters
    double log_similarity = 0.0; // sum_j log g(X*_j) over occupied clusters
};

struct TraceStore {
    Backend backend = Backend::GWishart;
    Dataset data;
    Hyperparameters hyper;
    SamplerOptions options;
    std::uint64_t config_hash = 0;
    std::vector<TraceDraw> draws;

    int q() const { return data.q(); }
    int n() const { return data.n(); }
    int K() const { return hyper.K; }
};

struct StepSeed {
    std::uint64_t root = 0;
    std::uint64_t iteration = 0;
};

/// V_j ~ Beta(1 + n_j, alpha + sum_{l>j} n_l), V_K = 1, pi_j = V_j prod_{l<j}(1 - V_l).
std::pair<Vector, Vector> update_sticks(const Allocation& z, double alpha, int K, Rng& rng);
/// Stick-breaking map V -> pi.
Vector stick_weights(const Vector& V);

/// log p_ij up to a row constant: log pi_j + backend log-likelihood + log N_p(x_i; mu_j, s2_j I).
Matrix allocation_log_probabilities(const Dataset& data, const ChainState& state, Backend backend,
                                    const SamplerOptions& options);

Allocation update_allocation(const Dataset& data, const ChainState& state, Backend backend,
                             const SamplerOptions& options, StepSeed seed);

/// Steps 4-5: covariate parameters and backend graph parameters for every
/// cluster; empty clusters draw from the prior.
void refresh_clusters(const Dataset& data, ChainState& state, Backend backend, const Hyperparameters& hyper,
                      const SamplerOptions& options, StepSeed seed, PriorConstantCache* constants);

/// Draw every cluster-level parameter and the sticks from the prior.
ChainState draw_prior_state(int n, int q, int p, Backend backend, const Hyperparameters& hyper, Rng& rng,
                            PriorConstantCache* constants = nullptr);

/// DIC components of the current state.
std::pair<double, double> dic_components(const Dataset& data, const ChainState& state, Backend backend,
                                         const Hyperparameters& hyper, const SamplerOptions& options,
                                         StepSeed seed);

ClusterRecord record_cluster(const ChainState& state, Backend backend, int j);

/// Blocked Gibbs sampler over a fixed dataset.
class Sampler {
public:
    Sampler(Dataset data, Hyperparameters hyper, Backend backend, SamplerOptions options);

    /// Random initial allocation over init_clusters labels, then a parameter refresh.
    void initialize();
    /// One iteration of steps 1-5.
    void step();

    const ChainState& state() const { return state_; }
    void set_state(ChainState s) { state_ = std::move(s); }
    void set_data(Dataset d) { data_ = std::move(d); }
    const Dataset& data() const { return data_; }
    const Hyperparameters& hyper() const { return hyper_; }
    PriorConstantCache* constants() { return constants_.get(); }

private:
    Dataset data_;
    Hyperparameters hyper_;
    Backend backend_;
    SamplerOptions options_;
    std::unique_ptr<PriorConstantCache> constants_;
    ChainState state_;
};

/// Runs `iterations` sweeps and keeps every thin-th state after the first burn_in.
/// Deterministic given options.seed.
TraceStore run_chain(const Dataset& data, const Hyperparameters& hyper, Backend backend,
                     const SamplerOptions& options);

} // namespace pxg

#endif
