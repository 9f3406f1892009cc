#include "pxg/gibbs.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <optional>
#include <sstream>

#include "pxg/density.hpp"
#include "pxg/pseudo.hpp"

namespace pxg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t fnv_mix(std::uint64_t h, const void* data, std::size_t len)
{
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= bytes[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv_matrix(std::uint64_t h, const Matrix& m)
{
    return fnv_mix(h, m.data(), sizeof(double) * static_cast<std::size_t>(m.size()));
}

std::uint64_t hash_config(const Hyperparameters& hy, const SamplerOptions& o, Backend backend)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const double scalars[] = {hy.alpha, hy.alpha_g, hy.gwishart.b, hy.spike_slab.eta0, hy.spike_slab.eta1,
                              hy.spike_slab.a1, hy.spike_slab.a2, hy.covariate.sigma0sq, hy.covariate.b1,
                              hy.covariate.b2};
    h = fnv_mix(h, scalars, sizeof(scalars));
    h = fnv_matrix(h, hy.gwishart.D);
    h = fnv_matrix(h, hy.covariate.mu0);
    const std::int64_t ints[] = {hy.K, o.iterations, o.burn_in, o.thin, static_cast<std::int64_t>(o.seed),
                                 o.mc_samples, o.dic_mc_samples, o.init_clusters, o.record_dic, o.single_cluster,
                                 static_cast<std::int64_t>(o.allocation_likelihood),
                                 static_cast<std::int64_t>(backend)};
    return fnv_mix(h, ints, sizeof(ints));
}

Graph draw_prior_graph(int q, double alpha_g, Rng& rng)
{
    Graph g(q);
    for (int s = 0; s < q; ++s)
        for (int t = s + 1; t < q; ++t)
            if (rng.bernoulli(alpha_g)) g.set_edge(s, t, true);
    return g;
}

CovariateClusterParams draw_prior_covariate(const CovariatePrior& prior, Rng& rng)
{
    return draw_covariate_params(covariate_posterior(CovariateStats(static_cast<int>(prior.mu0.size())), prior), rng);
}

// Symmetric precision rebuilt from node regressions: omega_ss = 1/tau_s and
// omega_st the average of the two regression-implied values.
std::optional<PrecisionMatrix> regressions_to_precision(const std::vector<NodeRegression>& nodes)
{
    const int q = static_cast<int>(nodes.size());
    Matrix omega(q, q);
    for (int s = 0; s < q; ++s) {
        omega(s, s) = 1.0 / nodes[s].tau;
        for (int t = s + 1; t < q; ++t) {
            const double a = -nodes[s].beta(NodeRegression::slot(s, t)) / nodes[s].tau;
            const double b = -nodes[t].beta(NodeRegression::slot(t, s)) / nodes[t].tau;
            omega(s, t) = omega(t, s) = 0.5 * (a + b);
        }
    }
    if (failing_leading_minor(omega) != 0) return std::nullopt;
    return PrecisionMatrix(omega);
}

} // namespace

void SamplerOptions::validate() const
{
    if (iterations < 1) throw InvalidArgument("iterations must be positive");
    if (burn_in < 0) throw InvalidArgument("burn-in must be non-negative");
    if (iterations <= burn_in) throw InvalidArgument("iterations (total sweeps) must exceed burn-in");
    if (thin < 1) throw InvalidArgument("thin must be at least 1");
    if (threads < 1) throw InvalidArgument("threads must be at least 1");
    if (mc_samples < 10 || dic_mc_samples < 10) throw InvalidArgument("Monte-Carlo sample counts must be at least 10");
    if (init_clusters < 1) throw InvalidArgument("init_clusters must be at least 1");
}

void ChainState::check_invariants(Backend backend) const
{
    const int k = K();
    if (V.size() != k || k < 1) throw NumericalError("chain state: stick vector has wrong length");
    if (V(k - 1) != 1.0) throw NumericalError("chain state: last stick variable is not 1");
    if (pi.minCoeff() < 0.0 || std::abs(pi.sum() - 1.0) > 1e-12) throw NumericalError("chain state: pi is not a simplex");
    if (z.K() != k) throw NumericalError("chain state: allocation truncation differs from K");
    if (static_cast<int>(cov.size()) != k) throw NumericalError("chain state: covariate parameter count differs from K");
    for (const auto& c : cov)
        if (!(c.sigmasq > 0.0) || !c.mu.allFinite()) throw NumericalError("chain state: invalid covariate parameters");
    if (backend == Backend::GWishart) {
        if (static_cast<int>(graphs.size()) != k || static_cast<int>(omegas.size()) != k)
            throw NumericalError("chain state: graph parameter count differs from K");
        for (int j = 0; j < k; ++j)
            if (!omegas[j].compatible_with(graphs[j])) {
                std::ostringstream os;
                os << "chain state: precision of cluster " << j << " is not compatible with its graph";
                throw NumericalError(os.str());
            }
    } else {
        if (static_cast<int>(nodes.size()) != k) throw NumericalError("chain state: regression count differs from K");
        for (const auto& cluster : nodes)
            for (const auto& node : cluster)
                if (!(node.tau > 0.0) || !std::isfinite(node.tau) || !node.beta.allFinite())
                    throw NumericalError("chain state: invalid node regression");
    }
}

Vector stick_weights(const Vector& V)
{
    Vector pi(V.size());
    double remaining = 1.0;
    for (Eigen::Index j = 0; j < V.size(); ++j) {
        pi(j) = V(j) * remaining;
        remaining *= 1.0 - V(j);
    }
    return pi;
}

std::pair<Vector, Vector> update_sticks(const Allocation& z, double alpha, int K, Rng& rng)
{
    if (z.K() != K) throw InvalidArgument("update_sticks: allocation truncation differs from K");
    const std::vector<int> sizes = z.sizes();
    Vector V(K);
    int tail = z.size();
    for (int j = 0; j < K - 1; ++j) {
        tail -= sizes[j];
        V(j) = rng.beta(1.0 + sizes[j], alpha + tail);
    }
    V(K - 1) = 1.0;
    return {V, stick_weights(V)};
}

Matrix allocation_log_probabilities(const Dataset& data, const ChainState& state, Backend backend,
                                    const SamplerOptions& options)
{
    const int n = data.n();
    const int K = state.K();
    std::vector<std::optional<PrecisionMatrix>> rebuilt;
    const bool gaussian_pseudo =
        backend == Backend::Pseudo && options.allocation_likelihood == AllocationLikelihood::Gaussian;
    if (gaussian_pseudo) {
        rebuilt.resize(K);
        for (int j = 0; j < K; ++j) rebuilt[j] = regressions_to_precision(state.nodes[j]);
    }
    Matrix out(n, K);
#pragma omp parallel for schedule(static) num_threads(options.threads)
    for (int i = 0; i < n; ++i) {
        const Vector y = data.Y().row(i).transpose();
        const Vector x = data.X().row(i).transpose();
        for (int j = 0; j < K; ++j) {
            if (!(state.pi(j) > 0.0)) {
                out(i, j) = kNegInf;
                continue;
            }
            double ll;
            if (backend == Backend::GWishart) {
                ll = gaussian_loglik(y, state.omegas[j]);
            } else if (gaussian_pseudo) {
                ll = rebuilt[j] ? gaussian_loglik(y, *rebuilt[j]) : kNegInf;
            } else {
                ll = pseudo_loglik(y, state.nodes[j]);
            }
            out(i, j) = std::log(state.pi(j)) + ll + log_isotropic_normal(x, state.cov[j].mu, state.cov[j].sigmasq);
        }
    }
    return out;
}

Allocation update_allocation(const Dataset& data, const ChainState& state, Backend backend,
                             const SamplerOptions& options, StepSeed seed)
{
    const Matrix logp = allocation_log_probabilities(data, state, backend, options);
    const int n = data.n();
    const int K = state.K();
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::substream(seed.root, Stream::Allocation, seed.iteration, static_cast<std::uint64_t>(i));
        std::vector<double> row(K);
        for (int j = 0; j < K; ++j) row[j] = logp(i, j);
        try {
            labels[i] = rng.categorical_log(row);
        } catch (const NumericalError&) {
            std::ostringstream os;
            os << "update_allocation: observation " << i << " has no cluster with finite probability";
            throw NumericalError(os.str());
        }
    }
    return Allocation(std::move(labels), K);
}

void refresh_clusters(const Dataset& data, ChainState& state, Backend backend, const Hyperparameters& hyper,
                      const SamplerOptions& options, StepSeed seed, PriorConstantCache* constants)
{
    const int K = state.K();
    const int q = data.q();
    const auto members = state.z.members();

    for (int j = 0; j < K; ++j) {
        Rng rng = Rng::substream(seed.root, Stream::Covariate, seed.iteration, static_cast<std::uint64_t>(j));
        const auto post = covariate_posterior(CovariateStats::of_rows(data.X(), members[j]), hyper.covariate);
        state.cov[j] = draw_covariate_params(post, rng);
    }

    if (backend == Backend::GWishart) {
        if (constants == nullptr) throw InvalidArgument("refresh_clusters: G-Wishart backend needs a constant cache");
        std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic) num_threads(options.threads)
        for (int j = 0; j < K; ++j) {
            try {
                Rng rng = Rng::substream(seed.root, Stream::Graph, seed.iteration, static_cast<std::uint64_t>(j));
                if (members[j].empty()) {
                    state.graphs[j] = draw_prior_graph(q, hyper.alpha_g, rng);
                    state.omegas[j] = sample_gwishart(state.graphs[j], hyper.gwishart, rng);
                    continue;
                }
                const ClusterData cd = ClusterData::of_rows(data.Y(), members[j]);
                Graph g = state.graphs[j];
                PrecisionMatrix omega = state.omegas[j];
                for (int s = 0; s < q; ++s)
                    for (int t = s + 1; t < q; ++t) {
                        EdgeMoveResult r = update_edge_and_omega(g, omega, cd, hyper, s, t, rng, *constants);
                        g = std::move(r.graph);
                        omega = std::move(r.omega);
                    }
                state.omegas[j] = draw_posterior_omega(g, cd, hyper.gwishart, rng);
                state.graphs[j] = std::move(g);
            } catch (...) {
#pragma omp critical(pxg_refresh_failure)
                if (!failure) failure = std::current_exception();
            }
        }
        if (failure) std::rethrow_exception(failure);
        return;
    }

    std::vector<ClusterData> cds(K);
    for (int j = 0; j < K; ++j) {
        if (members[j].empty()) {
            Rng rng = Rng::substream(seed.root, Stream::Node, seed.iteration, static_cast<std::uint64_t>(j), ~0ULL);
            state.nodes[j] = draw_prior_regressions(q, hyper, rng);
        } else {
            cds[j] = ClusterData::of_rows(data.Y(), members[j]);
        }
    }
    std::vector<std::pair<int, int>> work;
    for (int j = 0; j < K; ++j)
        if (!members[j].empty())
            for (int s = 0; s < q; ++s) work.emplace_back(j, s);
    std::exception_ptr failure;
    const int W = static_cast<int>(work.size());
#pragma omp parallel for schedule(dynamic) num_threads(options.threads)
    for (int w = 0; w < W; ++w) {
        const auto [j, s] = work[w];
        try {
            Rng rng = Rng::substream(seed.root, Stream::Node, seed.iteration, static_cast<std::uint64_t>(j),
                                     static_cast<std::uint64_t>(s));
            update_node(s, state.nodes[j][s], cds[j], hyper, rng);
        } catch (...) {
#pragma omp critical(pxg_refresh_failure)
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
}

ChainState draw_prior_state(int n, int q, int p, Backend backend, const Hyperparameters& hyper, Rng& rng,
                            PriorConstantCache* /*constants*/)
{
    const int K = hyper.K;
    if (hyper.covariate.mu0.size() != p) throw InvalidArgument("draw_prior_state: mu0 length differs from p");
    ChainState st;
    st.V = Vector(K);
    for (int j = 0; j < K - 1; ++j) st.V(j) = rng.beta(1.0, hyper.alpha);
    st.V(K - 1) = 1.0;
    st.pi = stick_weights(st.V);
    std::vector<double> logpi(K);
    for (int j = 0; j < K; ++j) logpi[j] = st.pi(j) > 0.0 ? std::log(st.pi(j)) : kNegInf;
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = rng.categorical_log(logpi);
    st.z = Allocation(std::move(labels), K);
    st.cov.resize(K);
    for (int j = 0; j < K; ++j) st.cov[j] = draw_prior_covariate(hyper.covariate, rng);
    if (backend == Backend::GWishart) {
        st.graphs.resize(K);
        st.omegas.resize(K);
        for (int j = 0; j < K; ++j) {
            st.graphs[j] = draw_prior_graph(q, hyper.alpha_g, rng);
            st.omegas[j] = sample_gwishart(st.graphs[j], hyper.gwishart, rng);
        }
    } else {
        st.nodes.resize(K);
        for (int j = 0; j < K; ++j) st.nodes[j] = draw_prior_regressions(q, hyper, rng);
    }
    return st;
}

std::pair<double, double> dic_components(const Dataset& data, const ChainState& state, Backend backend,
                                         const Hyperparameters& hyper, const SamplerOptions& options,
                                         StepSeed seed)
{
    const auto members = state.z.members();
    double graph_term = 0.0;
    double sim_term = 0.0;
    for (int j = 0; j < state.K(); ++j) {
        if (members[j].empty()) continue;
        const ClusterData cd = ClusterData::of_rows(data.Y(), members[j]);
        if (backend == Backend::GWishart) {
            Rng rng = Rng::substream(seed.root, Stream::Dic, seed.iteration, static_cast<std::uint64_t>(j));
            graph_term += log_marginal_gwishart(state.graphs[j], cd, hyper.gwishart, options.dic_mc_samples, rng);
        } else {
            graph_term += log_pseudo_marginal(indicator_matrix(state.nodes[j]), cd, hyper.spike_slab);
        }
        sim_term += log_similarity(CovariateStats::of_rows(data.X(), members[j]), hyper.covariate);
    }
    return {graph_term, sim_term};
}

ClusterRecord record_cluster(const ChainState& state, Backend backend, int j)
{
    ClusterRecord rec;
    rec.cov = state.cov[j];
    if (backend == Backend::GWishart) {
        rec.edges = state.graphs[j].adjacency().cast<std::uint8_t>();
        rec.params = state.omegas[j].values();
        return rec;
    }
    const auto& nodes = state.nodes[j];
    const int q = static_cast<int>(nodes.size());
    rec.edges = EdgeMatrix::Zero(q, q);
    rec.params = Matrix::Zero(q, q);
    for (int s = 0; s < q; ++s) {
        rec.params(s, s) = nodes[s].tau;
        for (int k = 0; k < q - 1; ++k) {
            const int t = NodeRegression::other_node(s, k);
            rec.edges(s, t) = nodes[s].included[k];
            rec.params(s, t) = nodes[s].beta(k);
        }
    }
    return rec;
}

Sampler::Sampler(Dataset data, Hyperparameters hyper, Backend backend, SamplerOptions options)
    : data_(std::move(data)), hyper_(std::move(hyper)), backend_(backend), options_(options)
{
    hyper_.validate(data_.q(), data_.p());
    options_.validate();
    if (options_.single_cluster) hyper_.K = 1;
    if (backend_ == Backend::GWishart)
        constants_ = std::make_unique<PriorConstantCache>(
            hyper_.gwishart, options_.mc_samples,
            derive_seed(options_.seed, {static_cast<std::uint64_t>(Stream::NormConstant)}));
}

void Sampler::initialize()
{
    Rng rng = Rng::substream(options_.seed, Stream::Init);
    const int K = hyper_.K;
    ChainState st = draw_prior_state(data_.n(), data_.q(), data_.p(), backend_, hyper_, rng, constants_.get());
    const int init = std::min(options_.init_clusters, K);
    std::vector<int> labels(data_.n());
    for (int& l : labels) l = rng.uniform_int(0, init - 1);
    st.z = Allocation(std::move(labels), K);
    auto [V, pi] = update_sticks(st.z, hyper_.alpha, K, rng);
    st.V = std::move(V);
    st.pi = std::move(pi);
    refresh_clusters(data_, st, backend_, hyper_, options_, StepSeed{options_.seed, 0}, constants_.get());
    st.iteration = 0;
    state_ = std::move(st);
}

void Sampler::step()
{
    const long t = ++state_.iteration;
    const StepSeed seed{options_.seed, static_cast<std::uint64_t>(t)};
    Rng rng = Rng::substream(seed.root, Stream::Sticks, seed.iteration);
    auto [V, pi] = update_sticks(state_.z, hyper_.alpha, hyper_.K, rng);
    state_.V = std::move(V);
    state_.pi = std::move(pi);
    state_.z = update_allocation(data_, state_, backend_, options_, seed);
    refresh_clusters(data_, state_, backend_, hyper_, options_, seed, constants_.get());
}

TraceStore run_chain(const Dataset& data, const Hyperparameters& hyper, Backend backend,
                     const SamplerOptions& options)
{
    Sampler sampler(data, hyper, backend, options);
    TraceStore trace;
    trace.backend = backend;
    trace.data = data;
    trace.hyper = sampler.hyper();
    trace.options = options;
    trace.config_hash = hash_config(trace.hyper, options, backend);
    trace.draws.reserve(static_cast<std::size_t>((options.iterations - options.burn_in) / options.thin));

    sampler.initialize();
    for (int t = 1; t <= options.iterations; ++t) {
        sampler.step();
        if (t <= options.burn_in || (t - options.burn_in) % options.thin != 0) continue;
        const ChainState& st = sampler.state();
        TraceDraw d;
        d.iteration = t;
        d.z = st.z.labels();
        d.pi = st.pi;
        d.clusters.reserve(static_cast<std::size_t>(st.K()));
        for (int j = 0; j < st.K(); ++j) d.clusters.push_back(record_cluster(st, backend, j));
        if (options.record_dic) {
            const auto [g, s] = dic_components(data, st, backend, trace.hyper, options,
                                               StepSeed{options.seed, static_cast<std::uint64_t>(t)});
            d.loglik_graph = g;
            d.log_similarity = s;
        }
        trace.draws.push_back(std::move(d));
    }
    return trace;
}

} // namespace pxg
