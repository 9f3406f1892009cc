#include "pxg/summary.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pxg/density.hpp"

namespace pxg {

namespace {

void require_draws(const TraceStore& trace)
{
    if (trace.draws.empty()) throw InvalidArgument("trace has no retained draws");
}

// Edge indicators, precision entries and partial correlations of one cluster
// record, in a form that can be averaged. Pseudo indicators stay asymmetric
// until the final symmetrization.
struct ClusterView {
    Matrix edges;
    Matrix omega;
    Matrix pcor;
};

ClusterView view_of(const ClusterRecord& rec, Backend backend)
{
    const Eigen::Index q = rec.params.rows();
    ClusterView v;
    v.edges = rec.edges.cast<double>();
    v.omega = Matrix::Zero(q, q);
    v.pcor = Matrix::Zero(q, q);
    if (backend == Backend::GWishart) {
        v.omega = rec.params;
        for (Eigen::Index s = 0; s < q; ++s)
            for (Eigen::Index t = 0; t < q; ++t)
                if (s != t) v.pcor(s, t) = partial_correlation(rec.params, static_cast<int>(s), static_cast<int>(t));
        return v;
    }
    for (Eigen::Index s = 0; s < q; ++s) {
        v.omega(s, s) = 1.0 / rec.params(s, s);
        for (Eigen::Index t = 0; t < q; ++t) {
            if (s == t) continue;
            v.omega(s, t) = -0.5 * (rec.params(s, t) / rec.params(s, s) + rec.params(t, s) / rec.params(t, t));
            const double prod = rec.params(s, t) * rec.params(t, s);
            v.pcor(s, t) = prod > 0.0 ? (rec.params(s, t) > 0 ? 1.0 : -1.0) * std::sqrt(prod) : 0.0;
        }
    }
    return v;
}

Matrix finish_prob(const Matrix& raw, Backend backend)
{
    if (backend == Backend::Pseudo) return symmetrize(raw, SymmetrizeRule::Union);
    Matrix out = raw;
    out.diagonal().setZero();
    return out;
}

Eigen::MatrixXi threshold(const Matrix& prob, double cutoff)
{
    Eigen::MatrixXi g = (prob.array() > cutoff).cast<int>();
    g.diagonal().setZero();
    return g;
}

} // namespace

DahlResult dahl_partition(const TraceStore& trace)
{
    require_draws(trace);
    const int n = trace.n();
    const std::size_t B = trace.draws.size();
    Matrix pbar = Matrix::Zero(n, n);
    for (const auto& d : trace.draws)
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < i; ++k)
                if (d.z[i] == d.z[k]) pbar(i, k) += 1.0;
    pbar /= static_cast<double>(B);

    DahlResult best;
    best.loss = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < B; ++r) {
        const auto& z = trace.draws[r].z;
        double loss = 0.0;
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < i; ++k) {
                const double diff = (z[i] == z[k] ? 1.0 : 0.0) - pbar(i, k);
                loss += diff * diff;
            }
        loss *= 2.0; // full double sum over ordered pairs; the diagonal contributes 0
        if (loss < best.loss) {
            best.loss = loss;
            best.draw_index = r;
        }
    }
    best.partition = Allocation(trace.draws[best.draw_index].z, static_cast<int>(trace.draws[best.draw_index].pi.size()));
    return best;
}

EdgeProbabilityField partition_average(const TraceStore& trace, double cutoff)
{
    require_draws(trace);
    const int n = trace.n();
    const int q = trace.q();
    EdgeProbabilityField f;
    f.prob.assign(n, Matrix::Zero(q, q));
    f.omega_hat.assign(n, Matrix::Zero(q, q));
    f.partial_corr.assign(n, Matrix::Zero(q, q));
    for (const auto& d : trace.draws) {
        std::vector<std::vector<int>> members(d.clusters.size());
        for (int i = 0; i < n; ++i) members[d.z[i]].push_back(i);
        for (std::size_t j = 0; j < d.clusters.size(); ++j) {
            if (members[j].empty()) continue;
            const ClusterView v = view_of(d.clusters[j], trace.backend);
            for (int i : members[j]) {
                f.prob[i] += v.edges;
                f.omega_hat[i] += v.omega;
                f.partial_corr[i] += v.pcor;
            }
        }
    }
    const double B = static_cast<double>(trace.draws.size());
    f.graphs.resize(n);
    for (int i = 0; i < n; ++i) {
        f.prob[i] = finish_prob(f.prob[i] / B, trace.backend);
        f.omega_hat[i] /= B;
        f.partial_corr[i] /= B;
        f.graphs[i] = threshold(f.prob[i], cutoff);
    }
    return f;
}

std::vector<Graph> cluster_graphs(const Allocation& partition, const EdgeProbabilityField& field, double cutoff)
{
    std::vector<Graph> out;
    for (const auto& members : partition.members()) {
        if (members.empty()) continue;
        Matrix avg = Matrix::Zero(field.prob[members[0]].rows(), field.prob[members[0]].cols());
        for (int i : members) avg += field.prob[i];
        avg /= static_cast<double>(members.size());
        out.push_back(Graph::from_adjacency(threshold(avg, cutoff)));
    }
    return out;
}

std::vector<RankedEdge> ranked_edges(const Matrix& prob)
{
    std::vector<RankedEdge> out;
    for (int s = 0; s < prob.rows(); ++s)
        for (int t = s + 1; t < prob.cols(); ++t) out.push_back({s, t, prob(s, t)});
    std::stable_sort(out.begin(), out.end(), [](const RankedEdge& a, const RankedEdge& b) { return a.prob > b.prob; });
    return out;
}

Vector predictive_weights(const TraceDraw& draw, const Vector& x_new)
{
    const std::size_t K = draw.clusters.size();
    std::vector<double> logw(K);
    for (std::size_t j = 0; j < K; ++j) {
        const auto& c = draw.clusters[j].cov;
        logw[j] = draw.pi(static_cast<Eigen::Index>(j)) > 0.0
                      ? std::log(draw.pi(static_cast<Eigen::Index>(j))) + log_isotropic_normal(x_new, c.mu, c.sigmasq)
                      : -std::numeric_limits<double>::infinity();
    }
    const double lse = log_sum_exp(logw);
    if (!std::isfinite(lse)) throw NumericalError("predictive_weights: every cluster weight is zero");
    Vector w(K);
    for (std::size_t j = 0; j < K; ++j) w(static_cast<Eigen::Index>(j)) = std::exp(logw[j] - lse);
    return w;
}

Prediction predict_graph(const TraceStore& trace, const Vector& x_new, PredictMode mode, std::uint64_t seed)
{
    require_draws(trace);
    if (x_new.size() != trace.data.p()) throw InvalidArgument("predict_graph: x_new length differs from p");
    const int q = trace.q();
    Prediction out{Matrix::Zero(q, q), Matrix::Zero(q, q), Matrix::Zero(q, q)};
    for (std::size_t r = 0; r < trace.draws.size(); ++r) {
        const TraceDraw& d = trace.draws[r];
        const Vector w = predictive_weights(d, x_new);
        if (mode == PredictMode::Sampled) {
            Rng rng = Rng::substream(seed, Stream::Predict, r);
            std::vector<double> logw(static_cast<std::size_t>(w.size()));
            for (Eigen::Index j = 0; j < w.size(); ++j)
                logw[j] = w(j) > 0.0 ? std::log(w(j)) : -std::numeric_limits<double>::infinity();
            const ClusterView v = view_of(d.clusters[rng.categorical_log(logw)], trace.backend);
            out.prob += v.edges;
            out.omega_hat += v.omega;
            out.partial_corr += v.pcor;
            continue;
        }
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            if (w(j) == 0.0) continue;
            const ClusterView v = view_of(d.clusters[j], trace.backend);
            out.prob += w(j) * v.edges;
            out.omega_hat += w(j) * v.omega;
            out.partial_corr += w(j) * v.pcor;
        }
    }
    const double B = static_cast<double>(trace.draws.size());
    out.prob = finish_prob(out.prob / B, trace.backend);
    out.prob = out.prob.cwiseMax(0.0).cwiseMin(1.0);
    out.omega_hat /= B;
    out.partial_corr /= B;
    return out;
}

double sample_variance(const std::vector<double>& values)
{
    const std::size_t B = values.size();
    if (B < 2) return 0.0;
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(B);
    double acc = 0.0;
    for (double v : values) acc += (v - mean) * (v - mean);
    return acc / static_cast<double>(B - 1);
}

double log_graph_marginal(const TraceStore& trace, const Graph& graph, const ClusterData& data, std::uint64_t salt)
{
    if (trace.backend == Backend::GWishart) {
        Rng rng = Rng::substream(trace.options.seed, Stream::Dic, ~0ULL, salt);
        return log_marginal_gwishart(graph, data, trace.hyper.gwishart, trace.options.dic_mc_samples, rng);
    }
    return log_pseudo_marginal(graph.adjacency(), data, trace.hyper.spike_slab);
}

namespace {

struct PointTerms {
    double graph = 0.0;
    double similarity = 0.0;
};

// Deviance ingredients at the Dahl partition with per-cluster point graphs.
PointTerms point_terms(const TraceStore& trace, double cutoff)
{
    const DahlResult dahl = dahl_partition(trace);
    const EdgeProbabilityField field = partition_average(trace, cutoff);
    const std::vector<Graph> graphs = cluster_graphs(dahl.partition, field, cutoff);
    PointTerms out;
    std::size_t g = 0;
    for (const auto& members : dahl.partition.members()) {
        if (members.empty()) continue;
        const ClusterData cd = ClusterData::of_rows(trace.data.Y(), members);
        out.graph += log_graph_marginal(trace, graphs[g], cd, g);
        out.similarity += log_similarity(CovariateStats::of_rows(trace.data.X(), members), trace.hyper.covariate);
        ++g;
    }
    return out;
}

void require_dic_terms(const TraceStore& trace)
{
    require_draws(trace);
    if (!trace.options.record_dic) throw InvalidArgument("trace was recorded without DIC components");
}

} // namespace

DicReport dic_full(const TraceStore& trace, double cutoff)
{
    require_dic_terms(trace);
    const PointTerms pt = point_terms(trace, cutoff);
    std::vector<double> sums;
    for (const auto& d : trace.draws) sums.push_back(d.loglik_graph + d.log_similarity);
    DicReport r;
    r.deviance = -2.0 * (pt.graph + pt.similarity);
    r.penalty = sample_variance(sums);
    r.value = r.deviance + r.penalty;
    return r;
}

DicReport dic_graph_only(const TraceStore& trace, double cutoff)
{
    require_dic_terms(trace);
    const PointTerms pt = point_terms(trace, cutoff);
    std::vector<double> sums;
    for (const auto& d : trace.draws) sums.push_back(d.loglik_graph);
    DicReport r;
    r.deviance = -2.0 * pt.graph - 2.0 * log_similarity(trace.data.X(), trace.hyper.covariate);
    r.penalty = sample_variance(sums);
    r.value = r.deviance + r.penalty;
    return r;
}

DicReport dic_cov_only(const TraceStore& trace, const TraceStore& pooled, double cutoff)
{
    require_dic_terms(trace);
    require_dic_terms(pooled);
    if (pooled.K() != 1)
        throw InvalidArgument("covariate-only DIC needs a pooled single-cluster fit (run fit with --pooled)");
    if (pooled.n() != trace.n() || pooled.q() != trace.q() || pooled.backend != trace.backend)
        throw InvalidArgument("pooled trace does not match the main trace's data or backend");
    const PointTerms pt = point_terms(trace, cutoff);
    std::vector<double> sim;
    for (const auto& d : trace.draws) sim.push_back(d.log_similarity);

    const EdgeProbabilityField pooled_field = partition_average(pooled, cutoff);
    const Graph pooled_graph = cluster_graphs(Allocation(std::vector<int>(pooled.n(), 0), 1), pooled_field, cutoff)[0];
    const double pooled_ll =
        log_graph_marginal(pooled, pooled_graph, ClusterData::of(pooled.data.Y()), 0);
    std::vector<double> pooled_terms;
    for (const auto& d : pooled.draws) pooled_terms.push_back(d.loglik_graph);

    DicReport r;
    r.deviance = -2.0 * pt.similarity - 2.0 * pooled_ll;
    r.penalty = sample_variance(sim) + sample_variance(pooled_terms);
    r.value = r.deviance + r.penalty;
    return r;
}

} // namespace pxg
