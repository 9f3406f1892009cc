#include "pxg/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>

#include <CLI11.hpp>
#include <json.hpp>

#include "pxg/io.hpp"
#include "pxg/simgen.hpp"
#include "pxg/summary.hpp"

#ifndef PXG_VERSION
#define PXG_VERSION "unknown"
#endif

namespace pxg::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Gaussian-G-Wishart is refused above this dimension unless --force is given.
constexpr int kGWishartMaxQ = 15;

json matrix_json(const Matrix& m)
{
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_json(const Vector& v)
{
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json edges_json(const Graph& g)
{
    json out = json::array();
    for (int s = 0; s < g.size(); ++s)
        for (int t = s + 1; t < g.size(); ++t)
            if (g.has_edge(s, t)) out.push_back({s + 1, t + 1});
    return out;
}

Matrix json_matrix(const json& j, int q, const char* what)
{
    if (j.is_number()) return Matrix::Identity(q, q) * j.get<double>();
    if (!j.is_array() || static_cast<int>(j.size()) != q)
        throw InvalidArgument(std::string(what) + " must be a number or a q x q array");
    Matrix m(q, q);
    for (int r = 0; r < q; ++r) {
        if (!j[r].is_array() || static_cast<int>(j[r].size()) != q)
            throw InvalidArgument(std::string(what) + " must be a q x q array");
        for (int c = 0; c < q; ++c) m(r, c) = j[r][c].get<double>();
    }
    return m;
}

Vector json_vector(const json& j, int p, const char* what)
{
    if (j.is_number()) return Vector::Constant(p, j.get<double>());
    if (!j.is_array() || static_cast<int>(j.size()) != p)
        throw InvalidArgument(std::string(what) + " must be a number or a length-p array");
    Vector v(p);
    for (int i = 0; i < p; ++i) v(i) = j[i].get<double>();
    return v;
}

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where)
{
    if (!obj.is_object()) throw InvalidArgument(where + " must be a JSON object");
    for (const auto& item : obj.items())
        if (!allowed.count(item.key())) throw InvalidArgument("unknown config key '" + item.key() + "' in " + where);
}

// Overrides defaults with the optional fields of a JSON config.
void apply_config(const json& cfg, Hyperparameters& h, int q, int p)
{
    check_keys(cfg, {"alpha", "alpha_g", "K", "gwishart", "spike_slab", "covariate"}, "config");
    if (cfg.contains("alpha")) h.alpha = cfg["alpha"].get<double>();
    if (cfg.contains("alpha_g")) h.alpha_g = cfg["alpha_g"].get<double>();
    if (cfg.contains("K")) h.K = cfg["K"].get<int>();
    if (cfg.contains("gwishart")) {
        const json& g = cfg["gwishart"];
        check_keys(g, {"b", "D"}, "gwishart");
        if (g.contains("b")) h.gwishart.b = g["b"].get<double>();
        if (g.contains("D")) h.gwishart.D = json_matrix(g["D"], q, "gwishart.D");
    }
    if (cfg.contains("spike_slab")) {
        const json& s = cfg["spike_slab"];
        check_keys(s, {"eta0", "eta1", "a1", "a2"}, "spike_slab");
        if (s.contains("eta1")) {
            h.spike_slab.eta1 = s["eta1"].get<double>();
            h.spike_slab.eta0 = 0.01 * h.spike_slab.eta1 / q;
        }
        if (s.contains("eta0")) h.spike_slab.eta0 = s["eta0"].get<double>();
        if (s.contains("a1")) h.spike_slab.a1 = s["a1"].get<double>();
        if (s.contains("a2")) h.spike_slab.a2 = s["a2"].get<double>();
    }
    if (cfg.contains("covariate")) {
        const json& c = cfg["covariate"];
        check_keys(c, {"mu0", "sigma0sq", "b1", "b2"}, "covariate");
        if (c.contains("mu0")) h.covariate.mu0 = json_vector(c["mu0"], p, "covariate.mu0");
        if (c.contains("sigma0sq")) h.covariate.sigma0sq = c["sigma0sq"].get<double>();
        if (c.contains("b1")) h.covariate.b1 = c["b1"].get<double>();
        if (c.contains("b2")) h.covariate.b2 = c["b2"].get<double>();
    }
}

json hyper_json(const Hyperparameters& h)
{
    return {{"alpha", h.alpha},
            {"alpha_g", h.alpha_g},
            {"K", h.K},
            {"gwishart", {{"b", h.gwishart.b}, {"D", matrix_json(h.gwishart.D)}}},
            {"spike_slab",
             {{"eta0", h.spike_slab.eta0}, {"eta1", h.spike_slab.eta1}, {"a1", h.spike_slab.a1}, {"a2", h.spike_slab.a2}}},
            {"covariate",
             {{"mu0", vector_json(h.covariate.mu0)},
              {"sigma0sq", h.covariate.sigma0sq},
              {"b1", h.covariate.b1},
              {"b2", h.covariate.b2}}}};
}

json options_json(const SamplerOptions& o)
{
    return {{"iterations", o.iterations},
            {"burn_in", o.burn_in},
            {"thin", o.thin},
            {"seed", o.seed},
            {"threads", o.threads},
            {"mc_samples", o.mc_samples},
            {"dic_mc_samples", o.dic_mc_samples},
            {"init_clusters", o.init_clusters},
            {"single_cluster", o.single_cluster},
            {"allocation_likelihood", o.allocation_likelihood == AllocationLikelihood::Pseudo ? "pseudo" : "gaussian"}};
}

void write_json(const fs::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

std::ofstream open_csv(const fs::path& path, const std::string& header)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << header << '\n';
    return out;
}

void ensure_dir(const std::string& dir)
{
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create output directory " + dir + ": " + ec.message());
}

void require_file(const std::string& path, const char* flag)
{
    if (!fs::is_regular_file(path)) throw InvalidArgument(std::string(flag) + ": file not found: " + path);
}

std::vector<std::string> numbered(const char* prefix, int k)
{
    std::vector<std::string> out;
    for (int i = 1; i <= k; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

// Labels renumbered 1..k in order of first appearance.
std::vector<int> canonical_labels(const std::vector<int>& z)
{
    std::map<int, int> seen;
    std::vector<int> out;
    for (int l : z) {
        auto it = seen.emplace(l, static_cast<int>(seen.size()) + 1).first;
        out.push_back(it->second);
    }
    return out;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    int example = 1;
    std::optional<int> n_per;
    SimulationSpec spec;
    std::uint64_t seed = 1;
    std::string out;
};

int cmd_simulate(const SimulateArgs& a)
{
    SimulationSpec spec = a.spec;
    spec.example = a.example;
    spec.n_per = a.n_per.value_or(a.example == 1 ? 100 : a.example == 2 ? 300 : 250);
    const SimulatedData sim = generate(spec, a.seed);
    ensure_dir(a.out);
    const fs::path dir(a.out);
    write_matrix_csv((dir / "Y.csv").string(), sim.data.Y(), numbered("y", sim.data.q()));
    write_matrix_csv((dir / "X.csv").string(), sim.data.X(), numbered("x", sim.data.p()));

    json truth;
    truth["example"] = spec.example;
    truth["seed"] = a.seed;
    truth["n"] = sim.data.n();
    truth["q"] = sim.data.q();
    truth["p"] = sim.data.p();
    json labels = json::array();
    for (int l : sim.labels) labels.push_back(l + 1);
    truth["labels"] = labels;
    json graphs = json::array();
    for (const Graph& g : sim.region_graphs) graphs.push_back(edges_json(g));
    truth["graphs"] = graphs;
    if (spec.example == 3) {
        // Precision is constant within a cluster: omega_i = cluster_omega[label_i - 1].
        json omegas = json::array();
        for (int k = 0; k < 2; ++k) {
            for (std::size_t i = 0; i < sim.labels.size(); ++i)
                if (sim.labels[i] == k) {
                    omegas.push_back(matrix_json(sim.omega[i].values()));
                    break;
                }
        }
        truth["cluster_omega"] = omegas;
    } else {
        json omegas = json::array();
        for (const auto& o : sim.omega) omegas.push_back(matrix_json(o.values()));
        truth["omega"] = omegas;
    }
    write_json(dir / "truth.json", truth);
    return kExitOk;
}

// --------------------------------------------------------------------- fit

struct FitArgs {
    std::string y, x, config, out;
    std::string backend = "gwishart";
    std::string alloc = "pseudo";
    int iters = 1500, burn = 500, thin = 1;
    std::optional<int> threads;
    int mc_samples = 100, dic_mc_samples = 200, init_clusters = 5;
    std::uint64_t seed = 1;
    bool center = false, standardize = false, force = false, pooled = false;
};

int resolve_threads(const std::optional<int>& flag)
{
    if (flag) return *flag;
    if (const char* env = std::getenv("PXG_THREADS")) {
        try {
            const int t = std::stoi(env);
            if (t >= 1) return t;
        } catch (const std::exception&) {
        }
        throw InvalidArgument(std::string("PXG_THREADS must be a positive integer, got '") + env + "'");
    }
    return 1;
}

int cmd_fit(const FitArgs& a, const std::vector<std::string>& argv)
{
    require_file(a.y, "--y");
    require_file(a.x, "--x");
    const Backend backend = backend_from_string(a.backend);
    Matrix Y = read_matrix_csv(a.y);
    Matrix X = read_matrix_csv(a.x);
    if (Y.rows() != X.rows())
        throw InvalidArgument("row counts differ: " + a.y + " has " + std::to_string(Y.rows()) + ", " + a.x + " has " +
                              std::to_string(X.rows()));
    Dataset data(std::move(Y), std::move(X));
    if (a.standardize)
        data = data.standardized();
    else if (a.center)
        data = data.centered();

    if (backend == Backend::GWishart && data.q() > kGWishartMaxQ && !a.force) {
        std::cerr << "warning: the gwishart backend is intended for q <= " << kGWishartMaxQ << " (q = " << data.q()
                  << "); use --backend pseudo or pass --force\n";
        throw InvalidArgument("gwishart backend refused for q > " + std::to_string(kGWishartMaxQ) + " without --force");
    }

    Hyperparameters hyper = Hyperparameters::defaults(data);
    if (!a.config.empty()) {
        require_file(a.config, "--config");
        std::ifstream in(a.config);
        json cfg;
        try {
            cfg = json::parse(in);
        } catch (const json::exception& e) {
            throw FormatError("config " + a.config + ": " + e.what());
        }
        try {
            apply_config(cfg, hyper, data.q(), data.p());
        } catch (const json::exception& e) {
            throw InvalidArgument("config " + a.config + ": " + e.what());
        }
    }

    SamplerOptions o;
    o.iterations = a.iters;
    o.burn_in = a.burn;
    o.thin = a.thin;
    o.seed = a.seed;
    o.threads = resolve_threads(a.threads);
    o.mc_samples = a.mc_samples;
    o.dic_mc_samples = a.dic_mc_samples;
    o.init_clusters = a.init_clusters;
    o.single_cluster = a.pooled;
    o.allocation_likelihood = a.alloc == "gaussian" ? AllocationLikelihood::Gaussian : AllocationLikelihood::Pseudo;
    o.validate();
    hyper.validate(data.q(), data.p());

    const auto start = std::chrono::steady_clock::now();
    const TraceStore trace = run_chain(data, hyper, backend, o);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ensure_dir(a.out);
    const fs::path dir(a.out);
    write_trace((dir / "trace.bin").string(), trace);

    std::ofstream ll = open_csv(dir / "loglik.csv", "iteration,loglik_graph,log_similarity,total");
    double mean_graph = 0.0, mean_sim = 0.0, mean_occupied = 0.0;
    for (const TraceDraw& d : trace.draws) {
        ll << d.iteration << ',' << format_double(d.loglik_graph) << ',' << format_double(d.log_similarity) << ','
           << format_double(d.loglik_graph + d.log_similarity) << '\n';
        mean_graph += d.loglik_graph;
        mean_sim += d.log_similarity;
        mean_occupied += std::set<int>(d.z.begin(), d.z.end()).size();
    }
    const double B = static_cast<double>(trace.draws.size());

    json manifest;
    manifest["version"] = PXG_VERSION;
    manifest["command"] = argv;
    manifest["backend"] = to_string(backend);
    manifest["seed"] = o.seed;
    manifest["config_hash"] = trace.config_hash;
    manifest["data"] = {{"y", a.y}, {"x", a.x}, {"n", data.n()}, {"q", data.q()}, {"p", data.p()},
                        {"center", a.center}, {"standardize", a.standardize}};
    manifest["options"] = options_json(o);
    manifest["hyperparameters"] = hyper_json(trace.hyper);
    manifest["retained_draws"] = trace.draws.size();
    manifest["summary"] = {{"mean_loglik_graph", mean_graph / B},
                           {"mean_log_similarity", mean_sim / B},
                           {"mean_occupied_clusters", mean_occupied / B}};
    manifest["wall_time_seconds"] = wall;
    write_json(dir / "manifest.json", manifest);
    return kExitOk;
}

// --------------------------------------------------------------- summarize

int cmd_summarize(const std::string& trace_path, const std::string& out, double cutoff, bool ranked)
{
    require_file(trace_path, "--trace");
    if (!(cutoff >= 0.0 && cutoff <= 1.0)) throw InvalidArgument("--cutoff must lie in [0, 1]");
    const TraceStore trace = read_trace(trace_path);
    const DahlResult dahl = dahl_partition(trace);
    const EdgeProbabilityField field = partition_average(trace, cutoff);
    const int n = trace.n(), q = trace.q();
    ensure_dir(out);
    const fs::path dir(out);

    const std::vector<int> labels = canonical_labels(dahl.partition.labels());
    {
        std::ofstream f = open_csv(dir / "allocation.csv", "obs,cluster");
        for (int i = 0; i < n; ++i) f << i + 1 << ',' << labels[i] << '\n';
    }
    {
        std::ofstream f = open_csv(dir / "edge_prob.csv", "obs,s,t,prob");
        for (int i = 0; i < n; ++i)
            for (int s = 0; s < q; ++s)
                for (int t = 0; t < q; ++t)
                    if (s != t) f << i + 1 << ',' << s + 1 << ',' << t + 1 << ',' << format_double(field.prob[i](s, t)) << '\n';
    }
    {
        std::ofstream f = open_csv(dir / "precision.csv", "obs,s,t,omega_hat,partial_corr");
        for (int i = 0; i < n; ++i)
            for (int s = 0; s < q; ++s)
                for (int t = 0; t < q; ++t)
                    f << i + 1 << ',' << s + 1 << ',' << t + 1 << ',' << format_double(field.omega_hat[i](s, t)) << ','
                      << format_double(s == t ? 1.0 : field.partial_corr[i](s, t)) << '\n';
    }

    const std::vector<Graph> graphs = cluster_graphs(dahl.partition, field, cutoff);
    json clusters = json::array();
    std::ofstream ranked_out;
    if (ranked) ranked_out = open_csv(dir / "ranked_edges.csv", "cluster,rank,s,t,prob");
    std::size_t g = 0;
    for (const auto& members : dahl.partition.members()) {
        if (members.empty()) continue;
        const int label = labels[members[0]];
        clusters.push_back({{"cluster", label}, {"size", members.size()}, {"edges", edges_json(graphs[g])}});
        if (ranked) {
            Matrix avg = Matrix::Zero(q, q);
            for (int i : members) avg += field.prob[i];
            avg /= static_cast<double>(members.size());
            int rank = 0;
            for (const RankedEdge& e : ranked_edges(avg))
                ranked_out << label << ',' << ++rank << ',' << e.s + 1 << ',' << e.t + 1 << ',' << format_double(e.prob)
                           << '\n';
        }
        ++g;
    }
    std::sort(clusters.begin(), clusters.end(),
              [](const json& a, const json& b) { return a["cluster"].get<int>() < b["cluster"].get<int>(); });
    write_json(dir / "graphs.json", {{"cutoff", cutoff}, {"backend", to_string(trace.backend)}, {"clusters", clusters}});
    return kExitOk;
}

// ----------------------------------------------------------------- predict

int cmd_predict(const std::string& trace_path, const std::string& xnew_path, const std::string& mode,
                std::uint64_t seed, const std::string& out)
{
    require_file(trace_path, "--trace");
    require_file(xnew_path, "--xnew");
    const TraceStore trace = read_trace(trace_path);
    const Matrix xnew = read_matrix_csv(xnew_path);
    if (xnew.rows() > 0 && xnew.cols() != trace.data.p())
        throw InvalidArgument("--xnew has " + std::to_string(xnew.cols()) + " columns but the model has p = " +
                              std::to_string(trace.data.p()));
    const PredictMode m = mode == "sampled" ? PredictMode::Sampled : PredictMode::RaoBlackwell;
    const int q = trace.q();
    ensure_dir(out);
    const fs::path dir(out);
    std::ofstream fp = open_csv(dir / "predict_edge_prob.csv", "row,s,t,prob");
    std::ofstream fo = open_csv(dir / "predict_precision.csv", "row,s,t,omega_hat,partial_corr");
    for (Eigen::Index r = 0; r < xnew.rows(); ++r) {
        const Prediction pr = predict_graph(trace, xnew.row(r).transpose(), m, seed);
        for (int s = 0; s < q; ++s)
            for (int t = 0; t < q; ++t) {
                if (s != t) fp << r + 1 << ',' << s + 1 << ',' << t + 1 << ',' << format_double(pr.prob(s, t)) << '\n';
                fo << r + 1 << ',' << s + 1 << ',' << t + 1 << ',' << format_double(pr.omega_hat(s, t)) << ','
                   << format_double(s == t ? 1.0 : pr.partial_corr(s, t)) << '\n';
            }
    }
    return kExitOk;
}

// --------------------------------------------------------------------- dic

json dic_json(const DicReport& r)
{
    return {{"value", r.value}, {"deviance", r.deviance}, {"penalty", r.penalty}};
}

int cmd_dic(const std::string& trace_path, const std::string& pooled_path, double cutoff, const std::string& out)
{
    require_file(trace_path, "--trace");
    const TraceStore trace = read_trace(trace_path);
    json j;
    j["cutoff"] = cutoff;
    j["full"] = dic_json(dic_full(trace, cutoff));
    j["graph_only"] = dic_json(dic_graph_only(trace, cutoff));
    if (pooled_path.empty()) {
        j["cov_only"] = nullptr;
        j["cov_only_note"] = "covariate-only DIC needs a pooled single-graph fit: run `pxg fit --pooled` on the same "
                             "data and pass its trace with --pooled-trace";
    } else {
        require_file(pooled_path, "--pooled-trace");
        j["cov_only"] = dic_json(dic_cov_only(trace, read_trace(pooled_path), cutoff));
    }
    ensure_dir(out);
    write_json(fs::path(out) / "dic.json", j);
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args)
{
    CLI::App app{"PxG: covariate-dependent Gaussian graphical models through a PPMx partition prior", "pxg"};
    app.set_version_flag("--version", std::string(PXG_VERSION));
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* s = app.add_subcommand("simulate", "Generate a benchmark dataset with ground truth");
    s->add_option("--example", sim.example, "Design: 1, 2 or 3")->required()->check(CLI::IsMember({1, 2, 3}));
    s->add_option("--n-per", sim.n_per, "Observations per region (1), total (2), per cluster (3)")
        ->check(CLI::PositiveNumber);
    s->add_option("--q", sim.spec.q, "Example 3: number of responses")->check(CLI::Range(2, 100000));
    s->add_option("--p", sim.spec.p, "Example 3: number of covariates")->check(CLI::PositiveNumber);
    s->add_option("--sparsity", sim.spec.sparsity, "Example 3: edge probability")->check(CLI::Range(0.0, 1.0));
    s->add_option("--df", sim.spec.df, "Example 3: G-Wishart degrees of freedom");
    s->add_option("--seed", sim.seed, "Random seed");
    s->add_option("--out", sim.out, "Output directory")->required();

    FitArgs fit;
    auto* f = app.add_subcommand("fit", "Run the blocked Gibbs sampler");
    f->add_option("--y", fit.y, "Response CSV (n x q)")->required();
    f->add_option("--x", fit.x, "Covariate CSV (n x p)")->required();
    f->add_option("--backend", fit.backend, "gwishart or pseudo")->check(CLI::IsMember({"gwishart", "pseudo"}));
    f->add_option("--config", fit.config, "JSON hyperparameter overrides");
    f->add_option("--iters", fit.iters, "Total sweeps including burn-in")->check(CLI::PositiveNumber);
    f->add_option("--burn", fit.burn, "Burn-in sweeps")->check(CLI::NonNegativeNumber);
    f->add_option("--thin", fit.thin, "Keep every thin-th post-burn-in sweep")->check(CLI::PositiveNumber);
    f->add_option("--seed", fit.seed, "Root random seed");
    f->add_option("--threads", fit.threads, "Worker threads (default: $PXG_THREADS or 1)")->check(CLI::PositiveNumber);
    f->add_option("--mc-samples", fit.mc_samples, "Monte-Carlo size for prior G-Wishart constants");
    f->add_option("--dic-mc-samples", fit.dic_mc_samples, "Monte-Carlo size for DIC marginal likelihoods");
    f->add_option("--init-clusters", fit.init_clusters, "Clusters used by the random initial allocation")
        ->check(CLI::PositiveNumber);
    f->add_option("--alloc-likelihood", fit.alloc, "Pseudo backend allocation likelihood: pseudo or gaussian")
        ->check(CLI::IsMember({"pseudo", "gaussian"}));
    f->add_flag("--center", fit.center, "Subtract column means from Y");
    f->add_flag("--standardize", fit.standardize, "Center and scale Y columns to unit variance");
    f->add_flag("--force", fit.force, "Allow the gwishart backend for q > 15");
    f->add_flag("--pooled", fit.pooled, "Single-cluster companion fit (for covariate-only DIC)");
    f->add_option("--out", fit.out, "Output directory")->required();

    std::string trace_path, out, xnew, mode = "rb", pooled;
    double cutoff = 0.5;
    bool ranked = false;
    std::uint64_t predict_seed = 1;
    auto* su = app.add_subcommand("summarize", "Dahl partition, edge probabilities, precision summaries");
    su->add_option("--trace", trace_path, "trace.bin from fit")->required();
    su->add_option("--out", out, "Output directory")->required();
    su->add_option("--cutoff", cutoff, "Edge inclusion cutoff");
    su->add_flag("--ranked", ranked, "Also write probability-sorted edge lists per cluster");

    auto* pr = app.add_subcommand("predict", "Graph prediction at new covariates");
    pr->add_option("--trace", trace_path, "trace.bin from fit")->required();
    pr->add_option("--xnew", xnew, "CSV of new covariate rows")->required();
    pr->add_option("--mode", mode, "rb (Rao-Blackwellised) or sampled")->check(CLI::IsMember({"rb", "sampled"}));
    pr->add_option("--seed", predict_seed, "Seed for sampled mode");
    pr->add_option("--out", out, "Output directory")->required();

    auto* di = app.add_subcommand("dic", "DIC of the full, graph-only and covariate-only models");
    di->add_option("--trace", trace_path, "trace.bin from fit")->required();
    di->add_option("--pooled-trace", pooled, "trace.bin from fit --pooled on the same data");
    di->add_option("--cutoff", cutoff, "Edge inclusion cutoff for point graphs");
    di->add_option("--out", out, "Output directory")->required();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    std::vector<std::string> argv{"pxg"};
    argv.insert(argv.end(), args.begin(), args.end());
    try {
        if (s->parsed()) return cmd_simulate(sim);
        if (f->parsed()) return cmd_fit(fit, argv);
        if (su->parsed()) return cmd_summarize(trace_path, out, cutoff, ranked);
        if (pr->parsed()) return cmd_predict(trace_path, xnew, mode, predict_seed, out);
        if (di->parsed()) return cmd_dic(trace_path, pooled, cutoff, out);
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}

} // namespace pxg::cli
