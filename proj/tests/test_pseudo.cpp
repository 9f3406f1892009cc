#include <doctest.h>

#include <numbers>

#include "pxg/density.hpp"
#include "pxg/pseudo.hpp"
#include "test_util.hpp"

using namespace pxg;

namespace {

Hyperparameters pseudo_hyper(int q)
{
    Hyperparameters h;
    h.spike_slab.eta1 = 1.0;
    h.spike_slab.eta0 = 0.01 / q;
    h.alpha_g = 0.5;
    return h;
}

double log_normal_pdf(double x, double var) { return -0.5 * std::log(2 * std::numbers::pi * var) - 0.5 * x * x / var; }

Matrix simulate(int n, const Matrix& omega, Rng& rng)
{
    const PrecisionMatrix om(omega);
    Matrix y(n, omega.rows());
    for (int i = 0; i < n; ++i)
        y.row(i) = om.cholesky().transpose().triangularView<Eigen::Upper>().solve(rng.normal_vector(omega.rows())).transpose();
    return y;
}

} // namespace

TEST_CASE("edge inclusion probability")
{
    SpikeSlabParams ss;
    ss.eta1 = 1.0;
    ss.eta0 = 0.01;
    CHECK(edge_inclusion_probability(0.0, 0.7, ss, 0.5) == doctest::Approx(1.0 / 11).epsilon(1e-12));
    CHECK(edge_inclusion_probability(0.3, 0.7, ss, 1.0) == 1.0);
    CHECK(edge_inclusion_probability(0.3, 0.7, ss, 0.0) == 0.0);

    const double tau = 0.4, beta = 3 * std::sqrt(ss.eta1 * tau), ag = 0.3;
    const double w1 = ag * std::exp(log_normal_pdf(beta, ss.eta1 * tau));
    const double w0 = (1 - ag) * std::exp(log_normal_pdf(beta, ss.eta0 * tau));
    CHECK(std::abs(edge_inclusion_probability(beta, tau, ss, ag) - w1 / (w0 + w1)) < 1e-12);

    Hyperparameters h = pseudo_hyper(3);
    h.alpha_g = 1.0;
    Rng rng(1);
    for (int i = 0; i < 100; ++i) CHECK(update_edge_indicator(0.0, 1.0, h, rng));
}

TEST_CASE("tau conditional")
{
    Hyperparameters h = pseudo_hyper(4);
    h.spike_slab.a1 = 2.0;
    h.spike_slab.a2 = 1.5;
    const std::vector<std::uint8_t> inc{1, 0, 1};
    InvGammaParams e = tau_conditional(1, ClusterData::empty(4), Vector::Zero(3), inc, h);
    CHECK(e.shape == doctest::Approx(2.0 + 1.5));
    CHECK(e.rate == doctest::Approx(1.5));

    Rng rng(2);
    const Matrix y = simulate(6, Matrix::Identity(4, 4), rng);
    const ClusterData cd = ClusterData::of(y);
    Vector beta(3);
    beta << 0.2, -0.1, 0.4;
    // Node 1 regresses on nodes 0, 2, 3.
    Vector resid = y.col(1) - beta(0) * y.col(0) - beta(1) * y.col(2) - beta(2) * y.col(3);
    const double penalty = beta(0) * beta(0) / h.spike_slab.eta1 + beta(1) * beta(1) / h.spike_slab.eta0 +
                           beta(2) * beta(2) / h.spike_slab.eta1;
    InvGammaParams f = tau_conditional(1, cd, beta, inc, h);
    CHECK(f.shape == doctest::Approx(2.0 + 3.0 + 1.5).epsilon(1e-14));
    CHECK(f.rate == doctest::Approx(1.5 + 0.5 * resid.squaredNorm() + 0.5 * penalty).epsilon(1e-12));

    std::vector<double> draws;
    for (int i = 0; i < 100000; ++i) draws.push_back(update_tau(1, cd, beta, inc, h, rng));
    CHECK(std::abs(test::mean(draws) - f.rate / (f.shape - 1)) < 3 * test::std_error(draws));
}

TEST_CASE("beta conditional")
{
    Hyperparameters h = pseudo_hyper(3);
    Rng rng(3);
    const std::vector<std::uint8_t> inc{1, 0};
    BetaConditional prior = beta_conditional(0, ClusterData::empty(3), inc, h);
    CHECK(prior.mean.norm() == 0.0);
    const Matrix cov = prior.precision_llt.solve(Matrix::Identity(2, 2));
    CHECK(cov(0, 0) == doctest::Approx(h.spike_slab.eta1));
    CHECK(cov(1, 1) == doctest::Approx(h.spike_slab.eta0));

    // Orthonormal design: OLS coefficients are X^T y.
    Matrix y(4, 3);
    y.col(1) << 0.5, 0.5, 0.5, 0.5;
    y.col(2) << 0.5, -0.5, 0.5, -0.5;
    y.col(0) << 1.0, 2.0, -0.5, 0.3;
    Hyperparameters flat = h;
    flat.spike_slab.eta0 = 1e6;
    flat.spike_slab.eta1 = 1e6;
    BetaConditional bc = beta_conditional(0, ClusterData::of(y), inc, flat);
    CHECK(std::abs(bc.mean(0) - y.col(1).dot(y.col(0))) < 1e-4);
    CHECK(std::abs(bc.mean(1) - y.col(2).dot(y.col(0))) < 1e-4);

    const ClusterData cd = ClusterData::of(simulate(10, Matrix::Identity(3, 3), rng));
    const BetaConditional target = beta_conditional(2, cd, {1, 1}, h);
    std::vector<double> b0, b1;
    for (int i = 0; i < 100000; ++i) {
        const Vector b = update_beta(2, cd, 0.8, {1, 1}, h, rng);
        b0.push_back(b(0));
        b1.push_back(b(1));
    }
    CHECK(std::abs(test::mean(b0) - target.mean(0)) < 3 * test::std_error(b0));
    CHECK(std::abs(test::mean(b1) - target.mean(1)) < 3 * test::std_error(b1));
    const Matrix vcov = 0.8 * target.precision_llt.solve(Matrix::Identity(2, 2));
    CHECK(test::stddev(b0) == doctest::Approx(std::sqrt(vcov(0, 0))).epsilon(0.02));
}

TEST_CASE("symmetrize")
{
    Matrix p(2, 2);
    p << 0.0, 0.7, 0.3, 0.0;
    const Matrix u = symmetrize(p);
    CHECK(u(0, 1) == 0.7);
    CHECK(u(1, 0) == 0.7);
    CHECK(symmetrize(p, SymmetrizeRule::Intersection)(1, 0) == 0.3);
    Rng rng(4);
    Matrix r(5, 5);
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j) r(i, j) = rng.uniform();
    const Matrix sym = symmetrize(r);
    CHECK((symmetrize(sym) - sym).norm() == 0.0);
    CHECK(((sym - symmetrize(r, SymmetrizeRule::Intersection)).array() >= 0).all());
    CHECK(sym.diagonal().norm() == 0.0);
}

TEST_CASE("pseudo marginal matches quadrature (q = 2, n = 3)")
{
    SpikeSlabParams ss{0.02, 1.0, 1.5, 0.8};
    Matrix y(3, 2);
    y << 0.4, -0.3, 1.1, 0.9, -0.7, -0.2;
    const ClusterData cd = ClusterData::of(y);
    CHECK(log_pseudo_marginal(Eigen::MatrixXi::Zero(2, 2), ClusterData::empty(2), ss) == 0.0);

    for (int g = 0; g < 2; ++g) {
        Eigen::MatrixXi ind = Eigen::MatrixXi::Zero(2, 2);
        ind(0, 1) = ind(1, 0) = g;
        const double eta = g ? ss.eta1 : ss.eta0;
        double oracle = 0.0;
        for (int s = 0; s < 2; ++s) {
            const int t = 1 - s;
            auto log_f = [&](double beta, double log_tau) {
                const double tau = std::exp(log_tau);
                double v = 0.0;
                for (int i = 0; i < 3; ++i) v += log_normal_pdf(y(i, s) - beta * y(i, t), tau);
                v += log_normal_pdf(beta, tau * eta);
                v += ss.a1 * std::log(ss.a2) - std::lgamma(ss.a1) - (ss.a1 + 1) * log_tau - ss.a2 / tau;
                return v + log_tau; // Jacobian of tau = exp(u)
            };
            const double ref = log_f(0.0, 0.0);
            const double beta_sd = std::sqrt(std::max(eta, 1e-3)) * 12;
            const double inner = test::integrate(
                [&](double u) {
                    return test::integrate([&](double b) { return std::exp(log_f(b, u) - ref); }, -beta_sd, beta_sd);
                },
                -12.0, 8.0);
            oracle += std::log(inner) + ref;
        }
        CHECK(std::abs(log_pseudo_marginal(ind, cd, ss) - oracle) < 1e-5);
    }
}

TEST_CASE("pseudo marginal prefers the slab for a predictive column")
{
    SpikeSlabParams ss{0.01 / 3, 1.0, 1.0, 1.0};
    int wins = 0;
    for (int seed = 0; seed < 10; ++seed) {
        Rng rng(100 + seed);
        Matrix om = Matrix::Identity(3, 3);
        om(0, 1) = om(1, 0) = 0.45;
        const ClusterData cd = ClusterData::of(simulate(100, om, rng));
        Eigen::MatrixXi slab = Eigen::MatrixXi::Zero(3, 3);
        slab(0, 1) = slab(1, 0) = 1;
        const Eigen::MatrixXi spike = Eigen::MatrixXi::Zero(3, 3);
        wins += log_pseudo_marginal(spike, cd, ss) < log_pseudo_marginal(slab, cd, ss);
    }
    CHECK(wins == 10);
}

TEST_CASE("pseudo Gibbs matches the two-model Bayes factor (q = 2)")
{
    Rng rng(5);
    Matrix om(2, 2);
    om << 1.0, 0.18, 0.18, 1.0;
    const Matrix y = simulate(50, om, rng);
    const ClusterData cd = ClusterData::of(y);
    Hyperparameters h = pseudo_hyper(2);
    h.spike_slab.eta0 = 0.02;
    const SpikeSlabParams& ss = h.spike_slab;

    // Scalar normal / inverse-gamma marginal of y_0 on y_1 under each indicator.
    auto log_m = [&](double eta) {
        const double xx = cd.scatter(1, 1), xy = cd.scatter(0, 1), yy = cd.scatter(0, 0);
        const double prec = xx + 1 / eta;
        return 0.5 * std::log(1 / (eta * prec)) + std::lgamma(ss.a1 + 25) - std::lgamma(ss.a1) + ss.a1 * std::log(ss.a2) -
               (ss.a1 + 25) * std::log(ss.a2 + 0.5 * (yy - xy * xy / prec));
    };
    const double l1 = std::log(h.alpha_g) + log_m(ss.eta1), l0 = std::log(1 - h.alpha_g) + log_m(ss.eta0);
    const double exact = 1 / (1 + std::exp(l0 - l1));
    INFO("exact P(g = 1 | Y) = " << exact);

    NodeRegression node{Vector::Zero(1), 1.0, {1}};
    double hits = 0.0;
    const int sweeps = 100000;
    for (int it = 0; it < sweeps; ++it) {
        update_node(0, node, cd, h, rng);
        REQUIRE(node.tau > 0);
        REQUIRE(std::isfinite(node.beta(0)));
        hits += node.included[0];
    }
    CHECK(std::abs(hits / sweeps - exact) < 0.02);
}

TEST_CASE("prior regressions and partial correlation")
{
    Hyperparameters h = pseudo_hyper(4);
    h.spike_slab.a1 = 3.0;
    h.spike_slab.a2 = 2.0;
    Rng rng(6);
    std::vector<double> taus, inc;
    for (int i = 0; i < 20000; ++i) {
        const auto nodes = draw_prior_regressions(4, h, rng);
        REQUIRE(nodes.size() == 4);
        for (const auto& nd : nodes) {
            REQUIRE(nd.beta.size() == 3);
            taus.push_back(nd.tau);
            for (auto g : nd.included) inc.push_back(g);
        }
    }
    CHECK(std::abs(test::mean(taus) - 1.0) < 4 * test::std_error(taus));
    CHECK(std::abs(test::mean(inc) - 0.5) < 4 * test::std_error(inc));

    std::vector<NodeRegression> nodes(3, NodeRegression{Vector::Zero(2), 1.0, {0, 0}});
    nodes[0].beta(NodeRegression::slot(0, 2)) = 0.5;
    nodes[2].beta(NodeRegression::slot(2, 0)) = 0.32;
    CHECK(pseudo_partial_correlation(nodes, 0, 2) == doctest::Approx(0.4));
    nodes[2].beta(NodeRegression::slot(2, 0)) = -0.32;
    CHECK(pseudo_partial_correlation(nodes, 0, 2) == 0.0);
    nodes[0].beta(NodeRegression::slot(0, 2)) = -0.5;
    CHECK(pseudo_partial_correlation(nodes, 2, 0) == doctest::Approx(-0.4));

    const Eigen::MatrixXi ind = indicator_matrix(nodes);
    CHECK(ind.rows() == 3);
    CHECK(ind.diagonal().sum() == 0);
}
