#include <doctest.h>

#include <limits>

#include "pxg/hyper.hpp"
#include "test_util.hpp"

using namespace pxg;

TEST_CASE("dataset validation")
{
    CHECK_THROWS_AS(Dataset(Matrix::Zero(3, 2), Matrix::Zero(4, 1)), InvalidArgument);
    CHECK_THROWS_AS(Dataset(Matrix::Zero(3, 1), Matrix::Zero(3, 1)), InvalidArgument);
    CHECK_THROWS_AS(Dataset(Matrix::Zero(3, 2), Matrix::Zero(3, 0)), InvalidArgument);
    Matrix y = Matrix::Zero(3, 2);
    y(1, 1) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(Dataset(y, Matrix::Zero(3, 1)), InvalidArgument);

    Matrix good(3, 2);
    good << 1, 2, 3, 4, 5, 9;
    Dataset d(good, Matrix::Ones(3, 1));
    CHECK(d.n() == 3);
    CHECK(d.q() == 2);
    CHECK(d.p() == 1);
    const Dataset c = d.centered();
    CHECK(c.Y().colwise().sum().cwiseAbs().maxCoeff() < 1e-12);
    const Dataset s = d.standardized();
    for (int j = 0; j < 2; ++j) {
        const double var = s.Y().col(j).squaredNorm() / 2.0;
        CHECK(var == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("graph operations")
{
    Graph g(4);
    g.set_edge(0, 2, true);
    g.set_edge(3, 1, true);
    CHECK(g.has_edge(2, 0));
    CHECK(g.has_edge(1, 3));
    CHECK(g.edge_count() == 2);
    CHECK(g.neighbors(0) == std::vector<int>{2});
    CHECK_THROWS_AS(g.set_edge(1, 1, true), InvalidArgument);
    CHECK(Graph::complete(5).edge_count() == 10);
    CHECK(Graph::complete(5).is_complete());

    Eigen::MatrixXi adj = g.adjacency();
    CHECK(Graph::from_adjacency(adj) == g);
    adj(0, 1) = 1;
    CHECK_THROWS_AS(Graph::from_adjacency(adj), InvalidArgument);
    Eigen::MatrixXi diag = Eigen::MatrixXi::Identity(3, 3);
    CHECK_THROWS_AS(Graph::from_adjacency(diag), InvalidArgument);

    Graph h(4);
    h.set_edge(0, 2, true);
    CHECK(h.key() != g.key());
    h.set_edge(1, 3, true);
    CHECK(h.key() == g.key());
}

TEST_CASE("precision matrix invariants")
{
    Matrix m(2, 2);
    m << 2, 1, 1, 2;
    PrecisionMatrix pm(m);
    CHECK(pm.log_det() == doctest::Approx(std::log(3.0)).epsilon(1e-14));
    CHECK((pm.cholesky() * pm.cholesky().transpose() - m).norm() < 1e-14);

    Matrix asym = m;
    asym(0, 1) = 1.1;
    CHECK_THROWS_AS(PrecisionMatrix{asym}, NumericalError);

    Matrix notpd(3, 3);
    notpd << 1, 0, 0, 0, 1, 2, 0, 2, 1;
    try {
        PrecisionMatrix bad(notpd);
        FAIL("expected failure");
    } catch (const NumericalError& e) {
        CHECK(std::string(e.what()).find("leading minor 3") != std::string::npos);
    }
    CHECK(failing_leading_minor(notpd) == 3);
    CHECK(failing_leading_minor(m) == 0);

    Matrix sparse = Matrix::Identity(3, 3);
    sparse(0, 1) = sparse(1, 0) = 0.3;
    sparse(0, 2) = sparse(2, 0) = 5e-9;
    PrecisionMatrix sp(sparse);
    Graph g(3);
    g.set_edge(0, 1, true);
    CHECK(sp.compatible_with(g));
    CHECK(sp.support() == g);
    Graph empty(3);
    CHECK_FALSE(sp.compatible_with(empty));
}

TEST_CASE("allocation")
{
    Allocation z({0, 2, 2, 0, 2}, 4);
    CHECK(z.sizes() == std::vector<int>{2, 0, 3, 0});
    CHECK(z.occupied() == 2);
    const auto m = z.members();
    CHECK(m[2] == std::vector<int>{1, 2, 4});
    CHECK_THROWS_AS(Allocation({0, 4}, 4), InvalidArgument);
    int total = 0;
    for (int s : z.sizes()) total += s;
    CHECK(total == z.size());
}

TEST_CASE("node regression indexing")
{
    CHECK(NodeRegression::other_node(2, 0) == 0);
    CHECK(NodeRegression::other_node(2, 2) == 3);
    for (int s = 0; s < 5; ++s)
        for (int k = 0; k < 4; ++k) CHECK(NodeRegression::slot(s, NodeRegression::other_node(s, k)) == k);
}

TEST_CASE("hyperparameter defaults and validation")
{
    Rng rng(1);
    Matrix x(30, 2);
    for (int i = 0; i < 30; ++i) x.row(i) << rng.normal() + 1.0, rng.normal();
    Dataset d(Matrix::Random(30, 12), x);
    Hyperparameters h = Hyperparameters::defaults(d);
    CHECK(h.alpha == 1.0);
    CHECK(h.gwishart.b == 3.0);
    CHECK(h.alpha_g == doctest::Approx(2.0 / 11.0));
    CHECK(h.spike_slab.eta1 / h.spike_slab.eta0 >= 100.0);
    CHECK(h.K == 20);
    CHECK((h.covariate.mu0 - x.colwise().mean().transpose()).norm() < 1e-14);
    CHECK_NOTHROW(h.validate(12, 2));
    CHECK(default_edge_prior(10) == 0.5);

    Hyperparameters bad = h;
    bad.spike_slab.eta0 = bad.spike_slab.eta1 / 50.0;
    CHECK_THROWS_AS(bad.validate(12, 2), InvalidArgument);
    bad = h;
    bad.gwishart.b = 2.0;
    CHECK_THROWS_AS(bad.validate(12, 2), InvalidArgument);
    bad = h;
    bad.K = 1;
    CHECK_THROWS_AS(bad.validate(12, 2), InvalidArgument);
    bad = h;
    bad.covariate.mu0 = Vector::Zero(3);
    CHECK_THROWS_AS(bad.validate(12, 2), InvalidArgument);

    Dataset small(Matrix::Random(5, 3), Matrix::Random(5, 1));
    CHECK(Hyperparameters::defaults(small).K == 5);
}

TEST_CASE("substreams are deterministic and distinct")
{
    Rng a = Rng::substream(7, Stream::Graph, 1, 2);
    Rng b = Rng::substream(7, Stream::Graph, 1, 2);
    Rng c = Rng::substream(7, Stream::Graph, 1, 3);
    const double va = a.uniform();
    CHECK(va == b.uniform());
    CHECK(va != c.uniform());
    Rng r(3);
    std::vector<double> lw{std::log(0.2), -std::numeric_limits<double>::infinity(), std::log(0.8)};
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < 20000; ++i) ++counts[r.categorical_log(lw)];
    CHECK(counts[1] == 0);
    CHECK(counts[0] / 20000.0 == doctest::Approx(0.2).epsilon(0.1));
    std::vector<double> none{-std::numeric_limits<double>::infinity()};
    CHECK_THROWS_AS(r.categorical_log(none), NumericalError);
}
