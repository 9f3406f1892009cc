#include "pxg/simgen.hpp"

#include <cmath>
#include <sstream>

#include "pxg/gwishart.hpp"
#include "pxg/rng.hpp"

namespace pxg {

namespace {

constexpr double kBreakLow = -0.33;
constexpr double kBreakHigh = 0.33;

PrecisionTruth truth_of(const Matrix& omega)
{
    PrecisionMatrix pm(omega);
    Graph g = pm.support();
    return {std::move(pm), std::move(g)};
}

} // namespace

Vector sample_response(const PrecisionMatrix& omega, Rng& rng)
{
    const Vector z = rng.normal_vector(omega.size());
    return omega.cholesky().transpose().triangularView<Eigen::Upper>().solve(z);
}

int example1_region(double x)
{
    if (!(x > -1.0 && x < 1.0)) {
        std::ostringstream os;
        os << "example 1 covariate must lie in (-1, 1), got " << x;
        throw InvalidArgument(os.str());
    }
    if (x < kBreakLow) return 0;
    if (x < kBreakHigh) return 1;
    return 2;
}

PrecisionTruth example1_precision(double x)
{
    Matrix omega = Matrix::Identity(3, 3) * 1.2;
    double w12 = 0.0, w13 = 0.0, w23 = 0.0;
    switch (example1_region(x)) {
    case 0:
        w13 = -0.75 * x + 0.25;
        w23 = 0.75 * x + 1.25;
        break;
    case 1:
        w12 = 0.75 * x + 0.75;
        w23 = -0.75 * x + 0.75;
        break;
    default:
        w12 = -0.75 * x + 1.25;
        w13 = 0.75 * x + 0.25;
        break;
    }
    omega(0, 1) = omega(1, 0) = w12;
    omega(0, 2) = omega(2, 0) = w13;
    omega(1, 2) = omega(2, 1) = w23;
    return truth_of(omega);
}

PrecisionTruth example2_precision(double x)
{
    if (!(x > -0.8 && x < 0.8) || x == 0.0) {
        std::ostringstream os;
        os << "example 2 covariate must lie in (-0.8, 0) U (0, 0.8), got " << x;
        throw InvalidArgument(os.str());
    }
    Matrix omega = Matrix::Identity(5, 5) * 1.4;
    for (int s = 0; s < 4; ++s) omega(s, s + 1) = omega(s + 1, s) = x;
    return truth_of(omega);
}

Example3Truth example3_truth(int q, int p, double sparsity, double df, std::uint64_t seed)
{
    if (q < 2 || p < 1) throw InvalidArgument("example 3 needs q >= 2 and p >= 1");
    if (!(sparsity >= 0.0 && sparsity < 1.0)) throw InvalidArgument("example 3 sparsity must lie in [0, 1)");
    if (!(df > 2.0)) throw InvalidArgument("example 3 degrees of freedom must exceed 2");
    Rng rng = Rng::substream(seed, Stream::Simulate, 3, 0);
    GWishartParams params{df, Matrix::Identity(q, q)};
    Example3Truth out;
    for (int k = 0; k < 2; ++k) {
        Graph g(q);
        for (int s = 0; s < q; ++s)
            for (int t = s + 1; t < q; ++t)
                if (rng.bernoulli(sparsity)) g.set_edge(s, t, true);
        out.omegas.push_back(sample_gwishart(g, params, rng));
        out.graphs.push_back(std::move(g));
        out.covariate_means.push_back(Vector::Constant(p, 2.0 * k));
    }
    return out;
}

SimulatedData generate(const SimulationSpec& spec, std::uint64_t seed)
{
    if (spec.n_per < 1) throw InvalidArgument("simulation needs at least one observation per region");
    Rng rng = Rng::substream(seed, Stream::Simulate, static_cast<std::uint64_t>(spec.example), 1);
    SimulatedData out;
    std::vector<Vector> ys;
    std::vector<Vector> xs;

    switch (spec.example) {
    case 1: {
        const double lo[3] = {-1.0, kBreakLow, kBreakHigh};
        const double hi[3] = {kBreakLow, kBreakHigh, 1.0};
        for (int r = 0; r < 3; ++r) out.region_graphs.push_back(example1_precision(0.5 * (lo[r] + hi[r])).graph);
        for (int r = 0; r < 3; ++r)
            for (int i = 0; i < spec.n_per; ++i) {
                double x;
                do {
                    x = lo[r] + (hi[r] - lo[r]) * rng.uniform();
                } while (!(x > -1.0) || example1_region(x) != r);
                PrecisionTruth t = example1_precision(x);
                ys.push_back(sample_response(t.omega, rng));
                xs.push_back(Vector::Constant(1, x));
                out.labels.push_back(r);
                out.omega.push_back(std::move(t.omega));
            }
        break;
    }
    case 2: {
        for (int i = 0; i < spec.n_per; ++i) {
            double x;
            do {
                x = -0.8 + 1.6 * rng.uniform();
            } while (x == 0.0 || !(x > -0.8));
            PrecisionTruth t = example2_precision(x);
            ys.push_back(sample_response(t.omega, rng));
            xs.push_back(Vector::Constant(1, x));
            out.labels.push_back(0);
            out.omega.push_back(std::move(t.omega));
        }
        out.region_graphs.push_back(example2_precision(0.4).graph);
        break;
    }
    case 3: {
        Example3Truth truth = example3_truth(spec.q, spec.p, spec.sparsity, spec.df, seed);
        for (int k = 0; k < 2; ++k)
            for (int i = 0; i < spec.n_per; ++i) {
                ys.push_back(sample_response(truth.omegas[k], rng));
                xs.push_back(truth.covariate_means[k] + rng.normal_vector(spec.p));
                out.labels.push_back(k);
                out.omega.push_back(truth.omegas[k]);
            }
        out.region_graphs = truth.graphs;
        break;
    }
    default:
        throw InvalidArgument("unknown simulation example (expected 1, 2 or 3)");
    }

    const int n = static_cast<int>(ys.size());
    Matrix Y(n, ys.front().size());
    Matrix X(n, xs.front().size());
    for (int i = 0; i < n; ++i) {
        Y.row(i) = ys[i].transpose();
        X.row(i) = xs[i].transpose();
    }
    out.data = Dataset(std::move(Y), std::move(X));
    return out;
}

} // namespace pxg
