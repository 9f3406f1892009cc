#ifndef PXG_TEST_UTIL_HPP
#define PXG_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "pxg/rng.hpp"
#include "pxg/types.hpp"

namespace pxg::test {

inline Matrix random_spd(int q, Rng& rng, double ridge = 0.5)
{
    Matrix a(q, q);
    for (int i = 0; i < q; ++i)
        for (int j = 0; j < q; ++j) a(i, j) = rng.normal();
    Matrix m = a * a.transpose() / q + ridge * Matrix::Identity(q, q);
    return 0.5 * (m + m.transpose());
}

inline Graph random_graph(int q, double prob, Rng& rng)
{
    Graph g(q);
    for (int s = 0; s < q; ++s)
        for (int t = s + 1; t < q; ++t)
            if (rng.bernoulli(prob)) g.set_edge(s, t, true);
    return g;
}

inline double mean(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double stddev(const std::vector<double>& v)
{
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
}

inline double std_error(const std::vector<double>& v)
{
    return stddev(v) / std::sqrt(static_cast<double>(v.size()));
}

// Kolmogorov distribution tail P(K > lambda).
inline double kolmogorov_tail(double lambda)
{
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

struct KsResult {
    double distance = 0.0;
    double p_value = 1.0;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b)
{
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(i / na - j / nb));
    }
    const double ne = std::sqrt(na * nb / (na + nb));
    return {d, kolmogorov_tail((ne + 0.12 + 0.11 / ne) * d)};
}

// sup |F_n - F| for a sample against a CDF evaluated exactly at the sample points.
inline double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf)
{
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, std::abs((i + 1) / n - f), std::abs(i / n - f)});
    }
    return d;
}

template <class F>
double integrate(F f, double a, double b, double tol = 1e-12)
{
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, tol);
}

} // namespace pxg::test

#endif
