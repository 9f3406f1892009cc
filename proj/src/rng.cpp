#include "pxg/rng.hpp"

#include <cmath>
#include <limits>

#include <boost/random/beta_distribution.hpp>
#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

#include "pxg/density.hpp"

namespace pxg {

namespace {

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags)
{
    std::uint64_t h = splitmix64(root);
    for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
    return h;
}

double Rng::uniform()
{
    boost::random::uniform_01<double> u;
    return u(engine_);
}

double Rng::normal()
{
    boost::random::normal_distribution<double> n(0.0, 1.0);
    return n(engine_);
}

double Rng::gamma(double shape, double rate)
{
    boost::random::gamma_distribution<double> g(shape, 1.0 / rate);
    return g(engine_);
}

double Rng::beta(double a, double b)
{
    boost::random::beta_distribution<double> d(a, b);
    return d(engine_);
}

int Rng::uniform_int(int lo, int hi)
{
    boost::random::uniform_int_distribution<int> d(lo, hi);
    return d(engine_);
}

int Rng::categorical_log(std::span<const double> log_weights)
{
    const double lse = log_sum_exp(log_weights);
    if (!std::isfinite(lse)) throw NumericalError("categorical draw with no finite log-weight");
    const double u = uniform();
    double cum = 0.0;
    int last_positive = -1;
    for (std::size_t k = 0; k < log_weights.size(); ++k) {
        const double w = std::exp(log_weights[k] - lse);
        if (w > 0.0) last_positive = static_cast<int>(k);
        cum += w;
        if (u < cum) return static_cast<int>(k);
    }
    return last_positive;
}

Vector Rng::normal_vector(int n)
{
    Vector v(n);
    for (int i = 0; i < n; ++i) v(i) = normal();
    return v;
}

} // namespace pxg
