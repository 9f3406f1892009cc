#ifndef PXG_RNG_HPP
#define PXG_RNG_HPP

#include <cstdint>
#include <initializer_list>
#include <span>

#include <boost/random/mersenne_twister.hpp>

#include "pxg/types.hpp"

namespace pxg {

// Tags naming independent substreams derived from a root seed.
enum class Stream : std::uint64_t {
    Sticks = 1,
    Allocation = 2,
    Covariate = 3,
    Graph = 4,
    Node = 5,
    Dic = 6,
    NormConstant = 7,
    Predict = 8,
    Simulate = 9,
    Init = 10,
    Test = 99,
};

/// splitmix64-chained hash of a root seed and a tag sequence.
std::uint64_t derive_seed(std::uint64_t root, std::initializer_list<std::uint64_t> tags);

/// Boost engines and distributions give the same stream on every platform,
/// which the bit-identical trace contract relies on.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Independent stream keyed by (root, stream, a, b, c).
    static Rng substream(std::uint64_t root, Stream s, std::uint64_t a = 0, std::uint64_t b = 0,
                         std::uint64_t c = 0)
    {
        return Rng(derive_seed(root, {static_cast<std::uint64_t>(s), a, b, c}));
    }

    double uniform();
    double normal();
    double normal(double mean, double sd) { return mean + sd * normal(); }
    double gamma(double shape, double rate);
    /// Shape-rate convention: density proportional to x^{-shape-1} exp(-rate/x).
    double inv_gamma(double shape, double rate) { return 1.0 / gamma(shape, rate); }
    double beta(double a, double b);
    double chi_squared(double df) { return gamma(0.5 * df, 0.5); }
    bool bernoulli(double p) { return uniform() < p; }
    int uniform_int(int lo, int hi);
    /// Index drawn with probability proportional to exp(log_weights).
    int categorical_log(std::span<const double> log_weights);
    Vector normal_vector(int n);

    boost::random::mt19937_64& engine() { return engine_; }

private:
    boost::random::mt19937_64 engine_;
};

} // namespace pxg

#endif
