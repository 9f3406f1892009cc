#ifndef PXG_SIMGEN_HPP
#define PXG_SIMGEN_HPP

#include <cstdint>
#include <vector>

#include "pxg/rng.hpp"
#include "pxg/types.hpp"

namespace pxg {

struct PrecisionTruth {
    PrecisionMatrix omega;
    Graph graph;
};

/// Piecewise-linear 3-node design; x in (-1, 1) with breakpoints -0.33 and 0.33.
PrecisionTruth example1_precision(double x);
/// 0-based region of x in the piecewise-linear design.
int example1_region(double x);

/// 5-node chain with diagonal 1.4 and off-diagonal x; x in (-0.8, 0) U (0, 0.8).
PrecisionTruth example2_precision(double x);

/// One draw of y ~ N_q(0, Omega^{-1}) through the Cholesky factor of Omega.
Vector sample_response(const PrecisionMatrix& omega, Rng& rng);

struct Example3Truth {
    std::vector<Graph> graphs;
    std::vector<PrecisionMatrix> omegas;
    std::vector<Vector> covariate_means;
};

/// Two random graphs with edge probability `sparsity`, G-Wishart(df, I)
/// precision matrices, covariate means 0 and 2.
Example3Truth example3_truth(int q, int p, double sparsity, double df, std::uint64_t seed);

struct SimulationSpec {
    int example = 1;
    int n_per = 100; // per region (example 1), total (example 2), per cluster (example 3)
    int q = 50;
    int p = 10;
    double sparsity = 0.01;
    double df = 3.0;
};

struct SimulatedData {
    Dataset data;
    std::vector<int> labels;                 // 0-based true region / cluster
    std::vector<PrecisionMatrix> omega;      // per observation
    std::vector<Graph> region_graphs;        // examples 1 and 3
};

SimulatedData generate(const SimulationSpec& spec, std::uint64_t seed);

} // namespace pxg

#endif
