#ifndef PXG_HYPER_HPP
#define PXG_HYPER_HPP

#include "pxg/types.hpp"

namespace pxg {

/// G-Wishart parameters: kernel |Omega|^{(b-2)/2} exp(-tr(D Omega)/2).
struct GWishartParams {
    double b = 3.0;
    Matrix D;

    void validate() const;
};

struct SpikeSlabParams {
    double eta0 = 0.0; // spike variance multiplier
    double eta1 = 1.0; // slab variance multiplier
    double a1 = 1.0;   // inverse-gamma shape for tau
    double a2 = 1.0;   // inverse-gamma rate for tau
};

/// Normal / inverse-gamma auxiliary model for covariates within a cluster:
/// x | mu, s2 ~ N_p(mu, s2 I), mu | s2 ~ N_p(mu0, sigma0sq s2 I), s2 ~ IG(b1, b2).
struct CovariatePrior {
    Vector mu0;
    double sigma0sq = 1.0;
    double b1 = 2.0;
    double b2 = 1.0;
};

struct Hyperparameters {
    double alpha = 1.0;   // cohesion / DP concentration
    double alpha_g = 0.5; // prior edge inclusion probability
    GWishartParams gwishart;
    SpikeSlabParams spike_slab;
    CovariatePrior covariate;
    int K = 20; // truncation level

    /// Throws InvalidArgument on any violated constraint, including eta1/eta0 < 100.
    void validate(int q, int p) const;

    /// Defaults: alpha = 1, b = 3, D = I, alpha_G = 0.5 (q <= 10) else 2/(q-1),
    /// eta1 = 1, eta0 = 0.01 eta1 / q, a1 = a2 = 1, mu0 = colmean(X),
    /// sigma0sq = 1, b1 = 2, b2 = 1, K = min(n, 20).
    static Hyperparameters defaults(const Dataset& data);
};

double default_edge_prior(int q);

} // namespace pxg

#endif
