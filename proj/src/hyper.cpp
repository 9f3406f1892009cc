#include "pxg/hyper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pxg {

double default_edge_prior(int q)
{
    return q <= 10 ? 0.5 : 2.0 / static_cast<double>(q - 1);
}

void GWishartParams::validate() const
{
    if (!(b > 2.0)) throw InvalidArgument("G-Wishart degrees of freedom b must exceed 2");
    if (D.rows() != D.cols() || D.rows() == 0) throw InvalidArgument("G-Wishart scale D must be square");
    if ((D - D.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, D.cwiseAbs().maxCoeff()))
        throw InvalidArgument("G-Wishart scale D must be symmetric");
    if (failing_leading_minor(D) != 0) throw InvalidArgument("G-Wishart scale D must be positive definite");
}

void Hyperparameters::validate(int q, int p) const
{
    if (!(alpha > 0.0)) throw InvalidArgument("alpha must be positive");
    if (!(alpha_g >= 0.0 && alpha_g <= 1.0)) throw InvalidArgument("alpha_G must lie in [0, 1]");
    gwishart.validate();
    if (gwishart.D.rows() != q) throw InvalidArgument("G-Wishart scale D must be q x q");
    const SpikeSlabParams& ss = spike_slab;
    if (!(ss.eta0 > 0.0) || !(ss.eta1 > 0.0)) throw InvalidArgument("eta0 and eta1 must be positive");
    if (ss.eta1 / ss.eta0 < 100.0) {
        std::ostringstream os;
        os << "eta1 / eta0 = " << ss.eta1 / ss.eta0 << " but the slab must dominate the spike (ratio >= 100)";
        throw InvalidArgument(os.str());
    }
    if (!(ss.a1 > 0.0) || !(ss.a2 > 0.0)) throw InvalidArgument("a1 and a2 must be positive");
    if (covariate.mu0.size() != p) throw InvalidArgument("mu0 must have length p");
    if (!covariate.mu0.allFinite()) throw InvalidArgument("mu0 must be finite");
    if (!(covariate.sigma0sq > 0.0)) throw InvalidArgument("sigma0sq must be positive");
    if (!(covariate.b1 > 0.0) || !(covariate.b2 > 0.0)) throw InvalidArgument("b1 and b2 must be positive");
    if (K < 2) throw InvalidArgument("truncation level K must be at least 2");
}

Hyperparameters Hyperparameters::defaults(const Dataset& data)
{
    Hyperparameters h;
    const int q = data.q();
    h.alpha = 1.0;
    h.alpha_g = default_edge_prior(q);
    h.gwishart.b = 3.0;
    h.gwishart.D = Matrix::Identity(q, q);
    h.spike_slab.eta1 = 1.0;
    h.spike_slab.eta0 = 0.01 * h.spike_slab.eta1 / static_cast<double>(q);
    h.spike_slab.a1 = 1.0;
    h.spike_slab.a2 = 1.0;
    h.covariate.mu0 = data.X().colwise().mean().transpose();
    h.covariate.sigma0sq = 1.0;
    h.covariate.b1 = 2.0;
    h.covariate.b2 = 1.0;
    h.K = std::max(2, std::min(data.n(), 20));
    return h;
}

} // namespace pxg
