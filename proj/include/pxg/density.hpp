#ifndef PXG_DENSITY_HPP
#define PXG_DENSITY_HPP

#include <span>
#include <vector>

#include "pxg/types.hpp"

namespace pxg {

inline constexpr double kLog2Pi = 1.8378770664093454836;

double log_sum_exp(std::span<const double> values);

/// log N_q(y; 0, Omega^{-1}) via the stored Cholesky factor.
double gaussian_loglik(const Vector& y, const PrecisionMatrix& omega);

/// Sum over nodes of log N(y_s; y_{-s}^T beta_s, tau_s).
double pseudo_loglik(const Vector& y, const std::vector<NodeRegression>& regressions);

/// beta_st = -omega_st / omega_ss, tau_s = 1 / omega_ss; indicators mark |omega_st| > 1e-8.
std::vector<NodeRegression> omega_to_regressions(const PrecisionMatrix& omega);

/// sum_j pi_j N_q(y; 0, Omega_j^{-1}), reduced in the log domain.
double mixture_density(const Vector& y, std::span<const double> weights,
                       const std::vector<PrecisionMatrix>& omegas);

/// log N_p(x; mu, sigmasq I).
double log_isotropic_normal(const Vector& x, const Vector& mu, double sigmasq);

/// Partial correlation -omega_st / sqrt(omega_ss omega_tt).
double partial_correlation(const Matrix& omega, int s, int t);

} // namespace pxg

#endif
