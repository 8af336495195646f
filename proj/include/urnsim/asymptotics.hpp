#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "urnsim/equilibria.hpp"

namespace urnsim {

// Fluctuation regime at a strictly stable limit, decided by the smallest
// eigenvalue lambda of -J(F): sqrt(n) Gaussian when lambda > 1/2, the
// sqrt(n/log n) boundary regime at lambda = 1/2 (within 1e-12), and the
// n^lambda almost-sure regime for 0 < lambda < 1/2.
enum class Regime { GaussianSqrtN, GaussianSqrtNOverLogN, PolynomialNLambda };

std::string to_string(Regime r);

Regime regime_for(double lambda);

// Smallest eigenvalue of -J(F) at the zero. At synchronization points (and
// two-group points whose branches share the same f') this is the closed form
// (1-alpha) - (1-alpha-beta) f'(z); otherwise the dense spectrum decides.
// Requires a strictly stable zero.
double clt_exponent(const ModelParams& p, const ZeroPoint& zero);

struct CltPrediction {
    double lambda = 0.0;
    Regime regime = Regime::GaussianSqrtN;
    std::vector<double> sigma; // N*N row-major; empty unless lambda > 1/2
    // At two-group zeros the diagonal one-step variance used for Gamma is an
    // extrapolation of the synchronized-case argument.
    bool sigma_is_heuristic = false;
};

CltPrediction clt_predict(const ModelParams& p, const ZeroPoint& zero);

// Limit covariance Sigma = (-2J - Id)^{-1} Gamma for lambda > 1/2, with
// Gamma the diagonal one-step conditional variance z_h (1-z_h) at the limit.
// The gamma_diag overload substitutes a constant diagonal.
std::vector<double> clt_sigma(const ModelParams& p, const ZeroPoint& zero);
std::vector<double> clt_sigma(const ModelParams& p, const ZeroPoint& zero,
                              double gamma_diag);

struct CltCheckReport {
    double lambda = 0.0;
    Regime regime = Regime::GaussianSqrtN;
    std::vector<double> predicted_cov; // N*N row-major
    std::vector<double> empirical_cov; // N*N row-major
    double max_rel_err_diag = 0.0;
    double max_abs_err = 0.0;
    long qualified = 0;     // replications ending within 0.1 of the zero
    long replications = 0;
    bool insufficient_sample = false; // fewer than R/2 qualified
};

// Monte Carlo check of the Gaussian regime: R replications started at the
// zero, empirical covariance of sqrt(T) (Z_T - z_inf) over the runs that stay
// in the basin, compared entrywise with the predicted Sigma.
CltCheckReport clt_empirical_check(const ModelParams& p, const ZeroPoint& zero,
                                   long T, long R, std::uint64_t base_seed,
                                   int threads = 0);

} // namespace urnsim
