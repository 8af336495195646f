#include "urnsim/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urnsim/linalg.hpp"

namespace urnsim {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::GaussianSqrtN: return "gaussian-sqrt-n";
        case Regime::GaussianSqrtNOverLogN: return "gaussian-sqrt-n-over-log-n";
        case Regime::PolynomialNLambda: return "polynomial-n-lambda";
    }
    return "?";
}

Regime regime_for(double lambda) {
    if (!(lambda > 0.0))
        throw std::invalid_argument("regime_for: lambda must be positive");
    if (std::abs(lambda - 0.5) <= 1e-12) return Regime::GaussianSqrtNOverLogN;
    return lambda > 0.5 ? Regime::GaussianSqrtN : Regime::PolynomialNLambda;
}

double clt_exponent(const ModelParams& p, const ZeroPoint& zero) {
    if (classify(zero.spectrum) != Stability::StrictlyStable)
        throw std::invalid_argument("clt_exponent: zero must be strictly stable");

    const double w = p.weight();
    if (zero.groups.size() == 1)
        return (1.0 - p.alpha) - w * p.f.deriv(zero.groups[0].value);
    if (zero.groups.size() == 2) {
        const double d1 = p.f.deriv(zero.groups[0].value);
        const double d2 = p.f.deriv(zero.groups[1].value);
        if (std::abs(d1 - d2) <= 1e-12) return (1.0 - p.alpha) - w * d1;
    }
    const std::vector<double> eig = eigen_general(jacobian(p, zero.expand()));
    return -eig.back(); // smallest eigenvalue of -J is minus the largest of J
}

CltPrediction clt_predict(const ModelParams& p, const ZeroPoint& zero) {
    CltPrediction out;
    out.lambda = clt_exponent(p, zero);
    out.regime = regime_for(out.lambda);
    if (out.regime == Regime::GaussianSqrtN) {
        out.sigma = clt_sigma(p, zero);
        out.sigma_is_heuristic = zero.groups.size() > 1;
    }
    return out;
}

namespace {

std::vector<double> solve_sigma(const ModelParams& p, const ZeroPoint& zero,
                                const std::vector<double>& gamma_diag) {
    const int n = p.n_agents;
    const JacobianSpec spec = jacobian(p, zero.expand());

    // M = -2J - Id, symmetric positive definite when lambda > 1/2.
    std::vector<double> m(static_cast<std::size_t>(n) * n, -2.0 * spec.alpha_over_n);
    for (int i = 0; i < n; ++i) m[i * n + i] += -2.0 * spec.d[i] - 1.0;

    std::vector<double> sigma(static_cast<std::size_t>(n) * n, 0.0);
    for (int col = 0; col < n; ++col) {
        std::vector<double> rhs(n, 0.0), x;
        rhs[col] = gamma_diag[col];
        if (!lu_solve(m, n, rhs, x))
            throw std::runtime_error("clt_sigma: singular -2J - Id");
        for (int row = 0; row < n; ++row) sigma[row * n + col] = x[row];
    }
    return sigma;
}

} // namespace

std::vector<double> clt_sigma(const ModelParams& p, const ZeroPoint& zero) {
    const double lambda = clt_exponent(p, zero);
    if (!(lambda > 0.5))
        throw std::invalid_argument("clt_sigma: requires lambda > 1/2");
    std::vector<double> gamma;
    for (double z : zero.expand()) gamma.push_back(z * (1.0 - z));
    return solve_sigma(p, zero, gamma);
}

std::vector<double> clt_sigma(const ModelParams& p, const ZeroPoint& zero,
                              double gamma_diag) {
    const double lambda = clt_exponent(p, zero);
    if (!(lambda > 0.5))
        throw std::invalid_argument("clt_sigma: requires lambda > 1/2");
    return solve_sigma(p, zero, std::vector<double>(p.n_agents, gamma_diag));
}

CltCheckReport clt_empirical_check(const ModelParams& p, const ZeroPoint& zero,
                                   long T, long R, std::uint64_t base_seed,
                                   int threads) {
    if (zero.kind != ZeroKind::Synchronization)
        throw std::invalid_argument("clt_empirical_check: zero must be a synchronization point");

    CltCheckReport rep;
    rep.lambda = clt_exponent(p, zero);
    rep.regime = regime_for(rep.lambda);
    if (rep.regime != Regime::GaussianSqrtN)
        throw std::invalid_argument("clt_empirical_check: requires lambda > 1/2");
    rep.predicted_cov = clt_sigma(p, zero);
    rep.replications = R;

    const int n = p.n_agents;
    const std::vector<double> target = zero.expand();
    const std::vector<ReplicationReport> runs =
        replicate(p, InitSpec::fixed(target), T, R, base_seed, threads);

    // Scaled deviations of the qualifying runs, in replication order so the
    // reduction result does not depend on thread count.
    const double scale = std::sqrt(static_cast<double>(T));
    std::vector<std::vector<double>> xs;
    for (const auto& r : runs) {
        double dist2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double d = r.terminal.z[i] - target[i];
            dist2 += d * d;
        }
        if (std::sqrt(dist2) > 0.1) continue;
        std::vector<double> x(n);
        for (int i = 0; i < n; ++i) x[i] = scale * (r.terminal.z[i] - target[i]);
        xs.push_back(std::move(x));
    }
    rep.qualified = static_cast<long>(xs.size());
    rep.insufficient_sample = rep.qualified < (R + 1) / 2;

    std::vector<double> mean(n, 0.0);
    for (const auto& x : xs)
        for (int i = 0; i < n; ++i) mean[i] += x[i];
    for (double& m : mean) m /= std::max<long>(1, rep.qualified);

    rep.empirical_cov.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (const auto& x : xs)
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                rep.empirical_cov[i * n + j] += (x[i] - mean[i]) * (x[j] - mean[j]);
    const double denom = std::max<long>(1, rep.qualified - 1);
    for (double& v : rep.empirical_cov) v /= denom;

    for (int i = 0; i < n; ++i) {
        const double pred = rep.predicted_cov[i * n + i];
        rep.max_rel_err_diag = std::max(
            rep.max_rel_err_diag, std::abs(rep.empirical_cov[i * n + i] - pred) / pred);
    }
    for (std::size_t k = 0; k < rep.predicted_cov.size(); ++k)
        rep.max_abs_err = std::max(rep.max_abs_err,
                                   std::abs(rep.empirical_cov[k] - rep.predicted_cov[k]));
    return rep;
}

} // namespace urnsim
