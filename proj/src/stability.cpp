#include "urnsim/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "urnsim/linalg.hpp"

namespace urnsim {

namespace {
constexpr double kEqualTol = 1e-12;
constexpr double kClassifyEps = 1e-9;
} // namespace

std::string to_string(Stability s) {
    switch (s) {
        case Stability::StrictlyStable: return "strictly-stable";
        case Stability::Stable: return "stable";
        case Stability::LinearlyUnstable: return "linearly-unstable";
        case Stability::Repulsive: return "repulsive";
    }
    return "?";
}

std::vector<double> JacobianSpec::dense() const {
    const int m = n();
    std::vector<double> a(static_cast<std::size_t>(m) * m, alpha_over_n);
    for (int i = 0; i < m; ++i) a[i * m + i] += d[i];
    return a;
}

JacobianSpec jacobian(const ModelParams& p, const std::vector<double>& z) {
    if (static_cast<int>(z.size()) != p.n_agents)
        throw std::invalid_argument("jacobian: z length must equal N");
    JacobianSpec spec;
    spec.alpha_over_n = p.alpha / p.n_agents;
    spec.d.reserve(z.size());
    for (double v : z) spec.d.push_back(p.weight() * p.f.deriv(v) - 1.0);
    return spec;
}

std::pair<double, double> eigen_sync(const JacobianSpec& spec) {
    const double d0 = spec.d.at(0);
    for (double di : spec.d)
        if (std::abs(di - d0) > kEqualTol)
            throw std::invalid_argument("eigen_sync: diagonal entries differ");
    return {d0, d0 + spec.alpha_over_n * spec.n()};
}

std::vector<double> eigen_two_group(double c2, double d1, int n1, double d2, int n2) {
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("eigen_two_group: group counts must be >= 1");
    if (std::abs(d1 - d2) <= kEqualTol)
        throw std::invalid_argument("eigen_two_group: needs two distinct d-values");
    const int n = n1 + n2;
    std::vector<double> eig;
    eig.reserve(n);
    for (int i = 0; i < n1 - 1; ++i) eig.push_back(d1);
    for (int i = 0; i < n2 - 1; ++i) eig.push_back(d2);
    const double b = d1 + d2 + c2 * n;
    const double c = d1 * d2 + c2 * n1 * d2 + c2 * n2 * d1;
    const double disc = std::sqrt(std::max(0.0, b * b - 4.0 * c));
    eig.push_back(0.5 * (b - disc));
    eig.push_back(0.5 * (b + disc));
    std::sort(eig.begin(), eig.end());
    return eig;
}

std::vector<double> eigen_two_group(const JacobianSpec& spec) {
    const double d1 = spec.d.at(0);
    double d2 = d1;
    int n1 = 0, n2 = 0;
    bool have_second = false;
    for (double di : spec.d) {
        if (std::abs(di - d1) <= kEqualTol) {
            ++n1;
        } else if (!have_second || std::abs(di - d2) <= kEqualTol) {
            d2 = have_second ? d2 : di;
            have_second = true;
            ++n2;
        } else {
            throw std::invalid_argument("eigen_two_group: more than two distinct d-values");
        }
    }
    if (!have_second)
        throw std::invalid_argument("eigen_two_group: needs two distinct d-values");
    return eigen_two_group(spec.alpha_over_n, d1, n1, d2, n2);
}

std::vector<double> eigen_general(const JacobianSpec& spec) {
    return jacobi_eigenvalues(spec.dense(), spec.n());
}

std::vector<double> spectrum_at(const ModelParams& p, const std::vector<double>& z) {
    const JacobianSpec spec = jacobian(p, z);
    std::vector<double> distinct;
    for (double di : spec.d) {
        bool found = false;
        for (double v : distinct) found = found || std::abs(di - v) <= kEqualTol;
        if (!found) distinct.push_back(di);
    }
    if (distinct.size() == 1) {
        auto [l1, l2] = eigen_sync(spec);
        std::vector<double> eig(spec.n() - 1, l1);
        eig.push_back(l2);
        std::sort(eig.begin(), eig.end());
        return eig;
    }
    if (distinct.size() == 2) return eigen_two_group(spec);
    return eigen_general(spec);
}

Stability classify(const std::vector<double>& spectrum) {
    if (spectrum.empty())
        throw std::invalid_argument("classify: empty spectrum");
    bool all_strict_neg = true, all_nonpos = true;
    for (double l : spectrum) {
        all_strict_neg = all_strict_neg && l < -kClassifyEps;
        all_nonpos = all_nonpos && l <= kClassifyEps;
    }
    if (all_strict_neg) return Stability::StrictlyStable;
    if (all_nonpos) return Stability::Stable;
    return Stability::LinearlyUnstable;
}

double charpoly_relative_residual(const JacobianSpec& spec, double lambda) {
    // p(lambda) = prod(d_i - lambda) + c^2 sum_i prod_{j != i} (d_j - lambda)
    const int n = spec.n();
    double prod = 1.0;
    for (double di : spec.d) prod *= di - lambda;
    double sum = 0.0, scale = std::abs(prod);
    for (int i = 0; i < n; ++i) {
        double partial = 1.0;
        for (int j = 0; j < n; ++j)
            if (j != i) partial *= spec.d[j] - lambda;
        sum += partial;
        scale += std::abs(spec.alpha_over_n * partial);
    }
    const double value = prod + spec.alpha_over_n * sum;
    return std::abs(value) / std::max(scale, 1e-300);
}

} // namespace urnsim
