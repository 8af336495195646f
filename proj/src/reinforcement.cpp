#include "urnsim/reinforcement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace urnsim {

namespace {

constexpr double kDomainTol = 1e-12;
constexpr double kTangencyTol = 1e-12;
constexpr double kLevelResidualTol = 1e-10;

// log(1 + exp(u)) without overflow.
double softplus(double u) {
    if (u > 0.0) return u + std::log1p(std::exp(-u));
    return std::log1p(std::exp(u));
}

double poly_eval(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
    return acc;
}

double poly_deriv(const std::vector<double>& c, double x) {
    double acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;)
        acc = acc * x + static_cast<double>(k) * c[k];
    return acc;
}

} // namespace

std::string to_string(FunctionKind k) {
    switch (k) {
        case FunctionKind::LP: return "lp";
        case FunctionKind::LogP: return "logp";
        case FunctionKind::Tech: return "tech";
        case FunctionKind::Polynomial: return "poly";
    }
    return "?";
}

double clamp_unit(double x) {
    if (x < -kDomainTol || x > 1.0 + kDomainTol)
        throw std::domain_error("argument outside [0,1]");
    return std::min(1.0, std::max(0.0, x));
}

ReinforcementFunction::ReinforcementFunction(FunctionKind kind, double theta,
                                             double xstar,
                                             std::vector<double> coeffs)
    : kind_(kind), theta_(theta), xstar_(xstar), coeffs_(std::move(coeffs)) {}

ReinforcementFunction ReinforcementFunction::lp(double theta, double xstar) {
    if (!(theta > 0.0))
        throw std::invalid_argument("lp: theta must be positive");
    const double tx = theta * xstar;
    if (!(tx > 0.0 && tx <= 1.0))
        throw std::invalid_argument("lp: theta*xstar must lie in (0,1]");
    if (!(tx >= 1.0 - theta))
        throw std::invalid_argument("lp: theta*xstar must be >= 1-theta");
    return ReinforcementFunction(FunctionKind::LP, theta, xstar, {});
}

ReinforcementFunction ReinforcementFunction::logp(double theta, double xstar) {
    if (!(theta > 0.0))
        throw std::invalid_argument("logp: theta must be positive");
    if (!(xstar > 0.0 && xstar < 1.0))
        throw std::invalid_argument("logp: xstar must lie in (0,1)");
    return ReinforcementFunction(FunctionKind::LogP, theta, xstar, {});
}

ReinforcementFunction ReinforcementFunction::tech(double theta) {
    if (!(theta > 0.5 && theta < 1.0))
        throw std::invalid_argument("tech: theta must lie in (1/2,1)");
    return ReinforcementFunction(FunctionKind::Tech, theta, 0.5, {});
}

ReinforcementFunction ReinforcementFunction::polynomial(std::vector<double> c) {
    if (c.empty())
        throw std::invalid_argument("polynomial: empty coefficient list");
    // Validate range and strict monotonicity on a dense grid; the analytic
    // conditions depend on the coefficients, so this check is numerical.
    const int n = 10000;
    for (int i = 0; i <= n; ++i) {
        const double x = static_cast<double>(i) / n;
        const double fx = poly_eval(c, x);
        if (fx < -kDomainTol || fx > 1.0 + kDomainTol)
            throw std::invalid_argument("polynomial: f must map [0,1] into [0,1]");
        if (i > 0 && i < n && !(poly_deriv(c, x) > 0.0))
            throw std::invalid_argument("polynomial: f' must be positive on (0,1)");
    }
    return ReinforcementFunction(FunctionKind::Polynomial, 0.0, 0.0, std::move(c));
}

double ReinforcementFunction::eval(double x) const {
    x = clamp_unit(x);
    switch (kind_) {
        case FunctionKind::LP:
            return x / (theta_ * (x + xstar_));
        case FunctionKind::LogP: {
            // Branch on the sign of the exponent so large theta never overflows.
            const double u = theta_ * (x - xstar_);
            if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
            const double e = std::exp(u);
            return e / (1.0 + e);
        }
        case FunctionKind::Tech:
            return (1.0 - theta_) + (2.0 * theta_ - 1.0) * (3.0 * x * x - 2.0 * x * x * x);
        case FunctionKind::Polynomial:
            return poly_eval(coeffs_, x);
    }
    return 0.0;
}

double ReinforcementFunction::deriv(double x) const {
    x = clamp_unit(x);
    switch (kind_) {
        case FunctionKind::LP: {
            const double s = x + xstar_;
            return xstar_ / (theta_ * s * s);
        }
        case FunctionKind::LogP: {
            // f'(x) = theta e^{-u}/(1+e^{-u})^2 is even in u = theta(x-x*).
            const double t = std::exp(-theta_ * std::abs(x - xstar_));
            const double d = 1.0 + t;
            return theta_ * t / (d * d);
        }
        case FunctionKind::Tech:
            return 6.0 * (2.0 * theta_ - 1.0) * x * (1.0 - x);
        case FunctionKind::Polynomial:
            return poly_deriv(coeffs_, x);
    }
    return 0.0;
}

double ReinforcementFunction::primitive(double x) const {
    x = clamp_unit(x);
    switch (kind_) {
        case FunctionKind::LP:
            // (1/theta)[x - x* ln(x+x*)], shifted so the value at 0 vanishes.
            return (x - xstar_ * std::log1p(x / xstar_)) / theta_;
        case FunctionKind::LogP: {
            const double u = theta_ * (x - xstar_);
            return x + (softplus(-u) - softplus(theta_ * xstar_)) / theta_;
        }
        case FunctionKind::Tech:
            return (1.0 - theta_) * x +
                   (2.0 * theta_ - 1.0) * (1.0 - 0.5 * x) * x * x * x;
        case FunctionKind::Polynomial: {
            double acc = 0.0;
            for (std::size_t k = coeffs_.size(); k-- > 0;)
                acc = acc * x + coeffs_[k] / static_cast<double>(k + 1);
            return acc * x;
        }
    }
    return 0.0;
}

double ReinforcementFunction::max_deriv() const {
    switch (kind_) {
        case FunctionKind::LP:
            return 1.0 / (theta_ * xstar_); // f' is strictly decreasing
        case FunctionKind::LogP:
            return 0.25 * theta_;
        case FunctionKind::Tech:
            return 3.0 * theta_ - 1.5;
        case FunctionKind::Polynomial: {
            const int n = 10000;
            double best = 0.0;
            int arg = 0;
            for (int i = 0; i <= n; ++i) {
                const double d = poly_deriv(coeffs_, static_cast<double>(i) / n);
                if (d > best) { best = d; arg = i; }
            }
            // Ternary refinement on the bracketing cells.
            double lo = std::max(0.0, (arg - 1.0) / n), hi = std::min(1.0, (arg + 1.0) / n);
            for (int it = 0; it < 200; ++it) {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (poly_deriv(coeffs_, m1) < poly_deriv(coeffs_, m2)) lo = m1; else hi = m2;
            }
            return poly_deriv(coeffs_, 0.5 * (lo + hi));
        }
    }
    return 0.0;
}

double ReinforcementFunction::argmax_deriv() const {
    switch (kind_) {
        case FunctionKind::LP: return 0.0;
        case FunctionKind::LogP: return xstar_;
        case FunctionKind::Tech: return 0.5;
        case FunctionKind::Polynomial: {
            const int n = 10000;
            double best = -1.0, arg = 0.0;
            for (int i = 0; i <= n; ++i) {
                const double x = static_cast<double>(i) / n;
                const double d = poly_deriv(coeffs_, x);
                if (d > best) { best = d; arg = x; }
            }
            double lo = std::max(0.0, arg - 1.0 / n), hi = std::min(1.0, arg + 1.0 / n);
            for (int it = 0; it < 200; ++it) {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (poly_deriv(coeffs_, m1) < poly_deriv(coeffs_, m2)) lo = m1; else hi = m2;
            }
            return 0.5 * (lo + hi);
        }
    }
    return 0.0;
}

std::vector<double> ReinforcementFunction::deriv_level_points(double delta) const {
    if (!(delta > 0.0))
        throw std::invalid_argument("deriv_level_points: delta must be positive");

    std::vector<double> candidates;
    const double peak = max_deriv();
    if (std::abs(peak - delta) <= kTangencyTol) {
        // Degenerate tangency: report the single touching point.
        candidates.push_back(argmax_deriv());
    } else if (delta < peak) {
        switch (kind_) {
            case FunctionKind::LP:
                candidates.push_back(std::sqrt(xstar_ / (theta_ * delta)) - xstar_);
                break;
            case FunctionKind::LogP: {
                // With y = e^{-theta(x-x*)}: p y^2 + (2p-1) y + p = 0, p = delta/theta.
                const double p = delta / theta_;
                const double disc = 1.0 - 4.0 * p;
                if (disc > 0.0) {
                    const double root = std::sqrt(disc);
                    for (double y : {((1.0 - 2.0 * p) + root) / (2.0 * p),
                                     ((1.0 - 2.0 * p) - root) / (2.0 * p)})
                        if (y > 0.0) candidates.push_back(xstar_ - std::log(y) / theta_);
                }
                break;
            }
            case FunctionKind::Tech: {
                const double k = delta / (6.0 * (2.0 * theta_ - 1.0));
                const double disc = 1.0 - 4.0 * k;
                if (disc > 0.0) {
                    const double root = std::sqrt(disc);
                    candidates.push_back(0.5 * (1.0 - root));
                    candidates.push_back(0.5 * (1.0 + root));
                }
                break;
            }
            case FunctionKind::Polynomial: {
                // Sign-change scan of f' - delta, refined by bisection.
                const int n = 10000;
                double prev = poly_deriv(coeffs_, 0.0) - delta;
                for (int i = 1; i <= n; ++i) {
                    const double x = static_cast<double>(i) / n;
                    const double cur = poly_deriv(coeffs_, x) - delta;
                    if (prev == 0.0) candidates.push_back((i - 1.0) / n);
                    else if (prev * cur < 0.0) {
                        double lo = (i - 1.0) / n, hi = x;
                        for (int it = 0; it < 100; ++it) {
                            const double mid = 0.5 * (lo + hi);
                            if ((poly_deriv(coeffs_, mid) - delta) * prev > 0.0) lo = mid;
                            else hi = mid;
                        }
                        candidates.push_back(0.5 * (lo + hi));
                    }
                    prev = cur;
                }
                if (prev == 0.0) candidates.push_back(1.0);
                break;
            }
        }
    }

    std::vector<double> out;
    for (double x : candidates) {
        if (x < -1e-9 || x > 1.0 + 1e-9) continue;
        x = std::min(1.0, std::max(0.0, x));
        if (std::abs(deriv(x) - delta) <= kLevelResidualTol) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double a, double b) { return std::abs(a - b) < 1e-12; }),
              out.end());
    return out;
}

ReinforcementFunction ReinforcementFunction::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw std::invalid_argument("reinforcement function: expected object with string \"kind\"");
    const std::string kind = j.at("kind").get<std::string>();

    auto need_number = [&](const char* key) {
        if (!j.contains(key) || !j.at(key).is_number())
            throw std::invalid_argument(std::string("reinforcement function: missing numeric \"") + key + "\"");
        return j.at(key).get<double>();
    };
    auto reject_extra = [&](std::initializer_list<const char*> allowed) {
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool ok = false;
            for (const char* a : allowed) ok = ok || it.key() == a;
            if (!ok)
                throw std::invalid_argument("reinforcement function: unknown key \"" + it.key() + "\"");
        }
    };

    if (kind == "lp") {
        reject_extra({"kind", "theta", "xstar"});
        return lp(need_number("theta"), need_number("xstar"));
    }
    if (kind == "logp") {
        reject_extra({"kind", "theta", "xstar"});
        return logp(need_number("theta"), need_number("xstar"));
    }
    if (kind == "tech") {
        reject_extra({"kind", "theta"});
        return tech(need_number("theta"));
    }
    if (kind == "poly") {
        reject_extra({"kind", "coeffs"});
        if (!j.contains("coeffs") || !j.at("coeffs").is_array())
            throw std::invalid_argument("reinforcement function: poly requires \"coeffs\" array");
        return polynomial(j.at("coeffs").get<std::vector<double>>());
    }
    throw std::invalid_argument("reinforcement function: unknown kind \"" + kind + "\"");
}

nlohmann::json ReinforcementFunction::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind_);
    switch (kind_) {
        case FunctionKind::LP:
        case FunctionKind::LogP:
            j["theta"] = theta_;
            j["xstar"] = xstar_;
            break;
        case FunctionKind::Tech:
            j["theta"] = theta_;
            break;
        case FunctionKind::Polynomial:
            j["coeffs"] = coeffs_;
            break;
    }
    return j;
}

} // namespace urnsim
