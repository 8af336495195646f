#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace urnsim {

enum class FunctionKind { LP, LogP, Tech, Polynomial };

std::string to_string(FunctionKind k);

// Family of reinforcement functions f: [0,1] -> [0,1], strictly increasing.
//
//   LP    f(x) = x / (theta (x + x*)),          theta > 0, theta x* in (0,1], theta x* >= 1-theta
//   LogP  f(x) = 1 / (1 + exp(-theta (x-x*))),  theta > 0, x* in (0,1)
//   Tech  f(x) = (1-theta) + (2theta-1)(3x^2 - 2x^3),  theta in (1/2,1)
//   Polynomial: arbitrary coefficients, checked numerically at construction
//
// Evaluation, derivative and primitive are exact closed forms. The primitive
// is gauged so that primitive(0) == 0.
class ReinforcementFunction {
  public:
    static ReinforcementFunction lp(double theta, double xstar);
    static ReinforcementFunction logp(double theta, double xstar);
    static ReinforcementFunction tech(double theta);
    static ReinforcementFunction polynomial(std::vector<double> coefficients);

    FunctionKind kind() const { return kind_; }
    double theta() const { return theta_; }
    double xstar() const { return xstar_; }
    const std::vector<double>& coefficients() const { return coeffs_; }

    double eval(double x) const;
    double deriv(double x) const;
    double primitive(double x) const;

    // All x in [0,1] with f'(x) = delta, ascending. Empty when max f' < delta;
    // the single tangency point when |max f' - delta| <= 1e-12.
    std::vector<double> deriv_level_points(double delta) const;

    double max_deriv() const;
    double argmax_deriv() const;

    static ReinforcementFunction from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

  private:
    ReinforcementFunction(FunctionKind kind, double theta, double xstar,
                          std::vector<double> coeffs);

    FunctionKind kind_;
    double theta_ = 0.0;
    double xstar_ = 0.0;
    std::vector<double> coeffs_;
};

// Clamps x into [0,1] when within 1e-12 of the interval, throws
// std::domain_error otherwise.
double clamp_unit(double x);

} // namespace urnsim
