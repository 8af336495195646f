#pragma once

#include <string>
#include <vector>

#include "urnsim/dynamics.hpp"

namespace urnsim {

// Jacobian-spectrum classes at a zero of the drift field. The classifier
// applies the rules in this order with margin 1e-9: all < -eps, all <= eps,
// any > eps.
enum class Stability { StrictlyStable, Stable, LinearlyUnstable, Repulsive };

std::string to_string(Stability s);

inline bool is_unstable(Stability s) {
    return s == Stability::LinearlyUnstable || s == Stability::Repulsive;
}

// The Jacobian of the drift field is the rank-one matrix
// (alpha/N) * ones + diag(d), with d_i = (1-alpha-beta) f'(z_i) - 1.
// It is symmetric, so all eigenvalues are real.
struct JacobianSpec {
    double alpha_over_n = 0.0; // the rank-one coefficient c^2
    std::vector<double> d;

    int n() const { return static_cast<int>(d.size()); }
    std::vector<double> dense() const; // row-major materialization
};

JacobianSpec jacobian(const ModelParams& p, const std::vector<double>& z);

// All d equal (one-point structure): eigenvalue d with multiplicity N-1 and
// d + c^2 N with multiplicity 1. Throws when the d_i differ beyond 1e-12.
std::pair<double, double> eigen_sync(const JacobianSpec& spec);

// Exactly two distinct d-values D1 (count N1) and D2 (count N2): D1 and D2
// with multiplicities N1-1 / N2-1 plus the two roots of
//   lambda^2 - (D1+D2+c^2 N) lambda + D1 D2 + c^2 N1 D2 + c^2 N2 D1 = 0.
std::vector<double> eigen_two_group(const JacobianSpec& spec);
std::vector<double> eigen_two_group(double c2, double d1, int n1, double d2, int n2);

// Dense symmetric fallback (cyclic Jacobi), ascending.
std::vector<double> eigen_general(const JacobianSpec& spec);

// Spectrum dispatch keyed on the distinct d-values: one value -> closed-form
// sync spectrum, two values -> two-group closed form, otherwise dense.
std::vector<double> spectrum_at(const ModelParams& p, const std::vector<double>& z);

Stability classify(const std::vector<double>& spectrum);

// Characteristic polynomial of c^2 ones + diag(d) evaluated at lambda,
// relative to the magnitude of its terms. Used as an eigenvalue residual.
double charpoly_relative_residual(const JacobianSpec& spec, double lambda);

} // namespace urnsim
