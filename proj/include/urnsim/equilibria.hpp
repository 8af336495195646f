#pragma once

#include <string>
#include <utility>
#include <vector>

#include "urnsim/dynamics.hpp"
#include "urnsim/stability.hpp"

namespace urnsim {

enum class ZeroKind { Synchronization, NoSynchronization };

std::string to_string(ZeroKind k);

struct ZeroGroup {
    double value = 0.0;
    int count = 0;
};

// A zero of the drift field, stored as sorted group values with
// multiplicities; the full permutation orbit is implicit.
struct ZeroPoint {
    std::vector<ZeroGroup> groups;  // values strictly increasing, counts sum to N
    ZeroKind kind = ZeroKind::Synchronization;
    double residual = 0.0;          // sup-norm of the drift at the point
    std::vector<double> spectrum;   // Jacobian eigenvalues, ascending
    Stability stability = Stability::Stable;
    bool excluded_given_nonzero_start = false;

    int n() const;
    std::vector<double> expand() const; // ascending N-vector
};

struct CriticalAbscissas {
    std::vector<double> xhat;    // solutions of f' = (1-alpha)/(1-alpha-beta)
    std::vector<double> xstar12; // solutions of f' = 1/(1-alpha-beta)
};

struct ConditionFlags {
    bool u1 = false, u2 = false, u3 = false;
    bool s1 = false, s2 = false, s3 = false, s4 = false;
    bool cond_cs = false; // the exclusion inequality (1-a-b)[f'(0)+f'(1)] >= 1+(1-a)
};

struct EquilibriaDiagnostics {
    CriticalAbscissas abscissas;
    ConditionFlags flags;
    bool half_is_zero = false; // 1/2*ones is a zero of the drift
    bool degenerate = false;   // max f' tangent to the level 1/(1-alpha-beta)
};

// F_h(z) = alpha*mean(z) + beta*q + (1-alpha-beta) f(z_h) - z_h.
std::vector<double> drift(const ModelParams& p, const std::vector<double>& z);
double drift_sup_norm(const ModelParams& p, const std::vector<double>& z);

// Scalar synchronization residual
// phi(z) = f(z) - (1-alpha)/(1-alpha-beta) z + beta q/(1-alpha-beta).
double sync_residual(const ModelParams& p, double z);

// Roots of phi by monotone-piece bisection; works for every family and is
// the cross-check route for the LP closed form.
std::vector<double> sync_zero_values_scan(const ModelParams& p);

// Synchronization zeros. LP uses the closed-form quadratic, the sigmoid
// families bisect phi on the pieces cut by the xhat abscissas. Never empty.
std::vector<ZeroPoint> sync_zeros(const ModelParams& p);

// Two-group zeros from the c-parameterized construction; three-group
// candidates through the middle branch are enumerated only when
// include_unstable_middle is set (they are always linearly unstable).
std::vector<ZeroPoint> nosync_zeros(const ModelParams& p,
                                    bool include_unstable_middle = false);

// Union of sync_zeros and nosync_zeros, polished, deduplicated at 1e-7 and
// sorted; every returned point has residual <= 1e-9.
std::vector<ZeroPoint> all_zeros(const ModelParams& p,
                                 bool include_unstable_middle = false);

// Independent cross-validation: damped Newton on the full drift from
// quasi-random (Halton) starts, deduplicated at 1e-6.
std::vector<ZeroPoint> oracle_zeros(const ModelParams& p, int n_starts = 10000);

// all_zeros cross-checked against the oracle; throws std::logic_error when
// the oracle finds a zero the enumeration missed.
std::vector<ZeroPoint> all_zeros_verified(const ModelParams& p,
                                          bool include_unstable_middle = false,
                                          int n_starts = 10000);

// Interval that alpha*N1/N must satisfy at a stable two-group zero with
// values z1 < z3.
std::pair<double, double> restriction_bounds(const ModelParams& p, double z1, double z3);

CriticalAbscissas critical_abscissas(const ModelParams& p);
EquilibriaDiagnostics diagnostics(const ModelParams& p);

// Predicted support of the limit: drops linearly unstable zeros when
// f(0) > 0 and f(1) < 1; otherwise (LP, where f(0) = 0) keeps the zero at
// the origin but marks it excluded under a nonzero start.
std::vector<ZeroPoint> exclude_unstable(const ModelParams& p,
                                        std::vector<ZeroPoint> zeros);

// Euclidean distance between sorted(z) and the zero's expanded components;
// equals the minimum over coordinate permutations.
double sorted_distance(const std::vector<double>& z, const ZeroPoint& zero);

// Nearest-zero assignment used by basin reports; assigns only within radius.
void assign_nearest(ReplicationReport& report, const std::vector<ZeroPoint>& zeros,
                    double radius = 0.1);

} // namespace urnsim
