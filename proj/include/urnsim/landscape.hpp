#pragma once

#include <iosfwd>
#include <vector>

#include "urnsim/dynamics.hpp"

namespace urnsim {

// Lyapunov potential with F = -grad V:
//   V(z) = -alpha/(2N) (sum z)^2 - beta q sum z
//          - (1-alpha-beta) sum Phi(z_h) + 1/2 sum z_h^2,
// where Phi is the primitive of f gauged to Phi(0) = 0 (so V(0) = 0).
double potential(const ModelParams& p, const std::vector<double>& z);

struct GridSpec {
    int resolution = 101; // nodes per axis, in [2, 4096]
};

struct FieldRow {
    double z1, z2, f1, f2, v;
};

// Row-major grid over [0,1]^2 with drift and potential at each node.
// Only defined for N = 2.
std::vector<FieldRow> field_grid(const ModelParams& p, const GridSpec& grid);

// CSV with mandatory header "z1,z2,F1,F2,V".
void write_field_csv(std::ostream& os, const std::vector<FieldRow>& rows);

} // namespace urnsim
