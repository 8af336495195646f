#pragma once

#include <vector>

namespace urnsim {

// Minimal dense helpers for the small symmetric systems this project needs
// (N up to a few hundred). Matrices are row-major n*n vectors.

// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
// Sweeps until the off-diagonal Frobenius mass drops below tol_factor times
// the matrix Frobenius norm.
std::vector<double> jacobi_eigenvalues(std::vector<double> a, int n,
                                       double tol_factor = 1e-13);

// Solves A x = b by Gaussian elimination with partial pivoting.
// Returns false when a pivot is (numerically) zero.
bool lu_solve(std::vector<double> a, int n, std::vector<double> b,
              std::vector<double>& x);

} // namespace urnsim
