#pragma once

#include <cstddef>
#include <vector>

namespace fvpnet {

/// Eigenvalues of a dense symmetric n x n matrix (row-major) by the cyclic
/// Jacobi rotation method, sorted in increasing order. Throws InvalidInput if
/// the matrix is not symmetric to within `symmetry_tol` (absolute).
std::vector<double> jacobi_eigenvalues(std::vector<double> a, std::size_t n, double symmetry_tol = 0.0,
                                       std::size_t max_sweeps = 100);

}  // namespace fvpnet
