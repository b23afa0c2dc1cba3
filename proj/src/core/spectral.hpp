#pragma once

// Internal spectral helpers shared by the core and observables sources.

#include <vector>

#include "cfslab/core.hpp"

namespace cfslab::detail {

// Non-trivial part of the eigendecomposition of a point operator x.
// For N > 2n it comes from a thin QR of psi^dagger, so the cost is O(N n^2).
struct PointEigen {
  Eigen::VectorXd values;  // ascending
  CMatrix vectors;         // N x values.size(), orthonormal columns
  double radius = 0.0;
};

PointEigen compute_point_eigen(const SpacetimePoint& p);

/// Orthonormal basis of the spin space S_x (eigenvectors above the rank cutoff).
CMatrix spin_basis(const SpacetimePoint& p, const Tolerances& tol);

std::vector<Complex> general_eigenvalues(const CMatrix& a);

void sort_spectrum(std::vector<Complex>& v);

}  // namespace cfslab::detail
