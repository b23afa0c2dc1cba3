#pragma once

// Observables, one-particle measures and correlation strengths on a DiscreteCFS.
//
// Vectors u live in the N-dimensional Hilbert space. Physical wave functions
// psi^u(x) = pi_x u are N-vectors; where a 2n-component spinor is needed
// (transfer_retained), the coordinates are psi_x u, the same coordinates on
// which kernel() acts.

#include <cstddef>
#include <vector>

#include "cfslab/core.hpp"

namespace cfslab {

class Subsystem {
 public:
  /// Columns of `basis` must be orthonormal to 1e-12.
  static Subsystem from_orthonormal(const CMatrix& basis);
  /// Orthonormalizes the columns (QR); linearly dependent input is a structural error.
  static Subsystem from_span(const CMatrix& vectors);
  /// The whole Hilbert space, omega = identity.
  static Subsystem total(int N);
  static Subsystem one_particle(const CVector& u);

  const CMatrix& basis() const { return basis_; }
  const CMatrix& omega() const { return omega_; }
  int hilbert_dim() const { return static_cast<int>(basis_.rows()); }
  int particles() const { return static_cast<int>(basis_.cols()); }

 private:
  explicit Subsystem(CMatrix basis);
  CMatrix basis_;
  CMatrix omega_;
};

class Region {
 public:
  Region() = default;
  explicit Region(std::vector<std::size_t> indices);  // sorted, duplicates dropped

  static Region all(const DiscreteCFS& cfs);

  const std::vector<std::size_t>& indices() const { return idx_; }
  bool empty() const { return idx_.empty(); }
  std::size_t size() const { return idx_.size(); }
  bool contains(std::size_t i) const;
  void validate(const DiscreteCFS& cfs) const;

  bool operator==(const Region&) const = default;

 private:
  std::vector<std::size_t> idx_;
};

/// O(U) = sum_{i in U} w_i pi_{x_i}
CMatrix position_observable(const DiscreteCFS& cfs, const Region& reg);

/// (1/2n) tr(omega O)
double expectation(const Subsystem& omega, const CMatrix& O, int n);

/// <u|omega u>. u may be longer than N; entries past N belong to an auxiliary
/// space on which omega vanishes.
double occupation(const CVector& u, const Subsystem& omega);

/// pi_x u as an N-vector.
CVector physical_wave(const SpacetimePoint& x, const CVector& u, const Tolerances& tol = {});

/// rho_u(U) = (1/2n) sum_{i in U} w_i |pi_{x_i} u|^2
double one_particle_measure(const DiscreteCFS& cfs, const CVector& u, const Region& reg);

/// Point masses w_i |pi_{x_i} u|^2 / 2n for every support point.
std::vector<double> one_particle_masses(const DiscreteCFS& cfs, const CVector& u);

Region one_particle_support(const DiscreteCFS& cfs, const CVector& u, const Tolerances& tol);
inline Region one_particle_support(const DiscreteCFS& cfs, const CVector& u) {
  return one_particle_support(cfs, u, cfs.tolerances());
}

bool is_localized(const DiscreteCFS& cfs, const CVector& u, const Region& reg);
bool is_delocalized(const DiscreteCFS& cfs, const CVector& u);

/// |psi^u(x)><psi^u(y)| O_y |psi^u(y)><psi^u(x)| on spinor coordinates at x.
CMatrix transfer_retained(const CVector& u, const SpacetimePoint& x, const SpacetimePoint& y, const CMatrix& O_y);

/// pi_x y x as an N x N operator, exactly zero for spacelike pairs.
CMatrix causal_correlation_operator(const DiscreteCFS& cfs, std::size_t i, std::size_t j);

/// b_u(x_i, x_j) = (1/2n) <u| A~ u>
Complex correlation_strength_one(const DiscreteCFS& cfs, const CVector& u, std::size_t i, std::size_t j);

/// (1/2n) tr A~ before dropping the imaginary part.
Complex correlation_strength_total_complex(const DiscreteCFS& cfs, std::size_t i, std::size_t j);

double correlation_strength_total(const DiscreteCFS& cfs, std::size_t i, std::size_t j);

/// b(i, j) for all pairs, row-major.
Eigen::MatrixXd correlation_matrix(const DiscreteCFS& cfs, const ParallelOptions& par = {});

}  // namespace cfslab
