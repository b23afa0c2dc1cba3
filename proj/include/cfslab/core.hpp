#pragma once

// Finite-dimensional causal fermion systems.
//
// A spacetime point is stored as its wave evaluation: a 2n x N matrix whose
// column j is the spinor of basis state u_j at that point. The operator itself,
//
//     x = -psi^dagger S psi        (N x N, Hermitian, inertia at most (n, n))
//
// is only materialized on request. Everything spectral runs on the 2n x 2n
// closed chain, whose non-zero eigenvalues coincide with those of x y.

#include <complex>
#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "cfslab/errors.hpp"
#include "cfslab/parallel.hpp"

namespace cfslab {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct Tolerances {
  double rel_eq = 1e-9;    // modulus equality, relative to the spectral radius
  double rel_real = 1e-9;  // vanishing imaginary part, relative to the spectral radius
  double tol_rank = 1e-10; // eigenvalue cutoff relative to the largest modulus
  double tol_herm = 1e-9;  // Hermiticity check on dense operators

  /// Throws Structural unless every field lies in (0, 1e-3].
  void validate() const;
};

/// diag(+1 x n, -1 x n)
class SpinSignature {
 public:
  explicit SpinSignature(int n);

  int n() const { return n_; }
  int dim() const { return 2 * n_; }
  double sign(int row) const { return row < n_ ? 1.0 : -1.0; }
  CMatrix matrix() const;

  bool operator==(const SpinSignature&) const = default;

 private:
  int n_;
};

class WaveEval {
 public:
  explicit WaveEval(CMatrix psi);

  const CMatrix& psi() const { return psi_; }
  int spin_rows() const { return static_cast<int>(psi_.rows()); }
  int hilbert_dim() const { return static_cast<int>(psi_.cols()); }

 private:
  CMatrix psi_;
};

class SpacetimePoint;

namespace detail {
struct PointEigen;
const PointEigen& point_eigen(const SpacetimePoint& p);
}  // namespace detail

class SpacetimePoint {
 public:
  SpacetimePoint(WaveEval eval, SpinSignature sig);

  const WaveEval& eval() const { return eval_; }
  const CMatrix& psi() const { return eval_.psi(); }
  const SpinSignature& signature() const { return sig_; }
  int spin_dim() const { return sig_.n(); }
  int hilbert_dim() const { return eval_.hilbert_dim(); }

  /// The N x N operator; computed once and shared between copies.
  const CMatrix& dense() const;

  /// tr(x) = -sum_k s_k |psi_k|^2, without forming the dense operator.
  double trace() const;

 private:
  friend const detail::PointEigen& detail::point_eigen(const SpacetimePoint& p);

  struct Cache;
  WaveEval eval_;
  SpinSignature sig_;
  std::shared_ptr<Cache> cache_;
};

SpacetimePoint point_from_wave_eval(WaveEval eval, SpinSignature sig);
const CMatrix& dense_operator(const SpacetimePoint& p);

/// P(x, y) = sum_i |psi_i(x)><psi_i(y)| with spin-product bras, i.e.
/// -psi_x psi_y^dagger S. Maps spinor coordinates at y to those at x.
CMatrix kernel(const SpacetimePoint& x, const SpacetimePoint& y);

/// A_xy = P(x, y) P(y, x)
CMatrix closed_chain(const SpacetimePoint& x, const SpacetimePoint& y);

/// Adjoint with respect to the indefinite spin product: S A^dagger S.
CMatrix spin_adjoint(const CMatrix& a, const SpinSignature& sig);

struct ProductSpectrum {
  std::vector<Complex> lambdas;  // 2n entries, sorted by (re, im)

  double spectral_radius() const;
};

ProductSpectrum product_spectrum(const SpacetimePoint& x, const SpacetimePoint& y);

enum class CausalClass { Spacelike, Timelike, Lightlike };

std::string_view to_string(CausalClass c);

CausalClass classify(const ProductSpectrum& spec, const Tolerances& tol = {});

/// (1/4n) sum_{i,j} (|l_i| - |l_j|)^2, exactly zero for spacelike spectra.
double lagrangian(const ProductSpectrum& spec, int n, const Tolerances& tol = {});

/// (sum_j |l_j|)^2
double boundedness_integrand(const ProductSpectrum& spec);

/// Weighted finite collection of spacetime points (the measure rho).
class DiscreteCFS {
 public:
  DiscreteCFS(std::vector<SpacetimePoint> points, std::vector<double> weights, Tolerances tol = {});

  std::size_t size() const { return points_.size(); }
  const SpacetimePoint& point(std::size_t i) const { return points_.at(i); }
  const std::vector<SpacetimePoint>& points() const { return points_; }
  double weight(std::size_t i) const { return weights_.at(i); }
  const std::vector<double>& weights() const { return weights_; }
  const Tolerances& tolerances() const { return tol_; }
  int spin_dim() const { return n_; }
  int hilbert_dim() const { return N_; }

  DiscreteCFS with_weights(std::vector<double> weights) const;
  DiscreteCFS with_tolerances(Tolerances tol) const;

 private:
  std::vector<SpacetimePoint> points_;
  std::vector<double> weights_;
  Tolerances tol_;
  int n_ = 0;
  int N_ = 0;
};

/// Everything the action and the EL function need about one ordered pair.
struct PairData {
  ProductSpectrum spectrum;
  CausalClass cls;
  double lagrangian;
  double boundedness;
};

PairData pair_data(const DiscreteCFS& cfs, std::size_t i, std::size_t j);

/// Row-major table of all ordered pairs (i, j).
std::vector<PairData> pair_table(const DiscreteCFS& cfs, const ParallelOptions& par = {});

struct ActionReport {
  double action = 0.0;
  double volume = 0.0;
  double trace = 0.0;
  double boundedness = 0.0;
};

ActionReport action(const DiscreteCFS& cfs, const ParallelOptions& par = {});

struct ELParams {
  double kappa = 0.0;  // boundedness multiplier, >= 0
  double r_tr = 0.0;   // trace multiplier
  double s_vol = 0.0;  // volume multiplier
};

double el_function(const DiscreteCFS& cfs, std::size_t idx, const ELParams& params);

/// l(x_i) for every support point, sharing one pair table.
std::vector<double> el_residuals(const DiscreteCFS& cfs, const ELParams& params,
                                 const ParallelOptions& par = {});

/// Orthogonal projector onto the eigenvectors of x whose |eigenvalue| exceeds
/// tol_rank times the spectral radius.
CMatrix spin_projection(const SpacetimePoint& p, const Tolerances& tol = {});

struct Inertia {
  int positive = 0;
  int negative = 0;
  int rank() const { return positive + negative; }
};

Inertia inertia(const SpacetimePoint& p, const Tolerances& tol = {});

}  // namespace cfslab
