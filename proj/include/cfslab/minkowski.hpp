#pragma once

// Regularized vacuum kernel of the Dirac sea in Minkowski space.
//
//   P(x, y) = i alpha xi_mu gamma^mu + beta,   xi = (t - i eps, dx),  t = y0 - x0
//   alpha = m^4/(8 pi^3) K2(z)/z^2,  beta = m^3/(8 pi^3) K1(z)/z,  z = m sqrt(-xi.xi)
//
// Metric signature (+,-,-,-); gamma matrices in the Dirac representation.

#include <array>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "cfslab/core.hpp"

namespace cfslab {

struct FourVector {
  double t = 0.0;
  std::array<double, 3> x{0.0, 0.0, 0.0};
};

struct KernelParams {
  double m = 1.0;
  double eps = 1e-3;

  void validate() const;
};

struct KernelValue {
  std::array<Complex, 4> xi{};  // contravariant: (t - i eps, dx)
  Complex z;
  Complex alpha;
  Complex beta;
  bool underflow = false;       // far separation, alpha = beta = 0
};

/// Closed chain A = P(x,y) P(y,x) = b + a_mu gamma^mu + sum_{i} c_0i Sigma^{0i}.
struct ChainCoeffs {
  double b = 0.0;
  std::array<double, 4> a{};    // covariant, a_mu = 2|alpha|^2 X_mu
  std::array<double, 3> c0i{};  // = -2|alpha|^2 eps dx_i with dx_i covariant
  std::array<double, 4> X{};    // covariant, X_mu = Im[(beta/alpha) conj(xi_mu)]
  double r = 0.0;
  double eps = 0.0;
  double alpha_abs2 = 0.0;
  bool degenerate = false;      // alpha underflowed; everything else is 0

  /// X_mu X^mu
  double XX() const;
  /// X.X - eps^2 r^2, the sign of which decides the causal class
  double gap() const;
  /// scale for relative comparisons of gap()
  double gap_scale() const;
};

struct ChainEigenvalues {
  Complex lambda_plus, lambda_minus;  // each twofold
  bool complex_pair = false;          // negative discriminant
  double discriminant = 0.0;          // a.a - sum c_0i^2
};

class GammaBasis {
 public:
  /// Dirac representation; the Clifford relations are checked on construction.
  static const GammaBasis& standard();

  const CMatrix& identity() const { return id_; }
  const CMatrix& gamma(int mu) const { return g_[mu]; }
  const CMatrix& gamma5() const { return g5_; }
  /// (i/2)[gamma^mu, gamma^nu]
  const CMatrix& sigma(int mu, int nu) const { return s_[mu][nu]; }

  /// The 16 basis elements in the order 1, i g5, g^0..g^3, g5 g^0..g5 g^3,
  /// Sigma^{01}, ^{02}, ^{03}, ^{12}, ^{13}, ^{23}.
  const std::array<CMatrix, 16>& elements() const { return elems_; }

  static constexpr double metric(int mu) { return mu == 0 ? 1.0 : -1.0; }

 private:
  GammaBasis();
  CMatrix id_, g5_;
  std::array<CMatrix, 4> g_;
  std::array<std::array<CMatrix, 4>, 4> s_;
  std::array<CMatrix, 16> elems_;
};

struct DiracCoefficients {
  std::array<Complex, 16> c{};  // same order as GammaBasis::elements()

  Complex scalar() const { return c[0]; }
  Complex pseudoscalar() const { return c[1]; }
  Complex vector(int mu) const { return c[2 + mu]; }
  Complex axial(int mu) const { return c[6 + mu]; }
  /// mu < nu
  Complex bilinear(int mu, int nu) const;

  CMatrix reconstruct(const GammaBasis& g = GammaBasis::standard()) const;
};

/// m sqrt(-xi.xi), principal branch. eps = 0 is allowed only for spacelike
/// separation; otherwise a domain error asks for eps > 0.
Complex z_arg(const FourVector& x, const FourVector& y, const KernelParams& p);

KernelValue alpha_beta(const FourVector& x, const FourVector& y, const KernelParams& p);

CMatrix kernel_matrix(const FourVector& x, const FourVector& y, const KernelParams& p,
                      const GammaBasis& g = GammaBasis::standard());

ChainCoeffs chain_coeffs(const FourVector& x, const FourVector& y, const KernelParams& p);

ChainEigenvalues chain_eigenvalues(const ChainCoeffs& c);

/// Timelike when gap() > band * gap_scale(), spacelike when below -band * gap_scale().
CausalClass classify_continuum(const ChainCoeffs& c, const KernelParams& p, double band = 1e-12);

/// 16 |alpha|^4 (X.X - eps^2 r^2) on timelike pairs, 0 otherwise.
double lagrangian_continuum(const ChainCoeffs& c, const KernelParams& p);

DiracCoefficients dirac_decompose(const CMatrix& a, const GammaBasis& g = GammaBasis::standard());

struct VarianceCheck {
  double lagrangian = 0.0;
  double four_var = 0.0;
  double residual = 0.0;
};

VarianceCheck variance_identity_check(const FourVector& x, const FourVector& y, const KernelParams& p);

/// lambda = (2 pi)^3 eps^2 / m
double trace_normalization(const KernelParams& p);

/// One CSV row of a kernel table at time separation t and spatial distance r.
struct KernelRow {
  double t, r, eps;
  Complex alpha, beta;
  double b, XX;
  CausalClass cls;
  double lagrangian;
};

KernelRow kernel_row(double t, double r, const KernelParams& p);
std::string kernel_csv_header();
std::string kernel_csv_line(const KernelRow& row);

struct SeaSampleConfig {
  double box_len = 4.0 * 3.14159265358979323846;
  double k_cut = 2.0;
  double m = 1.0;
  std::vector<FourVector> lattice;
  double eps_soft = 0.0;             // 0 = hard cutoff only
  double max_entries = 5e7;          // complex entries over all wave evaluations
  unsigned threads = 1;

  void validate() const;
};

/// Number of momenta k in (2 pi / L) Z^3 with |k| <= k_cut.
std::size_t count_sea_modes(double box_len, double k_cut);

/// Negative-energy plane waves in a periodic box, evaluated on the lattice.
/// The result has n = 2, N = 2 * count_sea_modes and uniform weights 1/|lattice|.
DiscreteCFS dirac_sea_sample(const SeaSampleConfig& cfg);

/// Continuum limit of the sampled kernel -sum psi(x) psi(y)^dagger gamma^0 for
/// damping eps: 2 pi gamma5 P(x, y) gamma5.
CMatrix sea_continuum_kernel(const FourVector& x, const FourVector& y, const KernelParams& p);

}  // namespace cfslab
