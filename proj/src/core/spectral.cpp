#include "spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cfslab::detail {

PointEigen compute_point_eigen(const SpacetimePoint& p) {
  const int n2 = p.signature().dim();
  const int N = p.hilbert_dim();
  PointEigen out;
  if (N <= n2) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(p.dense());
    if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "Hermitian eigensolver failed on point operator");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
  } else {
    // psi^dagger = Q R  =>  x = Q (-R S R^dagger) Q^dagger
    Eigen::HouseholderQR<CMatrix> qr(p.psi().adjoint());
    CMatrix q = qr.householderQ() * CMatrix::Identity(N, n2);
    CMatrix r = qr.matrixQR().topRows(n2).triangularView<Eigen::Upper>();
    CMatrix rs = r;
    for (int k = p.spin_dim(); k < n2; ++k) rs.col(k) *= -1.0;
    CMatrix h = -(rs * r.adjoint());
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h);
    if (es.info() != Eigen::Success) fail(ErrorKind::Numerical, "Hermitian eigensolver failed on reduced point operator");
    out.values = es.eigenvalues();
    out.vectors = q * es.eigenvectors();
  }
  out.radius = out.values.size() ? out.values.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

CMatrix spin_basis(const SpacetimePoint& p, const Tolerances& tol) {
  const auto& e = point_eigen(p);
  const int N = p.hilbert_dim();
  if (e.radius == 0.0) return CMatrix(N, 0);
  double cut = tol.tol_rank * e.radius;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index k = 0; k < e.values.size(); ++k)
    if (std::abs(e.values[k]) > cut) keep.push_back(k);
  CMatrix v(N, static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = e.vectors.col(keep[c]);
  return v;
}

std::vector<Complex> general_eigenvalues(const CMatrix& a) {
  if (!a.allFinite()) fail(ErrorKind::Numerical, "closed chain has non-finite entries");
  Eigen::ComplexEigenSolver<CMatrix> es(a, false);
  if (es.info() != Eigen::Success) {
    std::ostringstream os;
    os << "complex eigensolver did not converge on a " << a.rows() << "x" << a.cols()
       << " chain (Frobenius norm " << a.norm() << ")";
    fail(ErrorKind::Numerical, os.str());
  }
  const auto& ev = es.eigenvalues();
  return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

void sort_spectrum(std::vector<Complex>& v) {
  std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

}  // namespace cfslab::detail
