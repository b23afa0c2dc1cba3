#include "cfslab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spectral.hpp"

namespace cfslab {

namespace {

constexpr double kOrthoTol = 1e-12;

void require_unit(const CVector& u, const char* what) {
  double nrm = u.norm();
  if (!std::isfinite(nrm) || std::abs(nrm - 1.0) > kOrthoTol) {
    std::ostringstream os;
    os << what << ": vector must have unit norm (got " << nrm << ")";
    fail(ErrorKind::Structural, os.str());
  }
}

void require_dim(const CVector& u, int N, const char* what) {
  if (u.size() != N) {
    std::ostringstream os;
    os << what << ": vector has dimension " << u.size() << ", expected " << N;
    fail(ErrorKind::Structural, os.str());
  }
}

// S applied from the left to spinor coordinates
void apply_sig(CMatrix& m, int n) { m.bottomRows(m.rows() - n) *= -1.0; }

}  // namespace

Subsystem::Subsystem(CMatrix basis) : basis_(std::move(basis)) {
  omega_ = basis_ * basis_.adjoint();
}

Subsystem Subsystem::from_orthonormal(const CMatrix& basis) {
  require(basis.rows() >= 1, "subsystem basis needs a positive dimension");
  require(basis.allFinite(), "subsystem basis has non-finite entries");
  CMatrix g = basis.adjoint() * basis;
  double err = (g - CMatrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
  if (basis.cols() > 0 && err > kOrthoTol) {
    std::ostringstream os;
    os << "subsystem basis is not orthonormal (Gram deviation " << err << ")";
    fail(ErrorKind::Structural, os.str());
  }
  return Subsystem(basis);
}

Subsystem Subsystem::from_span(const CMatrix& vectors) {
  require(vectors.rows() >= 1, "subsystem span needs a positive dimension");
  require(vectors.cols() <= vectors.rows(), "more spanning vectors than dimensions");
  require(vectors.allFinite(), "subsystem span has non-finite entries");
  if (vectors.cols() == 0) return Subsystem(vectors);
  Eigen::ColPivHouseholderQR<CMatrix> qr(vectors);
  qr.setThreshold(1e-12);
  require(qr.rank() == vectors.cols(), "subsystem spanning vectors are linearly dependent");
  CMatrix q = qr.householderQ() * CMatrix::Identity(vectors.rows(), vectors.cols());
  return Subsystem(q);
}

Subsystem Subsystem::total(int N) {
  require(N >= 1, "Hilbert dimension must be positive");
  return Subsystem(CMatrix::Identity(N, N));
}

Subsystem Subsystem::one_particle(const CVector& u) {
  require_unit(u, "one_particle");
  return Subsystem(CMatrix(u));
}

Region::Region(std::vector<std::size_t> indices) : idx_(std::move(indices)) {
  std::sort(idx_.begin(), idx_.end());
  idx_.erase(std::unique(idx_.begin(), idx_.end()), idx_.end());
}

Region Region::all(const DiscreteCFS& cfs) {
  std::vector<std::size_t> v(cfs.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i;
  return Region(std::move(v));
}

bool Region::contains(std::size_t i) const { return std::binary_search(idx_.begin(), idx_.end(), i); }

void Region::validate(const DiscreteCFS& cfs) const {
  if (!idx_.empty() && idx_.back() >= cfs.size()) {
    std::ostringstream os;
    os << "region index " << idx_.back() << " out of range for a CFS with " << cfs.size() << " points";
    fail(ErrorKind::Structural, os.str());
  }
}

CMatrix position_observable(const DiscreteCFS& cfs, const Region& reg) {
  reg.validate(cfs);
  const int N = cfs.hilbert_dim();
  CMatrix o = CMatrix::Zero(N, N);
  for (std::size_t i : reg.indices()) {
    CMatrix v = detail::spin_basis(cfs.point(i), cfs.tolerances());
    o.noalias() += cfs.weight(i) * (v * v.adjoint());
  }
  return o;
}

double expectation(const Subsystem& omega, const CMatrix& O, int n) {
  require(n >= 1, "spin dimension must be positive");
  if (O.rows() != omega.hilbert_dim() || O.cols() != omega.hilbert_dim()) {
    std::ostringstream os;
    os << "expectation: operator is " << O.rows() << "x" << O.cols() << ", subsystem lives in dimension "
       << omega.hilbert_dim();
    fail(ErrorKind::Structural, os.str());
  }
  // tr(omega O) = sum_k <e_k|O e_k> over the subsystem basis
  const CMatrix& b = omega.basis();
  Complex tr = (b.adjoint() * O * b).trace();
  return tr.real() / (2.0 * n);
}

double occupation(const CVector& u, const Subsystem& omega) {
  const int N = omega.hilbert_dim();
  if (u.size() < N) {
    std::ostringstream os;
    os << "occupation: vector has dimension " << u.size() << ", subsystem needs at least " << N;
    fail(ErrorKind::Structural, os.str());
  }
  require_unit(u, "occupation");
  CVector c = omega.basis().adjoint() * u.head(N);
  return c.squaredNorm();
}

CVector physical_wave(const SpacetimePoint& x, const CVector& u, const Tolerances& tol) {
  require_dim(u, x.hilbert_dim(), "physical_wave");
  CMatrix v = detail::spin_basis(x, tol);
  return v * (v.adjoint() * u);
}

std::vector<double> one_particle_masses(const DiscreteCFS& cfs, const CVector& u) {
  require_dim(u, cfs.hilbert_dim(), "one_particle_measure");
  require_unit(u, "one_particle_measure");
  std::vector<double> m(cfs.size());
  const double scale = 1.0 / (2.0 * cfs.spin_dim());
  for (std::size_t i = 0; i < cfs.size(); ++i) {
    CMatrix v = detail::spin_basis(cfs.point(i), cfs.tolerances());
    m[i] = cfs.weight(i) * (v.adjoint() * u).squaredNorm() * scale;
  }
  return m;
}

double one_particle_measure(const DiscreteCFS& cfs, const CVector& u, const Region& reg) {
  reg.validate(cfs);
  auto m = one_particle_masses(cfs, u);
  std::vector<double> sel;
  sel.reserve(reg.size());
  for (std::size_t i : reg.indices()) sel.push_back(m[i]);
  return pairwise_sum(sel);
}

Region one_particle_support(const DiscreteCFS& cfs, const CVector& u, const Tolerances& tol) {
  auto m = one_particle_masses(cfs, u);
  double top = *std::max_element(m.begin(), m.end());
  double wmax = *std::max_element(cfs.weights().begin(), cfs.weights().end());
  // |pi u|^2 <= 1, so the floor is scale free; it keeps rounding noise of a
  // state orthogonal to every spin space out of the support
  double floor = tol.tol_rank * tol.tol_rank * wmax / (2.0 * cfs.spin_dim());
  double cut = std::max(tol.tol_rank * top, floor);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < m.size(); ++i)
    if (m[i] > cut) idx.push_back(i);
  return Region(std::move(idx));
}

bool is_localized(const DiscreteCFS& cfs, const CVector& u, const Region& reg) {
  reg.validate(cfs);
  Region supp = one_particle_support(cfs, u);
  for (std::size_t i : supp.indices()) {
    bool witness = false;
    for (std::size_t j : reg.indices()) {
      if (pair_data(cfs, i, j).cls != CausalClass::Spacelike) {
        witness = true;
        break;
      }
    }
    if (!witness) return false;
  }
  return true;
}

bool is_delocalized(const DiscreteCFS& cfs, const CVector& u) {
  return one_particle_support(cfs, u).size() == cfs.size();
}

CMatrix transfer_retained(const CVector& u, const SpacetimePoint& x, const SpacetimePoint& y, const CMatrix& O_y) {
  require(x.hilbert_dim() == y.hilbert_dim() && x.spin_dim() == y.spin_dim(),
          "transfer_retained: point dimensions differ");
  require_dim(u, x.hilbert_dim(), "transfer_retained");
  const int n2 = y.signature().dim();
  require(O_y.rows() == n2 && O_y.cols() == n2, "transfer_retained: observable must be 2n x 2n");
  CVector a = x.psi() * u;
  CVector b = y.psi() * u;
  // <b|O b> with the spin product: -b^dagger S O b, and <a| = -a^dagger S
  CMatrix ob = O_y * b;
  apply_sig(ob, y.spin_dim());
  Complex inner = (b.adjoint() * ob)(0, 0);
  CMatrix bra = a.adjoint();
  bra.rightCols(x.spin_dim()) *= -1.0;
  return inner * (a * bra);
}

namespace {

// Factors of A~ = V (V^dagger psi_y^dagger) S (psi_y psi_x^dagger) S psi_x
struct Corr {
  CMatrix v;     // N x k basis of S_x
  CMatrix left;  // k x 2n : V^dagger psi_y^dagger S
  CMatrix mid;   // 2n x 2n : psi_y psi_x^dagger S
};

Corr corr_factors(const DiscreteCFS& cfs, std::size_t i, std::size_t j) {
  const SpacetimePoint& x = cfs.point(i);
  const SpacetimePoint& y = cfs.point(j);
  const int n = cfs.spin_dim();
  Corr c;
  c.v = detail::spin_basis(x, cfs.tolerances());
  c.left = c.v.adjoint() * y.psi().adjoint();
  c.left.rightCols(n) *= -1.0;
  c.mid = y.psi() * x.psi().adjoint();
  c.mid.rightCols(n) *= -1.0;
  return c;
}

void check_indices(const DiscreteCFS& cfs, std::size_t i, std::size_t j) {
  require(i < cfs.size() && j < cfs.size(), "point index out of range");
}

}  // namespace

CMatrix causal_correlation_operator(const DiscreteCFS& cfs, std::size_t i, std::size_t j) {
  check_indices(cfs, i, j);
  const int N = cfs.hilbert_dim();
  if (pair_data(cfs, i, j).cls == CausalClass::Spacelike) return CMatrix::Zero(N, N);
  Corr c = corr_factors(cfs, i, j);
  return c.v * (c.left * c.mid * cfs.point(i).psi());
}

Complex correlation_strength_one(const DiscreteCFS& cfs, const CVector& u, std::size_t i, std::size_t j) {
  check_indices(cfs, i, j);
  require_dim(u, cfs.hilbert_dim(), "correlation_strength_one");
  require_unit(u, "correlation_strength_one");
  if (pair_data(cfs, i, j).cls == CausalClass::Spacelike) return {0.0, 0.0};
  Corr c = corr_factors(cfs, i, j);
  CVector au = c.v * (c.left * (c.mid * (cfs.point(i).psi() * u)));
  return u.dot(au) / (2.0 * cfs.spin_dim());
}

Complex correlation_strength_total_complex(const DiscreteCFS& cfs, std::size_t i, std::size_t j) {
  check_indices(cfs, i, j);
  if (pair_data(cfs, i, j).cls == CausalClass::Spacelike) return {0.0, 0.0};
  // tr(pi_x y x) = tr(x y) = tr of the closed chain
  return closed_chain(cfs.point(i), cfs.point(j)).trace() / (2.0 * cfs.spin_dim());
}

double correlation_strength_total(const DiscreteCFS& cfs, std::size_t i, std::size_t j) {
  return correlation_strength_total_complex(cfs, i, j).real();
}

Eigen::MatrixXd correlation_matrix(const DiscreteCFS& cfs, const ParallelOptions& par) {
  const std::size_t m = cfs.size();
  Eigen::MatrixXd b(m, m);
  parallel_for(m * m, par.threads, [&](std::size_t k) {
    std::size_t i = k / m, j = k % m;
    b(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = correlation_strength_total(cfs, i, j);
  });
  return b;
}

}  // namespace cfslab
