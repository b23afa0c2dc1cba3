#include "cfslab/core.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <sstream>

#include "spectral.hpp"

namespace cfslab {

void Tolerances::validate() const {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0 && v <= 1e-3; };
  if (!ok(rel_eq) || !ok(rel_real) || !ok(tol_rank) || !ok(tol_herm))
    fail(ErrorKind::Structural, "tolerances must lie in (0, 1e-3]");
}

SpinSignature::SpinSignature(int n) : n_(n) {
  require(n >= 1, "spin dimension must be positive");
}

CMatrix SpinSignature::matrix() const {
  CMatrix s = CMatrix::Zero(dim(), dim());
  for (int k = 0; k < dim(); ++k) s(k, k) = sign(k);
  return s;
}

WaveEval::WaveEval(CMatrix psi) : psi_(std::move(psi)) {
  require(psi_.cols() >= 1, "wave evaluation needs at least one column");
  require(psi_.rows() >= 2 && psi_.rows() % 2 == 0, "wave evaluation needs an even row count >= 2");
  require(psi_.allFinite(), "wave evaluation has non-finite entries");
}

struct SpacetimePoint::Cache {
  std::once_flag dense_once;
  CMatrix dense;
  std::once_flag eig_once;
  detail::PointEigen eig;
};

SpacetimePoint::SpacetimePoint(WaveEval eval, SpinSignature sig)
    : eval_(std::move(eval)), sig_(sig), cache_(std::make_shared<Cache>()) {
  if (eval_.spin_rows() != sig_.dim()) {
    std::ostringstream os;
    os << "wave evaluation has " << eval_.spin_rows() << " rows, signature needs " << sig_.dim();
    fail(ErrorKind::Structural, os.str());
  }
}

const CMatrix& SpacetimePoint::dense() const {
  std::call_once(cache_->dense_once, [this] {
    const CMatrix& psi = eval_.psi();
    CMatrix spsi = psi;
    for (int k = sig_.n(); k < sig_.dim(); ++k) spsi.row(k) *= -1.0;
    CMatrix x = -(psi.adjoint() * spsi);
    // symmetrize away the rounding asymmetry of the triple product
    cache_->dense = 0.5 * (x + x.adjoint());
  });
  return cache_->dense;
}

double SpacetimePoint::trace() const {
  double tr = 0.0;
  const CMatrix& psi = eval_.psi();
  for (int k = 0; k < sig_.dim(); ++k) tr -= sig_.sign(k) * psi.row(k).squaredNorm();
  return tr;
}

const detail::PointEigen& detail::point_eigen(const SpacetimePoint& p) {
  auto& c = *p.cache_;
  std::call_once(c.eig_once, [&] { c.eig = detail::compute_point_eigen(p); });
  return c.eig;
}

SpacetimePoint point_from_wave_eval(WaveEval eval, SpinSignature sig) {
  return SpacetimePoint(std::move(eval), sig);
}

const CMatrix& dense_operator(const SpacetimePoint& p) { return p.dense(); }

static void check_pair(const SpacetimePoint& x, const SpacetimePoint& y) {
  if (x.hilbert_dim() != y.hilbert_dim() || x.spin_dim() != y.spin_dim()) {
    std::ostringstream os;
    os << "point dimensions differ: (n=" << x.spin_dim() << ", N=" << x.hilbert_dim() << ") vs (n="
       << y.spin_dim() << ", N=" << y.hilbert_dim() << ")";
    fail(ErrorKind::Structural, os.str());
  }
}

CMatrix kernel(const SpacetimePoint& x, const SpacetimePoint& y) {
  check_pair(x, y);
  CMatrix p = -(x.psi() * y.psi().adjoint());
  int n = x.spin_dim();
  p.rightCols(n) *= -1.0;
  return p;
}

CMatrix closed_chain(const SpacetimePoint& x, const SpacetimePoint& y) {
  return kernel(x, y) * kernel(y, x);
}

CMatrix spin_adjoint(const CMatrix& a, const SpinSignature& sig) {
  require(a.rows() == sig.dim() && a.cols() == sig.dim(), "spin_adjoint: size mismatch");
  CMatrix r = a.adjoint();
  for (int i = 0; i < sig.dim(); ++i)
    for (int j = 0; j < sig.dim(); ++j) r(i, j) *= sig.sign(i) * sig.sign(j);
  return r;
}

double ProductSpectrum::spectral_radius() const {
  double r = 0.0;
  for (auto l : lambdas) r = std::max(r, std::abs(l));
  return r;
}

ProductSpectrum product_spectrum(const SpacetimePoint& x, const SpacetimePoint& y) {
  CMatrix a = closed_chain(x, y);
  ProductSpectrum s;
  s.lambdas = detail::general_eigenvalues(a);
  s.lambdas.resize(static_cast<std::size_t>(2 * x.spin_dim()), Complex(0.0, 0.0));
  detail::sort_spectrum(s.lambdas);
  return s;
}

std::string_view to_string(CausalClass c) {
  switch (c) {
    case CausalClass::Spacelike: return "spacelike";
    case CausalClass::Timelike: return "timelike";
    case CausalClass::Lightlike: return "lightlike";
  }
  return "?";
}

CausalClass classify(const ProductSpectrum& spec, const Tolerances& tol) {
  require(!spec.lambdas.empty(), "classify: empty spectrum");
  double lo = std::abs(spec.lambdas[0]), hi = lo;
  for (auto l : spec.lambdas) {
    lo = std::min(lo, std::abs(l));
    hi = std::max(hi, std::abs(l));
  }
  if (hi - lo <= tol.rel_eq * hi) return CausalClass::Spacelike;
  for (auto l : spec.lambdas)
    if (std::abs(l.imag()) > tol.rel_real * hi) return CausalClass::Lightlike;
  return CausalClass::Timelike;
}

double lagrangian(const ProductSpectrum& spec, int n, const Tolerances& tol) {
  require(spec.lambdas.size() == static_cast<std::size_t>(2 * n), "lagrangian: spectrum size != 2n");
  if (classify(spec, tol) == CausalClass::Spacelike) return 0.0;
  double s = 0.0;
  for (auto li : spec.lambdas)
    for (auto lj : spec.lambdas) {
      double d = std::abs(li) - std::abs(lj);
      s += d * d;
    }
  return s / (4.0 * n);
}

double boundedness_integrand(const ProductSpectrum& spec) {
  double s = 0.0;
  for (auto l : spec.lambdas) s += std::abs(l);
  return s * s;
}

DiscreteCFS::DiscreteCFS(std::vector<SpacetimePoint> points, std::vector<double> weights, Tolerances tol)
    : points_(std::move(points)), weights_(std::move(weights)), tol_(tol) {
  tol_.validate();
  require(!points_.empty(), "a CFS needs at least one point");
  require(points_.size() == weights_.size(), "point and weight counts differ");
  n_ = points_[0].spin_dim();
  N_ = points_[0].hilbert_dim();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].spin_dim() != n_ || points_[i].hilbert_dim() != N_) {
      std::ostringstream os;
      os << "point " << i << " has (n=" << points_[i].spin_dim() << ", N=" << points_[i].hilbert_dim()
         << "), expected (n=" << n_ << ", N=" << N_ << ")";
      fail(ErrorKind::Structural, os.str());
    }
    if (!(std::isfinite(weights_[i]) && weights_[i] > 0.0)) {
      std::ostringstream os;
      os << "weight " << i << " must be finite and positive";
      fail(ErrorKind::Structural, os.str());
    }
  }
}

DiscreteCFS DiscreteCFS::with_weights(std::vector<double> weights) const {
  return DiscreteCFS(points_, std::move(weights), tol_);
}

DiscreteCFS DiscreteCFS::with_tolerances(Tolerances tol) const { return DiscreteCFS(points_, weights_, tol); }

static PairData make_pair(ProductSpectrum spec, int n, const Tolerances& tol) {
  PairData d;
  d.cls = classify(spec, tol);
  d.lagrangian = lagrangian(spec, n, tol);
  d.boundedness = boundedness_integrand(spec);
  d.spectrum = std::move(spec);
  return d;
}

PairData pair_data(const DiscreteCFS& cfs, std::size_t i, std::size_t j) {
  return make_pair(product_spectrum(cfs.point(i), cfs.point(j)), cfs.spin_dim(), cfs.tolerances());
}

std::vector<PairData> pair_table(const DiscreteCFS& cfs, const ParallelOptions& par) {
  const std::size_t m = cfs.size();
  std::vector<PairData> table(m * m);
  // upper triangle only; the (j, i) spectrum is the conjugate of (i, j)
  std::vector<std::pair<std::size_t, std::size_t>> work;
  work.reserve(m * (m + 1) / 2);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) work.emplace_back(i, j);
  parallel_for(work.size(), par.threads, [&](std::size_t k) {
    auto [i, j] = work[k];
    table[i * m + j] = pair_data(cfs, i, j);
  });
  for (auto [i, j] : work) {
    if (i == j) continue;
    const PairData& up = table[i * m + j];
    ProductSpectrum conj = up.spectrum;
    for (auto& l : conj.lambdas) l = std::conj(l);
    detail::sort_spectrum(conj.lambdas);
    PairData lo;
    lo.spectrum = std::move(conj);
    lo.cls = up.cls;
    lo.lagrangian = up.lagrangian;
    lo.boundedness = up.boundedness;
    table[j * m + i] = std::move(lo);
  }
  return table;
}

ActionReport action(const DiscreteCFS& cfs, const ParallelOptions& par) {
  const std::size_t m = cfs.size();
  auto table = pair_table(cfs, par);
  std::vector<double> lag(m * m), bnd(m * m), tr(m);
  for (std::size_t i = 0; i < m; ++i) {
    tr[i] = cfs.weight(i) * cfs.point(i).trace();
    for (std::size_t j = 0; j < m; ++j) {
      double ww = cfs.weight(i) * cfs.weight(j);
      lag[i * m + j] = ww * table[i * m + j].lagrangian;
      bnd[i * m + j] = ww * table[i * m + j].boundedness;
    }
  }
  ActionReport r;
  r.action = pairwise_sum(lag);
  r.boundedness = pairwise_sum(bnd);
  r.volume = pairwise_sum(cfs.weights());
  r.trace = pairwise_sum(tr);
  return r;
}

static double el_from_row(const DiscreteCFS& cfs, std::size_t idx, const PairData* row, const ELParams& p) {
  const std::size_t m = cfs.size();
  std::vector<double> lag(m), bnd(m);
  for (std::size_t j = 0; j < m; ++j) {
    lag[j] = cfs.weight(j) * row[j].lagrangian;
    bnd[j] = cfs.weight(j) * row[j].boundedness;
  }
  return pairwise_sum(lag) + p.kappa * pairwise_sum(bnd) - p.r_tr * cfs.point(idx).trace() - p.s_vol;
}

static void check_el(const ELParams& p) {
  require(std::isfinite(p.kappa) && std::isfinite(p.r_tr) && std::isfinite(p.s_vol),
          "EL parameters must be finite");
  require(p.kappa >= 0.0, "kappa must be non-negative");
}

double el_function(const DiscreteCFS& cfs, std::size_t idx, const ELParams& params) {
  check_el(params);
  require(idx < cfs.size(), "el_function: point index out of range");
  std::vector<PairData> row;
  row.reserve(cfs.size());
  for (std::size_t j = 0; j < cfs.size(); ++j) row.push_back(pair_data(cfs, idx, j));
  return el_from_row(cfs, idx, row.data(), params);
}

std::vector<double> el_residuals(const DiscreteCFS& cfs, const ELParams& params, const ParallelOptions& par) {
  check_el(params);
  auto table = pair_table(cfs, par);
  std::vector<double> out(cfs.size());
  for (std::size_t i = 0; i < cfs.size(); ++i) out[i] = el_from_row(cfs, i, &table[i * cfs.size()], params);
  return out;
}

CMatrix spin_projection(const SpacetimePoint& p, const Tolerances& tol) {
  CMatrix v = detail::spin_basis(p, tol);
  if (v.cols() == 0) return CMatrix::Zero(p.hilbert_dim(), p.hilbert_dim());
  return v * v.adjoint();
}

Inertia inertia(const SpacetimePoint& p, const Tolerances& tol) {
  const auto& e = detail::point_eigen(p);
  Inertia r;
  double cut = tol.tol_rank * e.radius;
  if (e.radius == 0.0) return r;
  for (Eigen::Index k = 0; k < e.values.size(); ++k) {
    if (e.values[k] > cut) ++r.positive;
    else if (e.values[k] < -cut) ++r.negative;
  }
  return r;
}

}  // namespace cfslab
