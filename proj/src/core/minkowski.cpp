#include "cfslab/minkowski.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "cfslab/bessel.hpp"

namespace cfslab {

namespace {

constexpr double kPi = std::numbers::pi;
const Complex kI(0.0, 1.0);

struct Sep {
  double t;
  std::array<double, 3> d;
  double r2;
  double r;
};

Sep separation(const FourVector& x, const FourVector& y) {
  Sep s;
  s.t = y.t - x.t;
  s.r2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    s.d[i] = y.x[i] - x.x[i];
    s.r2 += s.d[i] * s.d[i];
  }
  s.r = std::sqrt(s.r2);
  return s;
}

Complex z_from_sep(const Sep& s, const KernelParams& p) {
  if (p.eps == 0.0 && s.t * s.t >= s.r2) {
    std::ostringstream os;
    os << "z_arg: separation (t=" << s.t << ", r=" << s.r
       << ") is not spacelike, the unregularized kernel sits on its branch cut; use eps > 0";
    fail(ErrorKind::Domain, os.str());
  }
  // -xi.xi = r^2 + eps^2 - t^2 + 2 i t eps
  Complex w(s.r2 + p.eps * p.eps - s.t * s.t, 2.0 * s.t * p.eps);
  return p.m * std::sqrt(w);
}

}  // namespace

void KernelParams::validate() const {
  require(std::isfinite(m) && m > 0.0, "kernel params: mass must be positive");
  require(std::isfinite(eps) && eps >= 0.0, "kernel params: eps must be non-negative");
}

double ChainCoeffs::XX() const { return X[0] * X[0] - X[1] * X[1] - X[2] * X[2] - X[3] * X[3]; }

double ChainCoeffs::gap() const { return XX() - eps * eps * r * r; }

double ChainCoeffs::gap_scale() const {
  return X[0] * X[0] + X[1] * X[1] + X[2] * X[2] + X[3] * X[3] + eps * eps * r * r;
}

Complex z_arg(const FourVector& x, const FourVector& y, const KernelParams& p) {
  p.validate();
  return z_from_sep(separation(x, y), p);
}

KernelValue alpha_beta(const FourVector& x, const FourVector& y, const KernelParams& p) {
  p.validate();
  Sep s = separation(x, y);
  KernelValue v;
  v.xi = {Complex(s.t, -p.eps), s.d[0], s.d[1], s.d[2]};
  v.z = z_from_sep(s, p);
  BesselK012 k = bessel_k012(v.z);
  v.underflow = k.underflow;
  const double c = 1.0 / (8.0 * kPi * kPi * kPi);
  const double m3 = p.m * p.m * p.m;
  v.alpha = c * m3 * p.m * k.k2 / (v.z * v.z);
  v.beta = c * m3 * k.k1 / v.z;
  return v;
}

CMatrix kernel_matrix(const FourVector& x, const FourVector& y, const KernelParams& p, const GammaBasis& g) {
  KernelValue v = alpha_beta(x, y, p);
  CMatrix k = v.beta * g.identity();
  // xi_mu gamma^mu with lowered index
  for (int mu = 0; mu < 4; ++mu) k += (kI * v.alpha * GammaBasis::metric(mu) * v.xi[mu]) * g.gamma(mu);
  return k;
}

ChainCoeffs chain_coeffs(const FourVector& x, const FourVector& y, const KernelParams& p) {
  p.validate();
  Sep s = separation(x, y);
  ChainCoeffs c;
  c.r = s.r;
  c.eps = p.eps;
  Complex z = z_from_sep(s, p);
  BesselK012 k = bessel_k012(z);
  const double cn = p.m * p.m * p.m * p.m / (8.0 * kPi * kPi * kPi);
  Complex alpha = cn * k.k2 / (z * z);
  c.alpha_abs2 = std::norm(alpha);
  if (k.underflow || c.alpha_abs2 == 0.0) {
    c.degenerate = true;
    c.alpha_abs2 = 0.0;
    return c;
  }
  // beta / alpha without forming the tiny alpha twice
  Complex q = z * k.k1 / (p.m * k.k2);
  // conj(xi_mu), lower index: (t + i eps, -dx)
  c.X[0] = (q * Complex(s.t, p.eps)).imag();
  for (int i = 0; i < 3; ++i) c.X[i + 1] = -q.imag() * s.d[i];
  for (int mu = 0; mu < 4; ++mu) c.a[mu] = 2.0 * c.alpha_abs2 * c.X[mu];
  for (int i = 0; i < 3; ++i) c.c0i[i] = 2.0 * c.alpha_abs2 * p.eps * s.d[i];
  c.b = c.alpha_abs2 * (s.t * s.t - s.r2 + p.eps * p.eps + std::norm(q));
  return c;
}

ChainEigenvalues chain_eigenvalues(const ChainCoeffs& c) {
  ChainEigenvalues e;
  // a.a - sum c_0i^2 = 4|alpha|^4 (X.X - eps^2 r^2); the factored form avoids
  // squaring the already tiny |alpha|^2 twice before subtracting
  e.discriminant = 4.0 * c.alpha_abs2 * c.alpha_abs2 * c.gap();
  if (e.discriminant >= 0.0) {
    double s = std::sqrt(e.discriminant);
    e.lambda_plus = c.b + s;
    e.lambda_minus = c.b - s;
  } else {
    double s = std::sqrt(-e.discriminant);
    e.lambda_plus = Complex(c.b, s);
    e.lambda_minus = Complex(c.b, -s);
    e.complex_pair = true;
  }
  return e;
}

CausalClass classify_continuum(const ChainCoeffs& c, const KernelParams& p, double band) {
  p.validate();
  if (c.degenerate) return CausalClass::Spacelike;
  double g = c.gap();
  double tol = band * c.gap_scale();
  if (g > tol) return CausalClass::Timelike;
  if (g < -tol) return CausalClass::Spacelike;
  return CausalClass::Lightlike;
}

double lagrangian_continuum(const ChainCoeffs& c, const KernelParams& p) {
  if (classify_continuum(c, p) != CausalClass::Timelike) return 0.0;
  return 16.0 * c.alpha_abs2 * c.alpha_abs2 * c.gap();
}

GammaBasis::GammaBasis() {
  using M = CMatrix;
  id_ = M::Identity(4, 4);
  const Complex i = kI;
  M s1(2, 2), s2(2, 2), s3(2, 2);
  s1 << 0, 1, 1, 0;
  s2 << 0, -i, i, 0;
  s3 << 1, 0, 0, -1;
  g_[0] = M::Zero(4, 4);
  g_[0].topLeftCorner(2, 2) = M::Identity(2, 2);
  g_[0].bottomRightCorner(2, 2) = -M::Identity(2, 2);
  const M* sig[3] = {&s1, &s2, &s3};
  for (int k = 0; k < 3; ++k) {
    g_[k + 1] = M::Zero(4, 4);
    g_[k + 1].topRightCorner(2, 2) = *sig[k];
    g_[k + 1].bottomLeftCorner(2, 2) = -*sig[k];
  }
  g5_ = i * g_[0] * g_[1] * g_[2] * g_[3];
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) s_[mu][nu] = (0.5 * i) * (g_[mu] * g_[nu] - g_[nu] * g_[mu]);

  // every entry is 0, +-1 or +-i, so the Clifford relations hold exactly
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = 0; nu < 4; ++nu) {
      M ac = g_[mu] * g_[nu] + g_[nu] * g_[mu];
      M want = (mu == nu ? 2.0 * metric(mu) : 0.0) * id_;
      if (ac != want) fail(ErrorKind::Numerical, "gamma matrices violate the Clifford algebra");
    }

  int k = 0;
  elems_[k++] = id_;
  elems_[k++] = i * g5_;
  for (int mu = 0; mu < 4; ++mu) elems_[k++] = g_[mu];
  for (int mu = 0; mu < 4; ++mu) elems_[k++] = g5_ * g_[mu];
  for (int mu = 0; mu < 4; ++mu)
    for (int nu = mu + 1; nu < 4; ++nu) elems_[k++] = s_[mu][nu];
}

const GammaBasis& GammaBasis::standard() {
  static const GammaBasis g;
  return g;
}

Complex DiracCoefficients::bilinear(int mu, int nu) const {
  require(0 <= mu && mu < nu && nu < 4, "bilinear index needs mu < nu");
  static constexpr int off[4] = {0, 3, 5, 6};
  return c[10 + off[mu] + (nu - mu - 1)];
}

CMatrix DiracCoefficients::reconstruct(const GammaBasis& g) const {
  CMatrix a = CMatrix::Zero(4, 4);
  for (int k = 0; k < 16; ++k) a += c[k] * g.elements()[k];
  return a;
}

DiracCoefficients dirac_decompose(const CMatrix& a, const GammaBasis& g) {
  require(a.rows() == 4 && a.cols() == 4, "dirac_decompose needs a 4x4 matrix");
  DiracCoefficients d;
  for (int k = 0; k < 16; ++k) {
    const CMatrix& e = g.elements()[k];
    // each element squares to +-1, so e^{-1} = (e^2)_{00} e
    double sq = (e * e)(0, 0).real();
    d.c[k] = sq * (e * a).trace() / 4.0;
  }
  return d;
}

VarianceCheck variance_identity_check(const FourVector& x, const FourVector& y, const KernelParams& p) {
  VarianceCheck v;
  ChainCoeffs c = chain_coeffs(x, y, p);
  v.lagrangian = lagrangian_continuum(c, p);
  // the variance is taken of the causal correlation operator, which is gated
  // to zero off the timelike region
  if (classify_continuum(c, p) == CausalClass::Timelike) {
    CMatrix a = kernel_matrix(x, y, p) * kernel_matrix(y, x, p);
    Complex b = a.trace() / 4.0;
    CMatrix d = a - b * CMatrix::Identity(4, 4);
    v.four_var = (d * d).trace().real();  // 4 * tr(...)/4
  }
  double scale = std::max(std::abs(v.lagrangian), std::abs(v.four_var));
  v.residual = scale > 0.0 ? std::abs(v.lagrangian - v.four_var) / scale : 0.0;
  return v;
}

double trace_normalization(const KernelParams& p) {
  p.validate();
  require(p.eps > 0.0, "trace_normalization needs eps > 0");
  return 8.0 * kPi * kPi * kPi * p.eps * p.eps / p.m;
}

KernelRow kernel_row(double t, double r, const KernelParams& p) {
  FourVector x, y;
  y.t = t;
  y.x = {r, 0.0, 0.0};
  KernelValue kv = alpha_beta(x, y, p);
  ChainCoeffs c = chain_coeffs(x, y, p);
  KernelRow row{t, r, p.eps, kv.alpha, kv.beta, c.b, c.XX(), classify_continuum(c, p), lagrangian_continuum(c, p)};
  return row;
}

std::string kernel_csv_header() {
  return "t,r,eps,re_alpha,im_alpha,re_beta,im_beta,b,X_dot_X,class,lagrangian";
}

std::string kernel_csv_line(const KernelRow& w) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s,%.17g", w.t, w.r,
                w.eps, w.alpha.real(), w.alpha.imag(), w.beta.real(), w.beta.imag(), w.b, w.XX,
                std::string(to_string(w.cls)).c_str(), w.lagrangian);
  return buf;
}

void SeaSampleConfig::validate() const {
  require(std::isfinite(box_len) && box_len > 0.0, "sea sample: box_len must be positive");
  require(std::isfinite(k_cut) && k_cut > 0.0, "sea sample: k_cut must be positive");
  require(std::isfinite(m) && m > 0.0, "sea sample: mass must be positive");
  require(std::isfinite(eps_soft) && eps_soft >= 0.0, "sea sample: eps_soft must be non-negative");
  require(!lattice.empty(), "sea sample: lattice is empty");
  require(max_entries > 0.0, "sea sample: budget must be positive");
  for (const auto& p : lattice)
    require(std::isfinite(p.t) && std::isfinite(p.x[0]) && std::isfinite(p.x[1]) && std::isfinite(p.x[2]),
            "sea sample: lattice point with non-finite coordinate");
}

namespace {

long max_index(double box_len, double k_cut) {
  return static_cast<long>(std::floor(k_cut * box_len / (2.0 * kPi)));
}

template <class F>
void for_each_mode(double box_len, double k_cut, F&& f) {
  const long nmax = max_index(box_len, k_cut);
  const double dk = 2.0 * kPi / box_len;
  const double kc2 = k_cut * k_cut * (1.0 + 1e-12);  // keep modes sitting exactly on the sphere
  for (long a = -nmax; a <= nmax; ++a)
    for (long b = -nmax; b <= nmax; ++b)
      for (long c = -nmax; c <= nmax; ++c) {
        double kx = dk * a, ky = dk * b, kz = dk * c;
        if (kx * kx + ky * ky + kz * kz <= kc2) f(kx, ky, kz);
      }
}

}  // namespace

std::size_t count_sea_modes(double box_len, double k_cut) {
  require(box_len > 0.0 && k_cut > 0.0, "count_sea_modes: box_len and k_cut must be positive");
  double cube = 2.0 * max_index(box_len, k_cut) + 1.0;
  if (cube * cube * cube > 1e10) fail(ErrorKind::Resource, "count_sea_modes: momentum lattice too large to enumerate");
  std::size_t n = 0;
  for_each_mode(box_len, k_cut, [&](double, double, double) { ++n; });
  return n;
}

DiscreteCFS dirac_sea_sample(const SeaSampleConfig& cfg) {
  cfg.validate();
  // rough estimate first so an absurd cutoff is refused before enumeration
  double nhat = max_index(cfg.box_len, cfg.k_cut);
  double rough = 2.0 * (4.0 / 3.0) * kPi * nhat * nhat * nhat * 4.0 * static_cast<double>(cfg.lattice.size());
  if (rough > 4.0 * cfg.max_entries) {
    std::ostringstream os;
    os << "sea sample: about " << rough << " wave-function entries requested, budget is " << cfg.max_entries;
    fail(ErrorKind::Resource, os.str());
  }
  struct Mode {
    double kx, ky, kz, w;
  };
  std::vector<Mode> modes;
  for_each_mode(cfg.box_len, cfg.k_cut, [&](double kx, double ky, double kz) {
    modes.push_back({kx, ky, kz, std::sqrt(cfg.m * cfg.m + kx * kx + ky * ky + kz * kz)});
  });
  require(!modes.empty(), "sea sample: no momentum modes below the cutoff");
  const int N = static_cast<int>(2 * modes.size());
  double entries = 4.0 * N * static_cast<double>(cfg.lattice.size());
  if (entries > cfg.max_entries) {
    std::ostringstream os;
    os << "sea sample: " << entries << " wave-function entries (N = " << N << ", " << cfg.lattice.size()
       << " points) exceed the budget of " << cfg.max_entries;
    fail(ErrorKind::Resource, os.str());
  }

  // negative-energy spinors: sqrt((w+m)/2w) (-sigma.k chi/(w+m), chi) / L^{3/2}
  CMatrix spin(4, N);
  const double vol = std::pow(cfg.box_len, 1.5);
  for (std::size_t q = 0; q < modes.size(); ++q) {
    const Mode& md = modes[q];
    double nrm = std::sqrt((md.w + cfg.m) / (2.0 * md.w)) / vol;
    Complex sk[2][2] = {{md.kz, Complex(md.kx, -md.ky)}, {Complex(md.kx, md.ky), -md.kz}};
    for (int s = 0; s < 2; ++s) {
      auto col = spin.col(static_cast<Eigen::Index>(2 * q + s));
      col(0) = -sk[0][s] / (md.w + cfg.m) * nrm;
      col(1) = -sk[1][s] / (md.w + cfg.m) * nrm;
      col(2) = s == 0 ? nrm : 0.0;
      col(3) = s == 1 ? nrm : 0.0;
    }
  }

  const SpinSignature sig(2);
  std::vector<SpacetimePoint> pts;
  pts.reserve(cfg.lattice.size());
  std::vector<CMatrix> evals(cfg.lattice.size());
  parallel_for(cfg.lattice.size(), cfg.threads, [&](std::size_t li) {
    const FourVector& x = cfg.lattice[li];
    CMatrix psi(4, N);
    for (std::size_t q = 0; q < modes.size(); ++q) {
      const Mode& md = modes[q];
      double ph = md.w * x.t + md.kx * x.x[0] + md.ky * x.x[1] + md.kz * x.x[2];
      Complex f = std::polar(std::exp(-0.5 * md.w * cfg.eps_soft), ph);
      for (int s = 0; s < 2; ++s) {
        auto c = static_cast<Eigen::Index>(2 * q + s);
        psi.col(c) = f * spin.col(c);
      }
    }
    evals[li] = std::move(psi);
  });
  for (auto& e : evals) pts.emplace_back(WaveEval(std::move(e)), sig);
  std::vector<double> w(pts.size(), 1.0 / static_cast<double>(pts.size()));
  return DiscreteCFS(std::move(pts), std::move(w));
}

CMatrix sea_continuum_kernel(const FourVector& x, const FourVector& y, const KernelParams& p) {
  const GammaBasis& g = GammaBasis::standard();
  return 2.0 * kPi * g.gamma5() * kernel_matrix(x, y, p, g) * g.gamma5();
}

}  // namespace cfslab
