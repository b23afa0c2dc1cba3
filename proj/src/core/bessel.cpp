#include "cfslab/bessel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cfslab/errors.hpp"

namespace cfslab {

namespace {

using C = std::complex<double>;

constexpr double kSeriesRadius = 2.0;
// e^{-z} is below the smallest normal double past this point
constexpr double kUnderflowRe = 705.0;

// Ascending series, |z| <= 2. The logarithmic terms make K_0 the anchor.
void series(C z, C& k0, C& k1) {
  const double gamma = std::numbers::egamma;
  C y = 0.25 * z * z;
  C lg = std::log(0.5 * z);
  C i0 = 0.0, s0 = 0.0, i1 = 0.0, s1 = 0.0;
  C t0 = 1.0;        // y^k / (k!)^2
  C t1 = 1.0;        // y^k / (k! (k+1)!)
  double hk = 0.0;   // harmonic number H_k
  for (int k = 0; k < 60; ++k) {
    if (k > 0) {
      t0 *= y / double(k * k);
      t1 *= y / double(k * (k + 1));
      hk += 1.0 / k;
    }
    double psi1 = hk - gamma;                 // psi(k+1)
    double psi2 = hk + 1.0 / (k + 1) - gamma; // psi(k+2)
    i0 += t0;
    s0 += hk * t0;
    i1 += t1;
    s1 += (psi1 + psi2) * t1;
    if (k > 2 && std::abs(t0) < 1e-18 * std::abs(i0) && std::abs(t1) < 1e-18 * std::abs(i1)) break;
  }
  k0 = -(lg + gamma) * i0 + s0;
  k1 = 1.0 / z + lg * (0.5 * z * i1) - 0.25 * z * s1;
}

// Steed's method on the second continued fraction (Temme), nu = 0.
void cf2(C x, C& k0, C& k1) {
  const double a1 = 0.25;
  C b = 2.0 * (1.0 + x);
  C d = 1.0 / b;
  C h = d, delh = d;
  C q1 = 0.0, q2 = 1.0;
  C q = a1;
  double c = a1;
  double a = -a1;
  C s = 1.0 + q * delh;
  int i = 2;
  for (; i < 100000; ++i) {
    a -= 2.0 * (i - 1);
    c = -a * c / i;
    C qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    C dels = q * delh;
    s += dels;
    if (std::abs(dels) < 1e-17 * std::abs(s)) break;
  }
  if (i >= 100000) {
    std::ostringstream os;
    os << "Bessel K continued fraction did not converge at z = " << x;
    fail(ErrorKind::Numerical, os.str());
  }
  h *= a1;
  k0 = std::sqrt(std::numbers::pi / (2.0 * x)) * std::exp(-x) / s;
  k1 = k0 * (x + 0.5 - h) / x;
}

}  // namespace

BesselK012 bessel_k012(C z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) fail(ErrorKind::Domain, "Bessel K: non-finite argument");
  if (z == C(0.0, 0.0)) fail(ErrorKind::Domain, "Bessel K: z = 0 is a pole");
  if (z.real() < 0.0) {
    std::ostringstream os;
    os << "Bessel K: argument " << z << " is outside Re z >= 0";
    fail(ErrorKind::Domain, os.str());
  }
  BesselK012 r;
  if (z.real() > kUnderflowRe) {
    r.k0 = r.k1 = r.k2 = 0.0;
    r.underflow = true;
    return r;
  }
  if (std::abs(z) <= kSeriesRadius)
    series(z, r.k0, r.k1);
  else
    cf2(z, r.k0, r.k1);
  r.k2 = r.k0 + 2.0 * r.k1 / z;
  return r;
}

C bessel_k(int nu, C z, bool* underflow) {
  if (nu < 0 || nu > 2) fail(ErrorKind::Domain, "Bessel K: order must be 0, 1 or 2");
  BesselK012 r = bessel_k012(z);
  if (underflow) *underflow = r.underflow;
  return nu == 0 ? r.k0 : nu == 1 ? r.k1 : r.k2;
}

}  // namespace cfslab
