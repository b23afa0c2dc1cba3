#pragma once

// Modified Bessel functions of the second kind K_0, K_1, K_2 for complex
// argument with Re z >= 0.

#include <complex>

namespace cfslab {

struct BesselK012 {
  std::complex<double> k0, k1, k2;
  bool underflow = false;  // Re z too large, all values flushed to 0
};

/// Domain error for z = 0 or Re z < 0.
BesselK012 bessel_k012(std::complex<double> z);

/// nu in {0, 1, 2}.
std::complex<double> bessel_k(int nu, std::complex<double> z, bool* underflow = nullptr);

}  // namespace cfslab
