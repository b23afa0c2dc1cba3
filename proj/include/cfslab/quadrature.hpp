#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on [a, b] with interior
// breakpoints. The subdivision order depends only on the integrand values, so
// the result is reproducible bit for bit.

#include <cstddef>
#include <functional>
#include <vector>

namespace cfslab {

struct QuadValue {
  double value = 0.0;
  double err = 0.0;  // error already carried by the integrand (nested integrals)
};

struct QuadResult {
  double value = 0.0;
  double abs_err = 0.0;
  std::size_t n_evals = 0;    // integrand calls at this level
  std::size_t n_panels = 0;
  bool converged = true;
};

struct AdaptiveOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int initial_split = 1;        // equal pieces per breakpoint interval
  int max_depth = 50;           // bisections below an initial panel
  std::size_t max_panels = 20000;
};

/// f returns its own error estimate in QuadValue::err, which is integrated
/// with the Kronrod weights and added to the reported error.
QuadResult integrate_adaptive(const std::function<QuadValue(double)>& f, double a, double b,
                              std::vector<double> breakpoints, const AdaptiveOptions& opt);

/// Convenience overload for plain integrands.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              std::vector<double> breakpoints, const AdaptiveOptions& opt);

}  // namespace cfslab
