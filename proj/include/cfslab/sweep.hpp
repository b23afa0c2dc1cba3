#pragma once

// Total-variance functional l_eps over a spacetime box, the regularization
// sweep and the log-log power-law fit.

#include <string>
#include <vector>

#include "cfslab/parallel.hpp"

namespace cfslab {

struct QuadSettings {
  double rel_tol = 1e-6;        // target for the outer (t) integral
  double inner_rel_tol = 1e-8;  // target for each r integral
  int base_panels = 2;          // equal pieces per breakpoint interval
  int max_depth = 40;
  std::size_t max_panels = 4000;

  void validate() const;
};

enum class Integrand {
  Displayed,   // 16 lambda^4 |alpha|^2 (X.X - eps^2 r^2)
  Lagrangian,  // 16 lambda^4 |alpha|^4 (X.X - eps^2 r^2), the pointwise Lagrangian
};

std::string to_string(Integrand i);
Integrand integrand_from_string(const std::string& s);

struct LEpsResult {
  double value = 0.0;
  double est_rel_err = 0.0;
  std::size_t n_evals = 0;
  bool converged = true;
};

/// Integrates over |t| < L, r < L with d^4y = 4 pi r^2 dr dt.
LEpsResult l_eps(double m, double eps, double box_len, const QuadSettings& quad,
                 Integrand integrand = Integrand::Displayed, bool sigma = false);

struct SweepConfig {
  double m = 1.0;
  std::vector<double> eps_list{1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4};  // values of m*eps
  double box_len = 5.0;                                                 // in units of 1/m
  QuadSettings quad;
  bool sigma = false;
  Integrand integrand = Integrand::Displayed;
  bool record_timing = false;  // timings make the CSV machine dependent
  ParallelOptions par;

  void validate() const;
};

struct SweepRow {
  double m_eps = 0.0;
  double l_eps = 0.0;
  double est_rel_err = 0.0;
  std::size_t n_evals = 0;
  double seconds = 0.0;
  bool ok = true;
  std::string error;
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

SweepResult run_sweep(const SweepConfig& cfg);

struct FitResult {
  double a = 0.0;
  double b = 0.0;
  double stderr_b = 0.0;
  double r2 = 0.0;
  std::size_t used = 0;
  std::vector<std::string> warnings;
};

/// Least squares on (log m_eps, log l_eps); rows with non-positive or
/// non-finite values are skipped with a warning.
FitResult power_fit(const SweepResult& res);

std::string sweep_csv(const SweepResult& res, bool with_seconds = false);
SweepResult parse_sweep_csv(const std::string& text);

std::string sweep_svg(const SweepResult& res, const FitResult* fit);

}  // namespace cfslab
