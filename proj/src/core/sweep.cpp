#include "cfslab/sweep.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "cfslab/errors.hpp"
#include "cfslab/minkowski.hpp"
#include "cfslab/quadrature.hpp"

namespace cfslab {

void QuadSettings::validate() const {
  require(std::isfinite(rel_tol) && rel_tol > 0.0 && rel_tol < 1.0, "quad: rel_tol must lie in (0, 1)");
  require(std::isfinite(inner_rel_tol) && inner_rel_tol > 0.0 && inner_rel_tol < 1.0,
          "quad: inner_rel_tol must lie in (0, 1)");
  require(base_panels >= 1 && base_panels <= 1000, "quad: base_panels must lie in [1, 1000]");
  require(max_depth >= 1 && max_depth <= 60, "quad: max_depth must lie in [1, 60]");
  require(max_panels >= 1, "quad: max_panels must be positive");
}

std::string to_string(Integrand i) { return i == Integrand::Displayed ? "displayed" : "lagrangian"; }

Integrand integrand_from_string(const std::string& s) {
  if (s == "displayed") return Integrand::Displayed;
  if (s == "lagrangian") return Integrand::Lagrangian;
  fail(ErrorKind::Parse, "unknown integrand '" + s + "' (expected displayed or lagrangian)");
}

LEpsResult l_eps(double m, double eps, double box_len, const QuadSettings& quad, Integrand integrand, bool sigma) {
  require(std::isfinite(m) && m > 0.0, "l_eps: mass must be positive");
  require(std::isfinite(eps) && eps > 0.0, "l_eps: eps must be positive");
  require(std::isfinite(box_len) && box_len > 0.0, "l_eps: box_len must be positive");
  quad.validate();
  const KernelParams par{m, eps};
  const double L = box_len;
  std::size_t inner_evals = 0;

  // |alpha|^p (X.X - eps^2 r^2) r^2 on the timelike region
  auto density = [&](double t, double r) {
    FourVector x, y;
    y.t = t;
    y.x = {r, 0.0, 0.0};
    ChainCoeffs c = chain_coeffs(x, y, par);
    ++inner_evals;
    if (classify_continuum(c, par) != CausalClass::Timelike) return 0.0;
    double w = integrand == Integrand::Displayed ? c.alpha_abs2 : c.alpha_abs2 * c.alpha_abs2;
    return w * c.gap() * r * r;
  };

  AdaptiveOptions inner_opt;
  inner_opt.rel_tol = quad.inner_rel_tol;
  inner_opt.initial_split = quad.base_panels;
  inner_opt.max_depth = quad.max_depth;
  inner_opt.max_panels = quad.max_panels;
  bool inner_ok = true;

  auto inner = [&](double t) -> QuadValue {
    // geometric breakpoints toward the light cone r = t
    std::vector<double> bp{t};
    for (double d = eps; d < t; d *= 2.0) bp.push_back(t - d);
    for (double d = eps; d < 8.0 * eps; d *= 2.0) bp.push_back(t + d);
    QuadResult q = integrate_adaptive(std::function<double(double)>([&](double r) { return density(t, r); }), 0.0,
                                      L, std::move(bp), inner_opt);
    inner_ok = inner_ok && q.converged;
    return {q.value, q.abs_err};
  };

  AdaptiveOptions outer_opt = inner_opt;
  outer_opt.rel_tol = quad.rel_tol;
  std::vector<double> bp;
  for (double d = eps; d < L; d *= 2.0) bp.push_back(d);
  QuadResult q = integrate_adaptive(std::function<QuadValue(double)>(inner), 0.0, L, std::move(bp), outer_opt);

  const double lam = trace_normalization(par);
  const double lam2 = lam * lam;
  // 16 lambda^4, 4 pi from the angles, 2 from t -> -t
  double pref = 16.0 * lam2 * lam2 * 4.0 * std::numbers::pi * 2.0;
  if (sigma) pref /= 2.0 * L * (4.0 * std::numbers::pi / 3.0) * L * L * L;

  LEpsResult r;
  r.value = pref * q.value;
  r.est_rel_err = q.value != 0.0 ? q.abs_err / std::abs(q.value) : 0.0;
  r.n_evals = inner_evals;
  r.converged = q.converged && inner_ok;
  return r;
}

void SweepConfig::validate() const {
  require(std::isfinite(m) && m > 0.0, "sweep: mass must be positive");
  require(std::isfinite(box_len) && box_len > 0.0, "sweep: box_len must be positive");
  quad.validate();
  for (double e : eps_list) require(std::isfinite(e) && e > 0.0, "sweep: eps_list entries must be positive");
  if (eps_list.size() > 1) {
    bool up = true, down = true;
    for (std::size_t k = 1; k < eps_list.size(); ++k) {
      up = up && eps_list[k] > eps_list[k - 1];
      down = down && eps_list[k] < eps_list[k - 1];
    }
    require(up || down, "sweep: eps_list must be strictly sorted");
  }
}

SweepResult run_sweep(const SweepConfig& cfg) {
  cfg.validate();
  SweepResult res;
  res.rows.resize(cfg.eps_list.size());
  parallel_for(cfg.eps_list.size(), cfg.par.threads, [&](std::size_t k) {
    SweepRow& row = res.rows[k];
    row.m_eps = cfg.eps_list[k];
    auto t0 = std::chrono::steady_clock::now();
    try {
      LEpsResult r = l_eps(cfg.m, cfg.eps_list[k] / cfg.m, cfg.box_len / cfg.m, cfg.quad, cfg.integrand, cfg.sigma);
      row.l_eps = r.value;
      row.est_rel_err = r.est_rel_err;
      row.n_evals = r.n_evals;
      if (!r.converged) {
        row.ok = false;
        row.error = "quadrature did not reach the requested tolerance";
      }
    } catch (const std::exception& e) {
      row.ok = false;
      row.l_eps = std::nan("");
      row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  });
  return res;
}

FitResult power_fit(const SweepResult& res) {
  FitResult f;
  std::vector<double> xs, ys;
  for (const auto& row : res.rows) {
    if (!(std::isfinite(row.m_eps) && row.m_eps > 0.0 && std::isfinite(row.l_eps) && row.l_eps > 0.0)) {
      std::ostringstream os;
      os << "row m_eps=" << row.m_eps << " skipped: non-positive or non-finite value";
      f.warnings.push_back(os.str());
      continue;
    }
    xs.push_back(std::log(row.m_eps));
    ys.push_back(std::log(row.l_eps));
  }
  f.used = xs.size();
  if (xs.size() < 3) {
    std::ostringstream os;
    os << "power_fit needs at least 3 usable rows, got " << xs.size();
    fail(ErrorKind::Numerical, os.str());
  }
  const double n = static_cast<double>(xs.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    xm += xs[k];
    ym += ys[k];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double dx = xs[k] - xm, dy = ys[k] - ym;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) fail(ErrorKind::Numerical, "power_fit: all m_eps values coincide");
  f.b = sxy / sxx;
  double icpt = ym - f.b * xm;
  f.a = std::exp(icpt);
  double ssr = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double e = ys[k] - (icpt + f.b * xs[k]);
    ssr += e * e;
  }
  f.stderr_b = std::sqrt(ssr / (n - 2.0) / sxx);
  f.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return f;
}

std::string sweep_csv(const SweepResult& res, bool with_seconds) {
  std::string out = "m_eps,l_eps,est_rel_err,n_evals,seconds\n";
  char buf[256];
  for (const auto& r : res.rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%zu,", r.m_eps, r.l_eps, r.est_rel_err, r.n_evals);
    out += buf;
    if (with_seconds) {
      std::snprintf(buf, sizeof buf, "%.6f", r.seconds);
      out += buf;
    }
    out += "\n";
  }
  return out;
}

namespace {

double parse_num(const std::string& s, int line, const char* col) {
  if (s.empty()) return std::nan("");
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    if (s == "nan" || s == "-nan") return std::nan("");
    std::ostringstream os;
    os << "sweep csv line " << line << ": column " << col << " is not a number: '" << s << "'";
    fail(ErrorKind::Parse, os.str());
  }
}

}  // namespace

SweepResult parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int ln = 0;
  SweepResult res;
  if (!std::getline(in, line)) fail(ErrorKind::Parse, "sweep csv: empty input");
  ++ln;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "m_eps,l_eps,est_rel_err,n_evals,seconds")
    fail(ErrorKind::Parse, "sweep csv line 1: unexpected header '" + line + "'");
  static const char* cols[5] = {"m_eps", "l_eps", "est_rel_err", "n_evals", "seconds"};
  while (std::getline(in, line)) {
    ++ln;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) f.push_back(cell);
    if (line.back() == ',') f.push_back("");
    if (f.size() != 5) {
      std::ostringstream os;
      os << "sweep csv line " << ln << ": expected 5 fields, got " << f.size();
      fail(ErrorKind::Parse, os.str());
    }
    SweepRow r;
    r.m_eps = parse_num(f[0], ln, cols[0]);
    r.l_eps = parse_num(f[1], ln, cols[1]);
    r.est_rel_err = parse_num(f[2], ln, cols[2]);
    double ne = parse_num(f[3], ln, cols[3]);
    r.n_evals = std::isfinite(ne) && ne >= 0 ? static_cast<std::size_t>(ne) : 0;
    double sec = parse_num(f[4], ln, cols[4]);
    r.seconds = std::isfinite(sec) ? sec : 0.0;
    r.ok = std::isfinite(r.l_eps);
    res.rows.push_back(r);
  }
  return res;
}

std::string sweep_svg(const SweepResult& res, const FitResult* fit) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : res.rows)
    if (r.m_eps > 0 && r.l_eps > 0 && std::isfinite(r.l_eps)) pts.emplace_back(std::log10(r.m_eps), std::log10(r.l_eps));
  const double W = 640, H = 480, ml = 80, mr = 20, mt = 30, mb = 60;
  double x0 = -1, x1 = 0, y0 = -1, y1 = 0;
  if (!pts.empty()) {
    x0 = x1 = pts[0].first;
    y0 = y1 = pts[0].second;
    for (auto [x, y] : pts) {
      x0 = std::min(x0, x); x1 = std::max(x1, x);
      y0 = std::min(y0, y); y1 = std::max(y1, y);
    }
  }
  x0 = std::floor(x0); x1 = std::ceil(x1);
  y0 = std::floor(y0); y1 = std::ceil(y1);
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * (W - ml - mr); };
  auto py = [&](double y) { return H - mb - (y - y0) / (y1 - y0) * (H - mt - mb); };

  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << H - mb << "\" x2=\"" << W - mr << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  s << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\"" << H - mb << "\" stroke=\"black\"/>\n";
  // decade ticks; thin out when there are many
  int xstep = std::max(1, static_cast<int>((x1 - x0) / 10));
  for (int e = static_cast<int>(x0); e <= static_cast<int>(x1); e += xstep)
    s << "<text x=\"" << px(e) << "\" y=\"" << H - mb + 18 << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  int ystep = std::max(1, static_cast<int>((y1 - y0) / 10));
  for (int e = static_cast<int>(y0); e <= static_cast<int>(y1); e += ystep)
    s << "<text x=\"" << ml - 6 << "\" y=\"" << py(e) + 4 << "\" text-anchor=\"end\">1e" << e << "</text>\n";
  s << "<text x=\"" << (ml + W - mr) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">m eps</text>\n";
  s << "<text x=\"18\" y=\"" << (mt + H - mb) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
    << (mt + H - mb) / 2 << ")\">l_eps</text>\n";
  if (fit) {
    double ya = std::log10(fit->a) + fit->b * x0, yb = std::log10(fit->a) + fit->b * x1;
    s << "<line x1=\"" << px(x0) << "\" y1=\"" << py(ya) << "\" x2=\"" << px(x1) << "\" y2=\"" << py(yb)
      << "\" stroke=\"#c33\" stroke-width=\"1.5\"/>\n";
    char buf[128];
    std::snprintf(buf, sizeof buf, "fit: a = %.3g, b = %.4f +- %.2g", fit->a, fit->b, fit->stderr_b);
    s << "<text x=\"" << ml + 10 << "\" y=\"" << mt + 10 << "\">" << buf << "</text>\n";
  }
  for (auto [x, y] : pts) s << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y) << "\" r=\"4\" fill=\"#236\"/>\n";
  s << "</svg>\n";
  return s.str();
}

}  // namespace cfslab
