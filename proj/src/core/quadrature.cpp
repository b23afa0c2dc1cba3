#include "cfslab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "cfslab/errors.hpp"
#include "cfslab/parallel.hpp"

namespace cfslab {

namespace {

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights on the odd nodes.
constexpr double xgk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                           0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                           0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                           0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wgk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                           0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                           0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                           0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  double value, err, carried;
  int depth;
};

Panel gk15(const std::function<QuadValue(double)>& f, double a, double b, int depth) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  double fe[15];
  for (int j = 0; j < 7; ++j) {
    QuadValue lo = f(c - h * xgk[j]);
    QuadValue hi = f(c + h * xgk[j]);
    fv[2 * j] = lo.value;
    fv[2 * j + 1] = hi.value;
    fe[2 * j] = lo.err;
    fe[2 * j + 1] = hi.err;
  }
  QuadValue mid = f(c);
  fv[14] = mid.value;
  fe[14] = mid.err;

  double resk = wgk[7] * fv[14];
  double resg = wg[3] * fv[14];
  double resabs = std::abs(resk);
  double carried = wgk[7] * std::abs(fe[14]);
  for (int j = 0; j < 7; ++j) {
    double s = fv[2 * j] + fv[2 * j + 1];
    resk += wgk[j] * s;
    resabs += wgk[j] * (std::abs(fv[2 * j]) + std::abs(fv[2 * j + 1]));
    carried += wgk[j] * (std::abs(fe[2 * j]) + std::abs(fe[2 * j + 1]));
    if (j % 2 == 1) resg += wg[j / 2] * s;
  }
  double reskh = 0.5 * resk;
  double resasc = wgk[7] * std::abs(fv[14] - reskh);
  for (int j = 0; j < 7; ++j) resasc += wgk[j] * (std::abs(fv[2 * j] - reskh) + std::abs(fv[2 * j + 1] - reskh));

  const double ah = std::abs(h);
  double err = std::abs((resk - resg) * h);
  resasc *= ah;
  resabs *= ah;
  // QUADPACK's heuristic rescaling of |K - G|
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return Panel{a, b, resk * h, err, carried * ah, depth};
}

struct Worse {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.err != y.err) return x.err < y.err;
    return x.a > y.a;
  }
};

}  // namespace

QuadResult integrate_adaptive(const std::function<QuadValue(double)>& f, double a, double b,
                              std::vector<double> breakpoints, const AdaptiveOptions& opt) {
  require(std::isfinite(a) && std::isfinite(b) && a < b, "quadrature: need finite a < b");
  require(opt.initial_split >= 1, "quadrature: initial_split must be >= 1");
  std::vector<double> cuts{a};
  std::sort(breakpoints.begin(), breakpoints.end());
  for (double x : breakpoints)
    if (x > a && x < b && x > cuts.back()) cuts.push_back(x);
  cuts.push_back(b);

  QuadResult res;
  std::priority_queue<Panel, std::vector<Panel>, Worse> open;
  std::vector<Panel> done;
  double total = 0.0, total_err = 0.0;  // total_err excludes carried error, refinement cannot reduce it
  auto add = [&](const Panel& p) {
    total += p.value;
    total_err += p.err;
    res.n_evals += 15;
    if (p.depth >= opt.max_depth || p.err == 0.0)
      done.push_back(p);
    else
      open.push(p);
  };
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double w = (cuts[k + 1] - cuts[k]) / opt.initial_split;
    for (int s = 0; s < opt.initial_split; ++s) {
      double lo = cuts[k] + s * w;
      double hi = s + 1 == opt.initial_split ? cuts[k + 1] : lo + w;
      add(gk15(f, lo, hi, 0));
    }
  }

  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (!open.empty() && total_err > target()) {
    if (open.size() + done.size() >= opt.max_panels) break;
    Panel p = open.top();
    open.pop();
    double mid = 0.5 * (p.a + p.b);
    if (!(mid > p.a && mid < p.b)) {
      done.push_back(p);
      continue;
    }
    total -= p.value;
    total_err -= p.err;
    add(gk15(f, p.a, mid, p.depth + 1));
    add(gk15(f, mid, p.b, p.depth + 1));
  }

  while (!open.empty()) {
    done.push_back(open.top());
    open.pop();
  }
  // final sums in positional order; the running totals only steer refinement
  std::sort(done.begin(), done.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  std::vector<double> vals(done.size()), errs(done.size()), carried(done.size());
  for (std::size_t k = 0; k < done.size(); ++k) {
    vals[k] = done[k].value;
    errs[k] = done[k].err;
    carried[k] = done[k].carried;
  }
  res.value = pairwise_sum(vals);
  double own = pairwise_sum(errs), inner = pairwise_sum(carried);
  res.abs_err = own + inner;
  res.n_panels = done.size();
  double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(res.value));
  res.converged = own <= tol && inner <= tol;
  return res;
}

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                              std::vector<double> breakpoints, const AdaptiveOptions& opt) {
  std::function<QuadValue(double)> g = [&f](double x) { return QuadValue{f(x), 0.0}; };
  return integrate_adaptive(g, a, b, std::move(breakpoints), opt);
}

}  // namespace cfslab
