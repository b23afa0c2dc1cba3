#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cfslab/errors.hpp"
#include "cfslab/minkowski.hpp"
#include "cfslab/quadrature.hpp"
#include "cfslab/sweep.hpp"

using namespace cfslab;

TEST_CASE("adaptive quadrature on smooth and singular integrands") {
  AdaptiveOptions opt;
  auto r = integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, {}, opt);
  CHECK(r.value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r.converged);
  CHECK(r.n_evals == 15);

  auto s = integrate_adaptive([](double x) { return std::sqrt(x); }, 0.0, 1.0, {}, opt);
  CHECK(s.value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(s.converged);

  // kink at 0.3 is resolved immediately when it is a breakpoint
  auto f = [](double x) { return std::abs(x - 0.3); };
  auto k = integrate_adaptive(f, 0.0, 1.0, {0.3}, opt);
  CHECK(k.value == doctest::Approx(0.045 + 0.245).epsilon(1e-14));
  CHECK(k.n_panels == 2);

  AdaptiveOptions tight = opt;
  tight.max_panels = 3;
  auto cut = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {}, tight);
  CHECK_FALSE(cut.converged);

  CHECK_THROWS_AS(integrate_adaptive(f, 1.0, 0.0, {}, opt), Error);
}

TEST_CASE("carried error of a nested integrand is reported") {
  AdaptiveOptions opt;
  auto r = integrate_adaptive([](double x) { return QuadValue{std::cos(x), 1e-6}; }, 0.0, 1.0, {}, opt);
  CHECK(r.value == doctest::Approx(std::sin(1.0)).epsilon(1e-14));
  CHECK(r.abs_err >= 1e-6 * 0.999);
  CHECK_FALSE(r.converged);
}

TEST_CASE("quadrature is reproducible") {
  AdaptiveOptions opt;
  opt.rel_tol = 1e-12;
  auto g = [](double x) { return std::exp(-x) / std::sqrt(std::abs(x - 0.7) + 1e-9); };
  auto a = integrate_adaptive(g, 0.0, 2.0, {}, opt);
  auto b = integrate_adaptive(g, 0.0, 2.0, {}, opt);
  CHECK(a.value == b.value);
  CHECK(a.n_evals == b.n_evals);
}

TEST_CASE("l_eps") {
  QuadSettings q;
  auto a = l_eps(1.0, 1e-2, 5.0, q);
  CHECK(a.converged);
  CHECK(a.value > 0.0);
  // scipy dblquad reference of the same integral
  CHECK(a.value == doctest::Approx(5.1305056899e-08).epsilon(1e-8));

  // doubling the resolution moves the value by less than the reported error
  auto ref = l_eps(1.0, 1e-3, 5.0, q);
  QuadSettings fine = q;
  fine.base_panels = 2 * q.base_panels;
  auto dbl = l_eps(1.0, 1e-3, 5.0, fine);
  CHECK(std::abs(dbl.value - ref.value) / ref.value <= ref.est_rel_err);

  // eps enters only through m eps
  auto s = l_eps(2.0, 5e-3, 2.5, q);
  CHECK(s.value > 0.0);
  auto lag = l_eps(1.0, 1e-2, 5.0, q, Integrand::Lagrangian);
  CHECK(lag.value > 0.0);
  CHECK(lag.value != a.value);
  auto sig = l_eps(1.0, 1e-2, 5.0, q, Integrand::Displayed, true);
  // sigma divides by the box volume 2L * (4 pi / 3) L^3
  CHECK(sig.value == doctest::Approx(a.value / (2.0 * 5.0 * (4.0 * M_PI / 3.0) * 125.0)).epsilon(1e-12));

  CHECK_THROWS_AS(l_eps(1.0, 0.0, 5.0, q), Error);
  CHECK_THROWS_AS(l_eps(-1.0, 1e-2, 5.0, q), Error);
}

TEST_CASE("l_eps integrand vanishes on spacelike separations") {
  KernelParams p{1.0, 1e-2};
  for (double r : {0.5, 1.0, 3.0}) CHECK(kernel_row(0.3 * r, r, p).lagrangian == 0.0);
}

TEST_CASE("sweep") {
  SweepConfig cfg;
  cfg.eps_list.clear();
  CHECK(run_sweep(cfg).rows.empty());

  cfg.eps_list = {1e-1, 5e-2, 2e-2, 1e-2, 5e-3};
  auto res = run_sweep(cfg);
  REQUIRE(res.rows.size() == 5);
  for (std::size_t k = 1; k < 5; ++k) CHECK(res.rows[k].l_eps < res.rows[k - 1].l_eps);
  std::string csv = sweep_csv(res);
  CHECK(csv == sweep_csv(run_sweep(cfg)));
  cfg.par.threads = 3;
  CHECK(csv == sweep_csv(run_sweep(cfg)));
  CHECK(csv.rfind("m_eps,l_eps,est_rel_err,n_evals,seconds\n", 0) == 0);

  auto back = parse_sweep_csv(csv);
  REQUIRE(back.rows.size() == 5);
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(back.rows[k].l_eps == res.rows[k].l_eps);
    CHECK(back.rows[k].n_evals == res.rows[k].n_evals);
  }

  cfg.eps_list = {1e-2, 2e-2, 1.5e-2};
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.eps_list = {1e-2, -1e-3};
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("power fit") {
  SweepResult syn;
  for (double x : {1e-2, 5e-3, 2e-3, 1e-3, 5e-4}) syn.rows.push_back({x, 2.7e-8 * std::pow(x, 8)});
  auto f = power_fit(syn);
  CHECK(f.b == doctest::Approx(8.0).epsilon(1e-10));
  CHECK(f.a == doctest::Approx(2.7e-8).epsilon(1e-10));
  CHECK(f.r2 == doctest::Approx(1.0).epsilon(1e-12));

  SweepResult flat;
  for (double x : {1e-2, 5e-3, 2e-3}) flat.rows.push_back({x, 3.0});
  CHECK(std::abs(power_fit(flat).b) < 1e-12);

  // 1% multiplicative noise, many trials
  std::mt19937_64 rng(51);
  std::normal_distribution<double> noise(0.0, 0.01);
  int inside = 0;
  for (int t = 0; t < 200; ++t) {
    SweepResult n;
    for (double x : {1e-2, 5e-3, 2e-3, 1e-3, 5e-4, 2e-4, 1e-4}) n.rows.push_back({x, 2.7e-8 * std::pow(x, 8) * (1.0 + noise(rng))});
    auto g = power_fit(n);
    if (std::abs(g.b - 8.0) <= 3.0 * g.stderr_b) ++inside;
  }
  CHECK(inside >= 190);

  SweepResult bad = syn;
  bad.rows.push_back({1e-4, 0.0});
  auto fb = power_fit(bad);
  CHECK(fb.used == 5);
  CHECK(fb.warnings.size() == 1);

  SweepResult two;
  two.rows = {{1e-2, 1.0}, {1e-3, 2.0}};
  CHECK_THROWS_AS(power_fit(two), Error);
}

TEST_CASE("svg") {
  SweepResult syn;
  for (double x : {1e-2, 5e-3, 2e-3, 1e-3}) syn.rows.push_back({x, 2.7e-8 * std::pow(x, 8)});
  auto f = power_fit(syn);
  std::string svg = sweep_svg(syn, &f);
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("</svg>") != std::string::npos);
  CHECK(std::count(svg.begin(), svg.end(), '\n') > 4);
  CHECK(sweep_svg(syn, nullptr) != svg);
}

TEST_CASE("sweep csv parser") {
  CHECK_THROWS_AS(parse_sweep_csv("a,b\n1,2\n"), Error);
  CHECK_THROWS_AS(parse_sweep_csv("m_eps,l_eps,est_rel_err,n_evals,seconds\n0.1,x,0,1,\n"), Error);
  auto r = parse_sweep_csv("m_eps,l_eps,est_rel_err,n_evals,seconds\n0.1,2.5,1e-9,10,0.5\n");
  CHECK(r.rows.at(0).seconds == 0.5);
}
