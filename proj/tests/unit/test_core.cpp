#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>

#include "cfslab/core.hpp"
#include "support.hpp"

using namespace cfslab;
using cfstest::make_point;
using cfstest::random_matrix;

namespace {

CMatrix S(int n) { return SpinSignature(n).matrix(); }

ProductSpectrum spec(std::vector<Complex> l) { return ProductSpectrum{std::move(l)}; }

}  // namespace

TEST_CASE("point operator: trivial cases") {
  auto z = make_point(CMatrix::Zero(4, 6), 2);
  CHECK(z.dense().norm() == 0.0);
  CHECK(inertia(z).rank() == 0);
  CHECK(z.trace() == 0.0);

  auto p = make_point(CMatrix::Identity(4, 4), 2);
  CHECK((p.dense() + S(2)).norm() == 0.0);
  auto in = inertia(p);
  CHECK(in.positive == 2);
  CHECK(in.negative == 2);
}

TEST_CASE("point operator: random 4x8 against brute force") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 20; ++rep) {
    CMatrix psi = random_matrix(rng, 4, 8);
    auto p = make_point(psi, 2);
    CMatrix direct = -psi.adjoint() * S(2) * psi;
    CHECK((p.dense() - direct).norm() <= 1e-13 * direct.norm());
    CHECK(std::abs(p.trace() - direct.trace().real()) <= 1e-12 * direct.norm());

    Eigen::SelfAdjointEigenSolver<CMatrix> es(direct);
    double scale = es.eigenvalues().cwiseAbs().maxCoeff();
    int pos = 0, neg = 0;
    for (int k = 0; k < 8; ++k) {
      if (es.eigenvalues()(k) > 1e-10 * scale) ++pos;
      if (es.eigenvalues()(k) < -1e-10 * scale) ++neg;
    }
    auto in = inertia(p);
    CHECK(in.positive == pos);
    CHECK(in.negative == neg);
    CHECK(pos <= 2);
    CHECK(neg <= 2);
  }
}

TEST_CASE("point operator: low-rank eigen path agrees with dense path") {
  std::mt19937_64 rng(12);
  // N > 2n takes the thin-QR route; compare the projection with a dense one
  CMatrix psi = random_matrix(rng, 4, 3) * random_matrix(rng, 3, 9);
  auto p = make_point(psi, 2);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(p.dense());
  double scale = es.eigenvalues().cwiseAbs().maxCoeff();
  CMatrix proj = CMatrix::Zero(9, 9);
  for (int k = 0; k < 9; ++k)
    if (std::abs(es.eigenvalues()(k)) > 1e-10 * scale) proj += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
  CHECK((spin_projection(p) - proj).norm() < 1e-10);
  CHECK(inertia(p).rank() == 3);
}

TEST_CASE("wave evaluation shape checks") {
  CHECK_THROWS_AS(make_point(CMatrix::Zero(3, 4), 2), Error);
  CHECK_THROWS_AS(SpinSignature(0), Error);
  CMatrix bad = CMatrix::Zero(4, 4);
  bad(0, 0) = Complex(std::nan(""), 0.0);
  CHECK_THROWS_AS(make_point(bad, 2), Error);
}

TEST_CASE("kernel") {
  std::mt19937_64 rng(13);
  auto z = make_point(CMatrix::Zero(4, 5), 2);
  auto x = make_point(random_matrix(rng, 4, 5), 2);
  CHECK(kernel(z, x).norm() == 0.0);

  auto id = make_point(CMatrix::Identity(4, 4), 2);
  CHECK((kernel(id, id) + S(2)).norm() == 0.0);

  for (int rep = 0; rep < 10; ++rep) {
    CMatrix px = random_matrix(rng, 4, 7), py = random_matrix(rng, 4, 7);
    auto a = make_point(px, 2), b = make_point(py, 2);
    // column by column: -sum_i psi_i(x) psi_i(y)^bar, with psi^bar = psi^dagger S
    CMatrix sum = CMatrix::Zero(4, 4);
    for (int i = 0; i < 7; ++i) sum -= px.col(i) * (py.col(i).adjoint() * S(2));
    CMatrix k = kernel(a, b);
    CHECK((k - sum).norm() <= 1e-13 * sum.norm());
    CHECK((spin_adjoint(k, SpinSignature(2)) - kernel(b, a)).norm() <= 1e-13 * sum.norm());
    CMatrix chain = closed_chain(a, b);
    CHECK((chain - k * kernel(b, a)).norm() <= 1e-13 * chain.norm());
  }
}

TEST_CASE("closed chain and product spectrum") {
  auto id1 = make_point(CMatrix::Identity(2, 2), 1);
  CHECK((closed_chain(id1, id1) - CMatrix::Identity(2, 2)).norm() == 0.0);
  auto s = product_spectrum(id1, id1);
  REQUIRE(s.lambdas.size() == 2);
  CHECK(std::abs(s.lambdas[0] - 1.0) < 1e-15);
  CHECK(std::abs(s.lambdas[1] - 1.0) < 1e-15);

  // dense eigenvalues {nu1, -nu2} paired with itself
  const double nu1 = 3.0, nu2 = 0.5;
  CMatrix psi = CMatrix::Zero(2, 2);
  psi(0, 0) = std::sqrt(nu2);
  psi(1, 1) = std::sqrt(nu1);
  auto p = make_point(psi, 1);
  auto sp = product_spectrum(p, p);
  CHECK(std::abs(sp.lambdas[0] - nu2 * nu2) < 1e-14);
  CHECK(std::abs(sp.lambdas[1] - nu1 * nu1) < 1e-13);

  std::mt19937_64 rng(14);
  for (int rep = 0; rep < 20; ++rep) {
    int n = 1 + rep % 3, N = 2 * n + rep % 5;
    int rank = 1 + static_cast<int>(rng() % (2 * n));
    auto a = make_point(random_matrix(rng, 2 * n, rank) * random_matrix(rng, rank, N), n);
    auto b = make_point(random_matrix(rng, 2 * n, N), n);
    auto ps = product_spectrum(a, b);
    Eigen::ComplexEigenSolver<CMatrix> es(a.dense() * b.dense());
    std::vector<Complex> dense(es.eigenvalues().data(), es.eigenvalues().data() + N);
    std::sort(dense.begin(), dense.end(), [](Complex u, Complex v) { return std::abs(u) > std::abs(v); });
    dense.resize(2 * n);
    double radius = ps.spectral_radius();
    CHECK(cfstest::match_distance(ps.lambdas, dense) <= 1e-9 * radius);
  }
}

TEST_CASE("classification rules") {
  CHECK(classify(spec({1.0, -1.0, Complex(0, 1), Complex(0, -1)})) == CausalClass::Spacelike);
  CHECK(classify(spec({4.0, 1.0, 1.0, 4.0})) == CausalClass::Timelike);
  CHECK(classify(spec({2.0, Complex(0, 1), 0.0, 0.0})) == CausalClass::Lightlike);
  CHECK(classify(spec({0.0, 0.0})) == CausalClass::Spacelike);
  CHECK(to_string(CausalClass::Timelike) == "timelike");
}

TEST_CASE("lagrangian and boundedness") {
  CHECK(lagrangian(spec({1.0, -1.0, Complex(0, 1), Complex(0, -1)}), 2) == 0.0);
  CHECK(lagrangian(spec({2.0, 0.0}), 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(lagrangian(spec({4.0, 1.0, 1.0, 4.0}), 2) == doctest::Approx(9.0).epsilon(1e-15));
  CHECK(boundedness_integrand(spec({0.0, 0.0})) == 0.0);
  CHECK(boundedness_integrand(spec({2.0, 0.0})) == 4.0);
  CHECK(boundedness_integrand(spec({4.0, 1.0, 1.0, 4.0})) == 100.0);
}

TEST_CASE("tolerances") {
  Tolerances t;
  CHECK_NOTHROW(t.validate());
  t.rel_eq = 0.0;
  CHECK_THROWS_AS(t.validate(), Error);
  t.rel_eq = 0.1;
  CHECK_THROWS_AS(t.validate(), Error);
}

TEST_CASE("discrete CFS construction") {
  std::mt19937_64 rng(15);
  std::vector<SpacetimePoint> pts{make_point(random_matrix(rng, 4, 6), 2), make_point(random_matrix(rng, 4, 5), 2)};
  CHECK_THROWS_AS(DiscreteCFS(pts, {1.0, 1.0}), Error);
  std::vector<SpacetimePoint> ok{make_point(random_matrix(rng, 4, 6), 2)};
  CHECK_THROWS_AS(DiscreteCFS(ok, {1.0, 1.0}), Error);
  CHECK_THROWS_AS(DiscreteCFS(ok, {-1.0}), Error);
  CHECK_THROWS_AS(DiscreteCFS({}, {}), Error);
}

TEST_CASE("action") {
  // a single point whose self chain has spectrum {nu^2, nu^2}
  CMatrix psi = CMatrix::Identity(2, 2) * 1.5;
  DiscreteCFS one({make_point(psi, 1)}, {1.0});
  CHECK(action(one).action == 0.0);

  std::mt19937_64 rng(16);
  auto cfs = cfstest::random_cfs(rng, 2, 6, 5);
  // independent double loop
  double brute = 0.0, bnd = 0.0, vol = 0.0, tr = 0.0;
  for (std::size_t i = 0; i < cfs.size(); ++i) {
    vol += cfs.weight(i);
    tr += cfs.weight(i) * cfs.point(i).dense().trace().real();
    for (std::size_t j = 0; j < cfs.size(); ++j) {
      auto s = product_spectrum(cfs.point(i), cfs.point(j));
      double l = 0.0, b = 0.0;
      for (auto u : s.lambdas) {
        b += std::abs(u);
        for (auto v : s.lambdas) l += std::pow(std::abs(u) - std::abs(v), 2);
      }
      if (classify(s) == CausalClass::Spacelike) l = 0.0;
      brute += cfs.weight(i) * cfs.weight(j) * l / 8.0;
      bnd += cfs.weight(i) * cfs.weight(j) * b * b;
    }
  }
  auto r = action(cfs);
  CHECK(r.action == doctest::Approx(brute).epsilon(1e-12));
  CHECK(r.boundedness == doctest::Approx(bnd).epsilon(1e-12));
  CHECK(r.volume == doctest::Approx(vol).epsilon(1e-14));
  CHECK(r.trace == doctest::Approx(tr).epsilon(1e-12));

  std::vector<double> w2 = cfs.weights();
  for (double& w : w2) w *= 3.0;
  auto r3 = action(cfs.with_weights(w2));
  CHECK(r3.action == doctest::Approx(9.0 * r.action).epsilon(1e-13));
  CHECK(r3.volume == doctest::Approx(3.0 * r.volume).epsilon(1e-14));

  auto r4 = action(cfs, ParallelOptions{4});
  CHECK(r4.action == r.action);
  CHECK(r4.boundedness == r.boundedness);
}

TEST_CASE("pair table is the mirror of its upper triangle") {
  std::mt19937_64 rng(17);
  auto cfs = cfstest::random_cfs(rng, 2, 7, 4);
  auto t = pair_table(cfs, ParallelOptions{3});
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      auto d = pair_data(cfs, i, j);
      CHECK(t[i * 4 + j].cls == d.cls);
      CHECK(t[i * 4 + j].lagrangian == doctest::Approx(d.lagrangian).epsilon(1e-10));
    }
}

TEST_CASE("Euler-Lagrange function") {
  CMatrix psi = CMatrix::Identity(2, 2);
  DiscreteCFS one({make_point(psi, 1)}, {1.0});
  CHECK(el_function(one, 0, {}) == 0.0);

  std::mt19937_64 rng(18);
  auto cfs = cfstest::random_cfs(rng, 1, 3, 2);
  ELParams p{0.3, 0.7, 0.0};
  // hand expansion for two points
  double hand = 0.0;
  for (std::size_t j = 0; j < 2; ++j) {
    auto d = pair_data(cfs, 0, j);
    hand += cfs.weight(j) * (d.lagrangian + 0.3 * d.boundedness);
  }
  hand -= 0.7 * cfs.point(0).trace();
  CHECK(el_function(cfs, 0, p) == doctest::Approx(hand).epsilon(1e-13));

  p.s_vol = el_function(cfs, 1, {0.3, 0.7, 0.0});
  CHECK(std::abs(el_function(cfs, 1, p)) < 1e-12 * std::abs(p.s_vol));
  auto all = el_residuals(cfs, p);
  CHECK(all[0] == doctest::Approx(el_function(cfs, 0, p)).epsilon(1e-13));

  CHECK_THROWS_AS(el_function(cfs, 0, {-1.0, 0.0, 0.0}), Error);
  CHECK_THROWS_AS(el_function(cfs, 5, {}), Error);
}

TEST_CASE("spin projection") {
  auto z = make_point(CMatrix::Zero(4, 6), 2);
  CHECK(spin_projection(z).norm() == 0.0);
  std::mt19937_64 rng(19);
  auto full = make_point(random_matrix(rng, 4, 4), 2);
  CHECK((spin_projection(full) - CMatrix::Identity(4, 4)).norm() < 1e-12);
  auto r4 = make_point(random_matrix(rng, 4, 10), 2);
  CMatrix pi = spin_projection(r4);
  CHECK((pi * pi - pi).norm() < 1e-10);
  CHECK(std::abs(pi.trace() - 4.0) < 1e-10);
}
