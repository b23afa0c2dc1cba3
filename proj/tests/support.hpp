#pragma once

// Random instances shared by the unit and acceptance tests.

#include <cmath>
#include <random>
#include <vector>

#include "cfslab/core.hpp"

namespace cfstest {

using cfslab::CMatrix;
using cfslab::Complex;
using cfslab::CVector;

inline CMatrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g;
  CMatrix a(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) a(i, j) = Complex(g(rng), g(rng));
  return a;
}

inline CVector random_unit(std::mt19937_64& rng, int N) {
  CVector u = random_matrix(rng, N, 1).col(0);
  return u / u.norm();
}

inline CMatrix random_unitary(std::mt19937_64& rng, int N) {
  Eigen::HouseholderQR<CMatrix> qr(random_matrix(rng, N, N));
  return qr.householderQ() * CMatrix::Identity(N, N);
}

inline cfslab::SpacetimePoint make_point(const CMatrix& psi, int n) {
  return cfslab::point_from_wave_eval(cfslab::WaveEval(psi), cfslab::SpinSignature(n));
}

/// rank limits the number of independent columns of each psi (0 = full).
inline cfslab::DiscreteCFS random_cfs(std::mt19937_64& rng, int n, int N, std::size_t m, int rank = 0) {
  std::uniform_real_distribution<double> uw(0.5, 1.5);
  std::vector<cfslab::SpacetimePoint> pts;
  std::vector<double> w;
  for (std::size_t i = 0; i < m; ++i) {
    CMatrix psi = random_matrix(rng, 2 * n, N);
    if (rank > 0) psi = random_matrix(rng, 2 * n, rank) * random_matrix(rng, rank, N);
    pts.push_back(make_point(psi, n));
    w.push_back(uw(rng));
  }
  return cfslab::DiscreteCFS(std::move(pts), std::move(w));
}

/// A pair (x, y) whose closed chain has spectrum {i, -i} in every 2x2 spin
/// block, so it is spacelike with non-zero eigenvalues. The Hilbert space is
/// mixed by a random unitary, which leaves the chain untouched.
inline std::pair<CMatrix, CMatrix> spacelike_pair(std::mt19937_64& rng, int n, int N) {
  CMatrix px = CMatrix::Zero(2 * n, N), py = CMatrix::Zero(2 * n, N);
  const double h = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < n; ++k) {
    // spin rows k (positive) and n + k (negative)
    px(k, 2 * k) = 1.0;
    px(n + k, 2 * k + 1) = 1.0;
    py(k, 2 * k) = h;
    py(k, 2 * k + 1) = h;
    py(n + k, 2 * k) = h;
    py(n + k, 2 * k + 1) = -h;
  }
  CMatrix W = random_unitary(rng, N);
  return {px * W, py * W};
}

/// Greedy matching of two eigenvalue lists; returns the largest distance.
inline double match_distance(std::vector<Complex> a, std::vector<Complex> b) {
  double worst = 0.0;
  for (const Complex& x : a) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < b.size(); ++k)
      if (std::abs(b[k] - x) < std::abs(b[best] - x)) best = k;
    worst = std::max(worst, std::abs(b[best] - x));
    b.erase(b.begin() + static_cast<long>(best));
  }
  return worst;
}

}  // namespace cfstest
