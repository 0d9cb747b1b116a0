#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the FFT path or the spectral solvers: everything is direct summation,
// quadrature or dense linear algebra.

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <random>
#include <utility>
#include <vector>

#include "kam/fourier_series.hpp"

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

// All modes of [-K, K]^n, axis 0 slowest.
inline std::vector<std::vector<int>> modes(int n, int K) {
  std::vector<std::vector<int>> out;
  std::vector<int> k(n, -K);
  while (true) {
    out.push_back(k);
    int j = n - 1;
    while (j >= 0 && k[j] == K) k[j--] = -K;
    if (j < 0) break;
    ++k[j];
  }
  return out;
}

// Random real series with decaying coefficients.
inline kam::FourierSeries random_series(std::mt19937& rng, int n, int K,
                                        kam::Shape shape = kam::Shape::scalar(), double decay = 0.5,
                                        double scale = 1.0) {
  std::normal_distribution<double> nd;
  kam::FourierSeries f(n, K, shape, false);
  for (std::size_t m = 0; m < f.num_modes(); ++m) {
    const auto k = f.mode(m);
    double l1 = 0.0;
    for (int kj : k) l1 += std::abs(kj);
    for (int c = 0; c < f.components(); ++c)
      f.coeff(m, c) = scale * std::exp(-decay * l1) * cplx(nd(rng), nd(rng));
  }
  f.symmetrize();
  return f;
}

// Direct evaluation sum_k f_k e^{ik.theta} of component c.
inline cplx direct_eval(const kam::FourierSeries& f, const std::vector<double>& theta, int c = 0) {
  cplx s(0.0, 0.0);
  for (std::size_t m = 0; m < f.num_modes(); ++m) {
    const auto k = f.mode(m);
    double ph = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) ph += k[j] * theta[j];
    s += f.coeff(m, c) * std::polar(1.0, ph);
  }
  return s;
}

// Trapezoidal quadrature of (1/2pi) int g(t) e^{-ikt} dt with `points` nodes (n = 1).
inline cplx quadrature_coeff(const std::function<double(double)>& g, int k, int points) {
  cplx s(0.0, 0.0);
  for (int j = 0; j < points; ++j) {
    const double t = 2.0 * pi * j / points;
    s += g(t) * std::polar(1.0, -k * t);
  }
  return s / static_cast<double>(points);
}

// Convolution of scalar series by hand, truncated to cutoff K (n = 1).
inline std::vector<cplx> convolve_1d(const kam::FourierSeries& f, const kam::FourierSeries& g, int K) {
  std::vector<cplx> out(2 * K + 1, cplx(0.0, 0.0));
  const int Kf = f.cutoff();
  const int Kg = g.cutoff();
  for (int a = -Kf; a <= Kf; ++a)
    for (int b = -Kg; b <= Kg; ++b) {
      const int k = a + b;
      if (std::abs(k) > K) continue;
      const int ka[1] = {a};
      const int kb[1] = {b};
      out[k + K] += f.at(ka) * g.at(kb);
    }
  return out;
}

// Dense matrix of the shift operator (Sf)(theta) = f(theta + 2 pi alpha) on
// the trigonometric polynomials of degree <= K (n = 1), in the collocation
// basis on 2K+1 equispaced points with exact exponentials.
struct Collocation {
  int K;
  int N;
  Eigen::MatrixXcd E;     // E(j, k) = e^{i k t_j}
  Eigen::MatrixXcd Einv;  // coefficients from values
  Eigen::MatrixXcd S;     // shift in value space
  Collocation(int K_, double alpha) : K(K_), N(2 * K_ + 1) {
    E.resize(N, N);
    for (int j = 0; j < N; ++j)
      for (int k = -K; k <= K; ++k) E(j, k + K) = std::polar(1.0, k * 2.0 * pi * j / N);
    Einv = E.inverse();
    Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
    for (int k = -K; k <= K; ++k) D(k + K, k + K) = std::polar(1.0, 2.0 * pi * k * alpha);
    S = E * D * Einv;
  }
  Eigen::VectorXcd values(const kam::FourierSeries& f, int c = 0) const {
    Eigen::VectorXcd coeffs(N);
    for (int k = -K; k <= K; ++k) {
      const int kk[1] = {k};
      coeffs(k + K) = f.at(kk, c);
    }
    return E * coeffs;
  }
  Eigen::VectorXcd coefficients(const Eigen::VectorXcd& v) const { return Einv * v; }
};

inline double max_coeff_error(const kam::FourierSeries& f, const Eigen::VectorXcd& coeffs, int c = 0) {
  const int K = f.cutoff();
  double e = 0.0;
  for (int k = -K; k <= K; ++k) {
    const int kk[1] = {k};
    e = std::max(e, std::abs(f.at(kk, c) - coeffs(k + K)));
  }
  return e;
}

// Dense truncated solves of the cohomological equations (n = 1), posed in
// value space on the collocation grid. Unknown averages are extra unknowns
// closed by zero-mean constraints, so every system is square.
struct DenseCohomology {
  Collocation col;
  explicit DenseCohomology(int K, double alpha) : col(K, alpha) {}

  Eigen::RowVectorXcd mean_row() const {
    return Eigen::RowVectorXcd::Constant(col.N, cplx(1.0 / col.N, 0.0));
  }

  // mu + f(theta + 2 pi alpha) - f(theta) = g, <f> = 0. Returns (coeffs of f, mu).
  std::pair<Eigen::VectorXcd, cplx> tangential(const Eigen::VectorXcd& gvals) const {
    const int N = col.N;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(N + 1, N + 1);
    M.topLeftCorner(N, N) = col.S - Eigen::MatrixXcd::Identity(N, N);
    M.block(0, N, N, 1).setOnes();
    M.block(N, 0, 1, N) = mean_row();
    Eigen::VectorXcd rhs(N + 1);
    rhs << gvals, cplx(0.0, 0.0);
    const Eigen::VectorXcd x = M.fullPivLu().solve(rhs);
    return {col.coefficients(x.head(N)), x(N)};
  }

  // a f(theta + 2 pi alpha) - b f(theta) = g.
  Eigen::VectorXcd weighted(cplx a, cplx b, const Eigen::VectorXcd& gvals) const {
    const Eigen::MatrixXcd M = a * col.S - b * Eigen::MatrixXcd::Identity(col.N, col.N);
    return col.coefficients(M.fullPivLu().solve(gvals));
  }

  // f(theta + 2 pi alpha) - A f(theta) = g - b, with b = 0 (route_all = false,
  // 1 not in the spectrum) or b free with <f> = 0 (route_all = true).
  // gvals stacks the m components. Returns stacked coefficients and b.
  std::pair<Eigen::VectorXcd, Eigen::VectorXcd> normal(const Eigen::MatrixXd& A,
                                                       const Eigen::VectorXcd& gvals,
                                                       bool route_all) const {
    const int N = col.N;
    const int m = static_cast<int>(A.rows());
    const int extra = route_all ? m : 0;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(m * N + extra, m * N + extra);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        Eigen::MatrixXcd blk = -A(i, j) * Eigen::MatrixXcd::Identity(N, N);
        if (i == j) blk += col.S;
        M.block(i * N, j * N, N, N) = blk;
      }
    if (route_all)
      for (int i = 0; i < m; ++i) {
        M.block(i * N, m * N + i, N, 1).setOnes();
        M.block(m * N + i, i * N, 1, N) = mean_row();
      }
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(m * N + extra);
    rhs.head(m * N) = gvals;
    const Eigen::VectorXcd x = M.fullPivLu().solve(rhs);
    Eigen::VectorXcd coeffs(m * N);
    for (int i = 0; i < m; ++i) coeffs.segment(i * N, N) = col.coefficients(x.segment(i * N, N));
    return {coeffs, x.tail(extra)};
  }

  // F(theta + 2 pi alpha) A - A F(theta) = g - V diag(c) V^{-1}, with
  // <(V^{-1} F V)_jj> = 0. Components row-major. Returns stacked coefficients and c.
  std::pair<Eigen::VectorXcd, Eigen::VectorXcd> reducibility(const Eigen::MatrixXd& A,
                                                             const Eigen::MatrixXcd& V,
                                                             const Eigen::VectorXcd& gvals) const {
    const int N = col.N;
    const int m = static_cast<int>(A.rows());
    const Eigen::MatrixXcd Vinv = V.inverse();
    const int u = m * m * N;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(u + m, u + m);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(N, N);
    auto at = [&](int i, int j) { return (i * m + j) * N; };
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j) {
        for (int k = 0; k < m; ++k) {
          M.block(at(i, j), at(i, k), N, N) += A(k, j) * col.S;
          M.block(at(i, j), at(k, j), N, N) -= A(i, k) * I;
        }
        for (int c = 0; c < m; ++c)
          M.block(at(i, j), u + c, N, 1).setConstant(V(i, c) * Vinv(c, j));
      }
    for (int jj = 0; jj < m; ++jj)
      for (int i = 0; i < m; ++i)
        for (int k = 0; k < m; ++k)
          M.block(u + jj, at(i, k), 1, N) += Vinv(jj, i) * V(k, jj) * mean_row();
    Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(u + m);
    rhs.head(u) = gvals;
    const Eigen::VectorXcd x = M.fullPivLu().solve(rhs);
    Eigen::VectorXcd coeffs(u);
    for (int c = 0; c < m * m; ++c) coeffs.segment(c * N, N) = col.coefficients(x.segment(c * N, N));
    return {coeffs, x.tail(m)};
  }

  // Values of all components stacked.
  Eigen::VectorXcd stacked_values(const kam::FourierSeries& f) const {
    Eigen::VectorXcd v(f.components() * col.N);
    for (int c = 0; c < f.components(); ++c) v.segment(c * col.N, col.N) = col.values(f, c);
    return v;
  }
};

inline double max_stacked_error(const kam::FourierSeries& f, const Eigen::VectorXcd& coeffs) {
  const int N = 2 * f.cutoff() + 1;
  double e = 0.0;
  for (int c = 0; c < f.components(); ++c)
    e = std::max(e, max_coeff_error(f, coeffs.segment(c * N, N), c));
  return e;
}

}  // namespace oracle
