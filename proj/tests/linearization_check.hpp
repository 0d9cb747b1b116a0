#pragma once

// Finite-difference check of the linearized solve: perturb (G, P, lambda)
// along a random direction, difference the normal-form operator centrally,
// pull the difference back and solve; the solve must return the direction.

#include <random>

#include "fixtures.hpp"
#include "kam/newton.hpp"

namespace lincheck {

struct Setup {
  kam::Conjugacy G;
  kam::NormalForm P;
  kam::Translation lambda;
  kam::SpectralData sd;
};

inline Eigen::MatrixXd diag_A(int m) {
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) A(j, j) = m == 1 ? 2.0 : (j == 0 ? 0.5 : 2.0);
  return A;
}

// Random state in the solver gauge, A diagonal without eigenvalue 1.
inline Setup random_setup(std::mt19937& rng, int n, int m, int K, int d) {
  using kam::FourierSeries;
  using kam::Shape;
  Eigen::VectorXd alpha(n);
  alpha(0) = (std::sqrt(5.0) - 1.0) / 2.0;
  if (n > 1) alpha(1) = std::sqrt(2.0) - 1.0;
  const Eigen::MatrixXd A = diag_A(m);
  auto sd = kam::SpectralData::make(alpha, A);

  auto G = fixture::random_conjugacy(rng, n, m, K, 0.01);
  G.u -= FourierSeries::constant(n, K, G.u.real_average());
  Eigen::MatrixXd R1avg = G.R1.real_average();
  Eigen::MatrixXd fix = Eigen::MatrixXd::Zero(m, m);
  for (int j = 0; j < m; ++j) fix(j, j) = R1avg(j, j) - 1.0;
  G.R1 -= FourierSeries::constant(n, K, fix);

  auto W = fixture::random_map(rng, n, m, d, K, 0.05, 0.0);
  for (int i = 0; i < std::min(n, m); ++i) {
    const int mono = W.monomials().unit(i);
    Eigen::MatrixXd e = Eigen::MatrixXd::Zero(n, 1);
    e(i, 0) = 1.0;
    W.theta_coeff(mono) += FourierSeries::constant(n, K, e);
  }
  auto P = kam::NormalForm::project(W, alpha, A);

  std::uniform_real_distribution<double> ud(-1e-3, 1e-3);
  kam::Translation lam = kam::Translation::zero(n, m);
  for (int i = 0; i < n; ++i) lam.beta(i) = ud(rng);
  for (int j = 0; j < m; ++j) lam.B(j, j) = ud(rng);
  return {G, P, lam, sd};
}

// Largest relative error of the recovered direction over `directions` trials.
inline double linearization_error(int n, int m, int K, int d, unsigned seed, int directions,
                                  double t = 1e-4) {
  using kam::FourierSeries;
  using kam::Shape;
  std::mt19937 rng(seed);
  const Setup s = random_setup(rng, n, m, K, d);
  const kam::PullBack pb(s.G, s.P, s.lambda);
  double worst = 0.0;
  for (int trial = 0; trial < directions; ++trial) {
    auto phi = oracle::random_series(rng, n, K, Shape::vector(n), 2.0, 0.1);
    phi -= FourierSeries::constant(n, K, phi.real_average());
    const auto R0 = oracle::random_series(rng, n, K, Shape::vector(m), 2.0, 0.1);
    auto R1 = oracle::random_series(rng, n, K, Shape::matrix(m, m), 2.0, 0.1);
    Eigen::MatrixXd dmean = Eigen::MatrixXd::Zero(m, m);
    const Eigen::MatrixXd R1avg = R1.real_average();
    for (int j = 0; j < m; ++j) dmean(j, j) = R1avg(j, j);
    R1 -= FourierSeries::constant(n, K, dmean);
    std::uniform_real_distribution<double> ud(-0.1, 0.1);
    kam::Translation dl = kam::Translation::zero(n, m);
    for (int i = 0; i < n; ++i) dl.beta(i) = ud(rng);
    for (int j = 0; j < m; ++j) dl.B(j, j) = ud(rng);
    auto dP = fixture::random_map(rng, n, m, d, K, 0.1, 0.0) - kam::FourierTaylorMap::identity(n, m, d, K);
    dP = kam::NormalForm::project(dP, Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(m, m)).map;

    auto at = [&](double h) {
      const auto G = kam::apply_update(s.G, phi * h, R0 * h, R1 * h);
      auto P = s.P;
      P.map += h * dP;
      auto lam = s.lambda;
      lam += kam::Translation{dl.beta * h, dl.b * h, dl.B * h};
      return kam::normal_form_operator(G, P, lam).compose(s.G.to_map(d));
    };
    const auto diff = (0.5 / t) * (at(t) - at(-t));
    const auto E = pb.apply(diff);
    const auto lin = kam::solve_linearized(E, pb, s.G, s.P, s.sd, false);

    const double scale = std::max({phi.max_abs(), R0.max_abs(), R1.max_abs(), dl.norm()});
    double err = std::max({lin.phi_dot.max_abs_diff(phi), lin.R0_dot.max_abs_diff(R0), lin.R1_dot.max_abs_diff(R1)});
    err = std::max(err, (lin.dlambda.beta - dl.beta).cwiseAbs().maxCoeff());
    err = std::max(err, (lin.dlambda.B - dl.B).cwiseAbs().maxCoeff());
    worst = std::max(worst, err / scale);
  }
  return worst;
}

}  // namespace lincheck
