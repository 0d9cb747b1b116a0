#pragma once

// Random test objects shared by several test binaries.

#include <random>

#include "kam/conjugacy.hpp"
#include "kam/fourier_taylor.hpp"
#include "oracles.hpp"

namespace fixture {

// Near-identity map with random small jets. `offset` scales the order-0 r part.
inline kam::FourierTaylorMap random_map(std::mt19937& rng, int n, int m, int d, int K, double scale,
                                        double offset) {
  using kam::Shape;
  auto f = kam::FourierTaylorMap::identity(n, m, d, K);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::vector<double> rot(n);
  for (auto& c : rot) c = ud(rng);
  f.set_rotation(rot);
  for (int mono = 0; mono < f.monomials().size(); ++mono) {
    const double w = std::pow(0.5, f.monomials().order(mono));
    f.theta_coeff(mono) += oracle::random_series(rng, n, K, Shape::vector(n), 3.0, scale * w);
    const double rs = mono == 0 ? offset : scale * w;
    f.r_coeff(mono) += oracle::random_series(rng, n, K, Shape::vector(m), 3.0, rs);
  }
  return f;
}

inline kam::Conjugacy random_conjugacy(std::mt19937& rng, int n, int m, int K, double scale) {
  using kam::Shape;
  auto G = kam::Conjugacy::identity(n, m, K);
  G.u += oracle::random_series(rng, n, K, Shape::vector(n), 3.0, scale);
  G.R0 += oracle::random_series(rng, n, K, Shape::vector(m), 3.0, scale);
  G.R1 += oracle::random_series(rng, n, K, Shape::matrix(m, m), 3.0, scale);
  return G;
}

inline double point_error(const kam::MapPoint& a, const kam::MapPoint& b) {
  double e = 0.0;
  for (std::size_t i = 0; i < a.theta.size(); ++i) e = std::max(e, std::abs(a.theta[i] - b.theta[i]));
  for (std::size_t i = 0; i < a.r.size(); ++i) e = std::max(e, std::abs(a.r[i] - b.r[i]));
  return e;
}

}  // namespace fixture
