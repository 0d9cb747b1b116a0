#include <doctest.h>

#include <cmath>
#include <random>

#include "kam/errors.hpp"
#include "kam/fourier_taylor.hpp"
#include "kam/serialization.hpp"
#include "fixtures.hpp"

using namespace kam;

using fixture::point_error;
using fixture::random_map;

TEST_CASE("identity is neutral for composition") {
  std::mt19937 rng(1);
  const auto F = random_map(rng, 1, 2, 3, 8, 0.05, 0.01);
  const auto id = FourierTaylorMap::identity(1, 2, 3, 8);
  CHECK(F.compose(id).max_abs_diff(F) < 1e-14);
  CHECK(id.compose(F).max_abs_diff(F) < 1e-14);
}

TEST_CASE("rotations compose additively") {
  auto a = FourierTaylorMap::identity(2, 1, 2, 4);
  auto b = a;
  a.set_rotation({0.3, -0.2});
  b.set_rotation({1.1, 0.5});
  const auto c = a.compose(b);
  CHECK(c.rotation()[0] == doctest::Approx(1.4).epsilon(1e-15));
  CHECK(c.rotation()[1] == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(c.theta_coeff(0).max_abs() < 1e-15);
}

TEST_CASE("symbolic composition example") {
  // F = (theta + r, 2r), H = (theta, r + eps cos theta):
  // F o H = (theta + r + eps cos theta, 2r + 2 eps cos theta)
  const int K = 6;
  const double eps = 0.01;
  FourierTaylorMap F(1, 1, 2, K);
  F.theta_coeff(1) = FourierSeries::constant(1, K, Eigen::MatrixXd::Constant(1, 1, 1.0));
  F.r_coeff(1) = FourierSeries::constant(1, K, Eigen::MatrixXd::Constant(1, 1, 2.0));
  auto H = FourierTaylorMap::identity(1, 1, 2, K);
  FourierSeries c(1, K, Shape::vector(1));
  const int kp[1] = {1};
  const int km[1] = {-1};
  c.coeff(c.mode_index(kp)) = 0.5 * eps;
  c.coeff(c.mode_index(km)) = 0.5 * eps;
  H.r_coeff(0) = c;
  const auto G = F.compose(H);
  CHECK(G.theta_coeff(0).max_abs_diff(c) < 1e-13);
  CHECK(G.r_coeff(0).max_abs_diff(c * 2.0) < 1e-13);
  CHECK(G.theta_coeff(1).max_abs_diff(F.theta_coeff(1)) < 1e-13);
  CHECK(G.r_coeff(1).max_abs_diff(F.r_coeff(1)) < 1e-13);
  CHECK(G.theta_coeff(2).max_abs() < 1e-13);
  CHECK(G.r_coeff(2).max_abs() < 1e-13);
}

TEST_CASE("composition agrees with pointwise evaluation") {
  std::mt19937 rng(2);
  SUBCASE("polynomial class, degree 2, n = 2") {
    // theta part of H independent of r and r part affine: F o H stays quadratic.
    const int K = 12;
    auto F = random_map(rng, 2, 2, 2, K, 0.05, 0.0);
    auto H = random_map(rng, 2, 2, 2, K, 0.02, 0.01);
    for (int mono = 1; mono < H.monomials().size(); ++mono) {
      H.theta_coeff(mono) *= 0.0;
      if (H.monomials().order(mono) == 2) H.r_coeff(mono) *= 0.0;
    }
    const auto FH = F.compose(H);
    std::uniform_real_distribution<double> ud(0.0, 2.0 * oracle::pi);
    std::uniform_real_distribution<double> ur(-0.05, 0.05);
    double err = 0.0;
    for (int t = 0; t < 20; ++t) {
      const std::vector<double> th{ud(rng), ud(rng)};
      const std::vector<double> r{ur(rng), ur(rng)};
      const auto h = H.eval(th, r);
      err = std::max(err, point_error(FH.eval(th, r), F.eval(h.theta, h.r)));
    }
    CHECK(err < 1e-12);
  }
  SUBCASE("general near-identity maps at degree 12") {
    const int K = 16;
    const auto F = random_map(rng, 1, 1, 12, K, 0.05, 0.0);
    const auto H = random_map(rng, 1, 1, 12, K, 0.02, 0.005);
    const auto FH = F.compose(H);
    std::uniform_real_distribution<double> ud(0.0, 2.0 * oracle::pi);
    std::uniform_real_distribution<double> ur(-0.05, 0.05);
    double err = 0.0;
    for (int t = 0; t < 20; ++t) {
      const std::vector<double> th{ud(rng)};
      const std::vector<double> r{ur(rng)};
      const auto h = H.eval(th, r);
      err = std::max(err, point_error(FH.eval(th, r), F.eval(h.theta, h.r)));
    }
    CHECK(err < 1e-12);
  }
  SUBCASE("large angular displacement takes the direct path") {
    const int K = 24;
    auto F = random_map(rng, 1, 1, 2, K, 0.05, 0.0);
    auto H = FourierTaylorMap::identity(1, 1, 2, K);
    FourierSeries s(1, K, Shape::vector(1));
    const int kp[1] = {1};
    const int km[1] = {-1};
    s.coeff(s.mode_index(kp)) = cplx(0.0, -0.15);
    s.coeff(s.mode_index(km)) = cplx(0.0, 0.15);  // 0.3 sin theta
    H.theta_coeff(0) = s;
    const auto FH = F.compose(H);
    double err = 0.0;
    for (double t = 0.1; t < 6.2; t += 0.37) {
      const std::vector<double> th{t};
      const std::vector<double> r{0.03};
      const auto h = H.eval(th, r);
      err = std::max(err, point_error(FH.eval(th, r), F.eval(h.theta, h.r)));
    }
    CHECK(err < 1e-12);
  }
}

TEST_CASE("composition is associative for near-identity maps") {
  std::mt19937 rng(4);
  const int K = 16;
  const auto A = random_map(rng, 1, 1, 8, K, 0.02, 0.0);
  // zero r offsets: truncation mod r^9 then commutes with composition
  const auto B = random_map(rng, 1, 1, 8, K, 0.02, 0.0);
  const auto C = random_map(rng, 1, 1, 8, K, 0.02, 0.0);
  const auto left = A.compose(B).compose(C);
  const auto right = A.compose(B.compose(C));
  // sup norm on the grid of the difference of displacements
  const GridSpec grid{1, 64};
  const auto dl = (left - right).to_grid_jets(grid);
  double err = std::abs(left.rotation()[0] - right.rotation()[0]);
  for (const auto& j : dl)
    for (int mono = 0; mono < j.monomials().size(); ++mono) err = std::max(err, j.sup(mono));
  CHECK(err < 1e-12);
}

TEST_CASE("jets and evaluation") {
  const int K = 4;
  Eigen::MatrixXd A(2, 2);
  A << 0.5, 0.1, 0.0, 2.0;
  FourierTaylorMap P(1, 2, 2, K);
  P.set_rotation({0.7});
  P.set_r_jet(1, FourierSeries::constant(1, K, A));
  CHECK(P.r_jet(1).real_average().isApprox(A));
  CHECK(P.r_jet(1).max_abs_diff(FourierSeries::constant(1, K, A)) == 0.0);

  const auto id = FourierTaylorMap::identity(1, 2, 2, K);
  const std::vector<double> th{1.3};
  const std::vector<double> r{0.2, -0.1};
  const auto p = id.eval(th, r);
  CHECK(p.theta[0] == th[0]);
  CHECK(p.r == r);

  std::mt19937 rng(6);
  const auto F = random_map(rng, 1, 2, 2, K, 0.1, 0.1);
  const std::vector<double> zero{0.0, 0.0};
  const auto f0 = F.eval(th, zero);
  CHECK(std::abs(f0.theta[0] - (th[0] + F.rotation()[0] + F.theta_jet(0).eval_real(th)(0, 0))) < 1e-15);
  CHECK(std::abs(f0.r[1] - F.r_jet(0).eval_real(th)(1, 0)) < 1e-15);
  CHECK_THROWS_AS(F.r_jet(3), ShapeError);

  // extraction then reassembly
  FourierTaylorMap G(1, 2, 2, K);
  G.set_rotation(F.rotation());
  for (int o = 0; o <= 2; ++o) {
    G.set_theta_jet(o, F.theta_jet(o));
    G.set_r_jet(o, F.r_jet(o));
  }
  CHECK(G.max_abs_diff(F) == 0.0);
}

TEST_CASE("linear operations and jet truncation") {
  std::mt19937 rng(8);
  const auto F = random_map(rng, 2, 1, 2, 3, 0.1, 0.1);
  const auto none = F.jet_truncate({});
  CHECK(none.map.max_abs_diff(F) == 0.0);
  CHECK(none.removed.empty());

  FourierTaylorMap P0(2, 1, 2, 3);
  P0.set_r_jet(1, FourierSeries::constant(2, 3, Eigen::MatrixXd::Constant(1, 1, 2.0)));
  const JetSlot slot{false, 0};
  const auto t = P0.jet_truncate({&slot, 1});
  CHECK(t.removed.size() == 1);
  CHECK(t.removed[0].max_abs() == 0.0);

  const JetSlot slots[2] = {{true, 1}, {false, 2}};
  const auto u = F.jet_truncate(slots);
  CHECK(u.removed[0].max_abs_diff(F.theta_jet(1)) == 0.0);
  CHECK(u.map.theta_jet(1).max_abs() == 0.0);
  CHECK(u.map.r_jet(2).max_abs() == 0.0);
  CHECK(u.map.r_jet(1).max_abs_diff(F.r_jet(1)) == 0.0);

  const auto z = F + (-1.0) * F;
  CHECK(z.max_abs_diff(FourierTaylorMap(2, 1, 2, 3)) == 0.0);
}

TEST_CASE("validity radius guards composition") {
  auto F = FourierTaylorMap::identity(1, 1, 2, 4);
  F.set_validity_radius(0.1);
  auto H = FourierTaylorMap::identity(1, 1, 2, 4);
  H.r_coeff(0) = FourierSeries::constant(1, 4, Eigen::MatrixXd::Constant(1, 1, 0.2));
  CHECK_THROWS_AS(F.compose(H), DomainError);
  H.r_coeff(0) = FourierSeries::constant(1, 4, Eigen::MatrixXd::Constant(1, 1, 0.05));
  CHECK_NOTHROW(F.compose(H));
  CHECK_THROWS_AS(F.compose(FourierTaylorMap::identity(1, 2, 2, 4)), ShapeError);
}

TEST_CASE("map json round trip is bit exact") {
  std::mt19937 rng(10);
  const auto F = random_map(rng, 2, 2, 2, 3, 0.1, 0.1);
  const auto G = map_from_json(json::parse(map_to_json(F).dump()));
  CHECK(G.max_abs_diff(F) == 0.0);
  CHECK(G.validity_radius() == F.validity_radius());
}
