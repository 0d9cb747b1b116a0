#include <doctest.h>

#include <cmath>

#include "kam/elimination.hpp"
#include "kam/errors.hpp"
#include "kam/families.hpp"

using namespace kam;

namespace {

const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

Eigen::VectorXd alpha_n(int n) {
  Eigen::VectorXd a(n);
  a(0) = golden;
  if (n > 1) a(1) = std::sqrt(2.0) - 1.0;
  return a;
}

Eigen::MatrixXd normal_n(int m) {
  if (m == 1) return Eigen::MatrixXd::Constant(1, 1, 1.5);
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(m, m);
  N(0, 0) = 0.5;
  N(1, 1) = 2.0;
  return N;
}

// A map in U(alpha, N): (theta + 2 pi alpha + p1 r + w cos(theta_0) r_0,
// N r + 0.1 r_0^2 + 0.05 sin(theta_0) r_0^2 e_0).
FourierTaylorMap base_map(int n, const Eigen::MatrixXd& N, const Eigen::MatrixXd& p1, double w, int K,
                          int d) {
  DiagParams p;
  p.alpha = alpha_n(n);
  p.N = N;
  p.p1 = p1;
  p.b0 = Eigen::VectorXd::Zero(N.rows());
  p.epsilon = 0.0;
  auto Q = diag_nd(p, K, d);
  std::vector<int> k(n, 0), r1(N.rows(), 0), r2(N.rows(), 0);
  k[0] = 1;
  r1[0] = 1;
  r2[0] = 2;
  std::vector<int> k0(n, 0);
  add_trig_term(Q, {true, 0, k, r1, 1.0, 0.0}, w);
  add_trig_term(Q, {false, 0, k0, r2, 0.1, 0.0}, 1.0);
  add_trig_term(Q, {false, 0, k, r2, 0.0, 0.05}, 1.0);
  return Q;
}

double max_abs(const Eigen::MatrixXd& M) { return M.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("eliminate_B leaves a map in U(alpha, A) alone") {
  const auto Q = base_map(1, normal_n(1), Eigen::MatrixXd::Ones(1, 1), 0.1, 16, 3);
  const auto sd = SpectralData::make(alpha_n(1), normal_n(1));
  const auto r = eliminate_B(Q, sd);
  CHECK(r.outer_iters == 0);
  CHECK(max_abs(r.A_bar - normal_n(1)) < 1e-14);
  CHECK(max_abs(r.result.lambda.B) < 1e-12);
}

TEST_CASE("T_(0,0,B0) o P_A: counter-term at ambient A and recovery of (I + B0) A") {
  for (int n : {1, 2}) {
    CAPTURE(n);
    const Eigen::MatrixXd A0 = normal_n(n);
    Eigen::MatrixXd A = A0;
    A(0, 0) *= 1.07;
    const auto PA = base_map(n, A, Eigen::MatrixXd::Identity(n, n), 0.1, 12, 3);
    // (I + B0) A = A0, i.e. B0 = (A0 - A) A^{-1}.
    const Eigen::MatrixXd B0 = (A0 - A) * A.inverse();
    const Translation T{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), B0};
    const auto Q = T.to_map(n, PA.degree(), PA.cutoff()).compose(PA);
    const auto sdA = SpectralData::make(alpha_n(n), A);
    const auto at_A = solve(Q, sdA);
    CHECK(max_abs(at_A.lambda.B - B0) < 1e-12);
    CHECK(at_A.G.distance_to_identity() < 1e-12);
    const auto r = eliminate_B(Q, sdA);
    CHECK(max_abs(r.A_bar - A0) < 1e-9);
    CHECK(max_abs(r.result.lambda.B) <= 1e-10);
    CHECK(r.outer_iters >= 1);
    CHECK(r.outer_iters <= 6);
  }
}

TEST_CASE("outer B Jacobian at a map in U(alpha, A0) is -A0^{-1}") {
  for (int n : {1, 2}) {
    CAPTURE(n);
    const Eigen::MatrixXd A0 = normal_n(n);
    const auto Q = base_map(n, A0, Eigen::MatrixXd::Identity(n, n), 0.1, 12, 3);
    const auto J = outer_jacobian_B(Q, SpectralData::make(alpha_n(n), A0), 1e-5);
    CHECK(max_abs(J + A0.inverse()) < 1e-6);
  }
}

TEST_CASE("flatten_torsion makes the order-1 theta jet constant") {
  for (double a : {1.0 + 1e-3, 1.5, 0.5}) {
    CAPTURE(a);
    const Eigen::MatrixXd N = Eigen::MatrixXd::Constant(1, 1, a);
    const auto Q = base_map(1, N, Eigen::MatrixXd::Constant(1, 1, 0.8), 1.0, 24, 3);
    const auto sd = SpectralData::make(alpha_n(1), N);
    const auto fl = flatten_torsion(Q, sd);
    CHECK(std::abs(fl.p1_bar(0, 0) - 0.8) < 1e-15);
    CHECK(fl.phi_hat.real_average().cwiseAbs().maxCoeff() < 1e-15);
    const auto jet = fl.conjugated.theta_jet(1);
    const auto flat = FourierSeries::constant(1, 24, fl.p1_bar);
    CHECK(jet.max_abs_diff(flat) < 1e-12);
    // F^{-1} is a two-sided jet inverse.
    const auto id = FourierTaylorMap::identity(1, 1, 3, 24);
    CHECK(fl.F.compose(fl.F_inverse).max_abs_diff(id) < 1e-13);
    CHECK(fl.F_inverse.compose(fl.F).max_abs_diff(id) < 1e-13);
  }
}

TEST_CASE("flatten_torsion with constant torsion is the identity") {
  const auto Q = base_map(2, normal_n(2), Eigen::MatrixXd::Identity(2, 2), 0.0, 8, 2);
  const auto fl = flatten_torsion(Q, SpectralData::make(alpha_n(2), normal_n(2)));
  CHECK(fl.phi_hat.max_abs() < 1e-15);
  CHECK(fl.F.max_abs_diff(FourierTaylorMap::identity(2, 2, 2, 8)) < 1e-15);
  CHECK(fl.conjugated.max_abs_diff(Q) < 1e-14);
}

TEST_CASE("action_shift re-expands around r = c") {
  const auto Q = base_map(1, normal_n(1), Eigen::MatrixXd::Ones(1, 1), 0.3, 12, 3);
  const Eigen::VectorXd c = Eigen::VectorXd::Constant(1, 0.02);
  const auto Qc = action_shift(Q, c);
  for (double th : {0.1, 1.7, 4.0})
    for (double r : {-0.01, 0.0, 0.03}) {
      const double t[1] = {th};
      const double a[1] = {r};
      const double b[1] = {r + 0.02};
      const auto p = Qc.eval(t, a);
      const auto q = Q.eval(t, b);
      CHECK(std::abs(p.theta[0] - q.theta[0]) < 1e-14);
      CHECK(std::abs(p.r[0] - q.r[0]) < 1e-14);
    }
}

TEST_CASE("eliminate_beta at a map in U(alpha, A) takes no step") {
  const auto Q = base_map(1, normal_n(1), Eigen::MatrixXd::Ones(1, 1), 0.0, 16, 3);
  const auto r = eliminate_beta(Q, SpectralData::make(alpha_n(1), normal_n(1)));
  CHECK(r.outer_iters == 0);
  CHECK(r.c_bar.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eliminate_beta undoes an action shift") {
  for (int n : {1, 2})
    for (bool free_b : {false, true})
      for (bool joint : {false, true}) {
        CAPTURE(n);
        CAPTURE(free_b);
        CAPTURE(joint);
        const Eigen::MatrixXd N = normal_n(n);
        Eigen::MatrixXd p1 = Eigen::MatrixXd::Identity(n, n);
        if (n == 2) p1(0, 1) = 0.3;
        const auto P0 = base_map(n, N, p1, 0.2, n == 1 ? 16 : 8, 3);
        Eigen::VectorXd c0(n);
        c0(0) = 2e-3;
        if (n == 2) c0(1) = -1e-3;
        // Q(theta, r) = P0(theta, r - c0).
        const auto Q = action_shift(P0, -c0);
        EliminationOptions opts;
        opts.newton.free_b = free_b;
        opts.joint = joint;
        const auto r = eliminate_beta(Q, SpectralData::make(alpha_n(n), N), opts);
        CHECK((r.c_bar - c0).cwiseAbs().maxCoeff() < 1e-9);
        CHECK(max_abs(r.A_bar - N) < 1e-9);
        CHECK(r.result.lambda.beta.cwiseAbs().maxCoeff() <= 1e-10);
        CHECK(max_abs(r.result.lambda.B) <= 1e-10);
        if (!free_b) CHECK(r.result.lambda.b.cwiseAbs().maxCoeff() == 0.0);
      }
}

TEST_CASE("outer beta Jacobian at a map in U(alpha, A) is p1_bar") {
  for (int n : {1, 2}) {
    CAPTURE(n);
    Eigen::MatrixXd p1 = 0.8 * Eigen::MatrixXd::Identity(n, n);
    if (n == 2) p1(1, 0) = -0.25;
    const auto Q = base_map(n, normal_n(n), p1, 0.3, n == 1 ? 16 : 8, 3);
    EliminationOptions opts;
    opts.newton.free_b = true;
    const auto J = outer_jacobian_beta(Q, SpectralData::make(alpha_n(n), normal_n(n)), 1e-5, opts);
    CHECK(max_abs(J - p1) < 1e-6);
  }
}

TEST_CASE("twist check") {
  RussmannParams rp;
  rp.alpha = golden;
  const auto t = check_twist(russmann_1d(rp, 16, 2));
  CHECK(t.pass);
  CHECK(t.det == doctest::Approx(1.0));

  // p1 = cos(theta): zero mean.
  const auto Q = base_map(1, normal_n(1), Eigen::MatrixXd::Zero(1, 1), 1.0, 16, 2);
  CHECK_FALSE(check_twist(Q).pass);
  CHECK_THROWS_AS(eliminate_beta(Q, SpectralData::make(alpha_n(1), normal_n(1))), DomainError);
}

TEST_CASE("check_b_zero applies only without a unit eigenvalue") {
  const auto Q = base_map(2, normal_n(2), Eigen::MatrixXd::Identity(2, 2), 0.1, 8, 2);
  const auto sd = SpectralData::make(alpha_n(2), normal_n(2));
  const auto c = check_b_zero(solve(Q, sd), sd);
  CHECK(c.applicable);
  CHECK(c.pass);
  Eigen::MatrixXd N1 = normal_n(2);
  N1(0, 0) = 1.0;
  const auto sd1 = SpectralData::make(alpha_n(2), N1);
  const auto Q1 = base_map(2, N1, Eigen::MatrixXd::Identity(2, 2), 0.1, 8, 2);
  CHECK_FALSE(check_b_zero(solve(Q1, sd1), sd1).applicable);
}

TEST_CASE("elimination rejects complex spectra") {
  Eigen::MatrixXd N(2, 2);
  N << 0.0, -1.2, 1.2, 0.0;
  const auto Q = base_map(2, N, Eigen::MatrixXd::Identity(2, 2), 0.0, 6, 2);
  const auto sd = SpectralData::make(alpha_n(2), N);
  CHECK_THROWS_WITH_AS(eliminate_B(Q, sd), doctest::Contains("complex"), DomainError);
}

TEST_CASE("Russmann family: beta and B eliminated, translated curve certified") {
  RussmannParams rp;
  rp.alpha = golden;
  rp.epsilon = 5e-4;
  rp.b0 = 1e-3;
  const auto Q = russmann_1d(rp, 32, 2);
  EliminationOptions opts;
  opts.newton.free_b = true;
  const auto r = eliminate_beta(Q, SpectralData::make(alpha_n(1), Eigen::MatrixXd::Constant(1, 1, 1.5)), opts);
  CHECK(std::abs(r.result.lambda.beta(0)) <= 1e-10);
  CHECK(max_abs(r.result.lambda.B) <= 1e-10);
  const auto tt = translated_torus(r.result, r.c_bar);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double th[1] = {2.0 * M_PI * i / 64};
    const double th1[1] = {th[0] + 2.0 * M_PI * golden};
    const double phi = th[0] + tt.G.u.eval_real(th)(0, 0);
    const double R = tt.G.R0.eval_real(th)(0, 0);
    const double x[1] = {phi};
    const double y[1] = {R};
    const auto img = Q.eval(x, y);
    worst = std::max(worst, std::abs(img.theta[0] - (th1[0] + tt.G.u.eval_real(th1)(0, 0))));
    worst = std::max(worst, std::abs(img.r[0] - (tt.translation(0) + tt.G.R0.eval_real(th1)(0, 0))));
  }
  CHECK(worst < 1e-9);
  const auto j = elimination_report(r);
  CHECK(j.contains("A_bar"));
  CHECK(j["outer_iters"].get<int>() == r.outer_iters);
}
