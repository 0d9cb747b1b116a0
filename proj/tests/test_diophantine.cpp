#include <doctest.h>

#include <cmath>
#include <numbers>

#include "kam/diophantine.hpp"
#include "kam/errors.hpp"

using namespace kam;

namespace {

const double golden = (std::sqrt(5.0) - 1.0) / 2.0;

Eigen::VectorXd vec1(double a) { return Eigen::VectorXd::Constant(1, a); }

// Distinct denominators q_0 = 1, q_1, ... of the continued-fraction
// convergents of x in (0, 1), from the partial quotients in long double.
std::vector<long long> convergent_denominators(long double x, long long max_q) {
  std::vector<long long> out{1};
  long long q_prev = 1, q = 0;
  long double y = x;
  while (true) {
    y = 1.0L / y;
    const long long a = static_cast<long long>(std::floor(y));
    y -= a;
    const long long qn = a * q_prev + q;
    q = q_prev;
    q_prev = qn;
    if (qn > max_q) break;
    if (out.empty() || out.back() != qn) out.push_back(qn);
    if (y == 0.0L) break;
  }
  return out;
}

double dist_z(double x) { return std::abs(x - std::nearbyint(x)); }

}  // namespace

TEST_CASE("golden mean: best denominators are Fibonacci numbers") {
  const auto rep = verify_conditions(vec1(golden), Eigen::MatrixXd::Constant(1, 1, 1.5), 1.0, 10000);
  std::vector<long long> fib{1, 2};
  while (fib.back() + fib[fib.size() - 2] <= 10000) fib.push_back(fib.back() + fib[fib.size() - 2]);
  CHECK(rep.best_denominators == fib);
  CHECK(rep.best_denominators == convergent_denominators((std::sqrt(5.0L) - 1.0L) / 2.0L, 10000));

  // gamma is attained at a convergent denominator.
  double cf_min = 1e300, brute = 1e300;
  for (long long q : fib) cf_min = std::min(cf_min, q * dist_z(q * golden));
  for (int k = 1; k <= 10000; ++k) brute = std::min(brute, k * dist_z(k * golden));
  CHECK(rep.gamma_emp == doctest::Approx(cf_min).epsilon(1e-12));
  CHECK(rep.gamma_emp == doctest::Approx(brute).epsilon(1e-12));
  CHECK(rep.mixed_vacuous);
  CHECK(rep.worst.condition == "tangential");
}

TEST_CASE("silver ratio: best denominators match the continued fraction") {
  const double a = std::sqrt(2.0) - 1.0;
  const auto rep = verify_conditions(vec1(a), Eigen::MatrixXd::Identity(1, 1), 1.0, 5000);
  CHECK(rep.best_denominators == convergent_denominators(std::sqrt(2.0L) - 1.0L, 5000));
}

TEST_CASE("rational alpha is an exact resonance") {
  for (auto [p, q] : {std::pair{1, 2}, std::pair{3, 7}, std::pair{5, 11}}) {
    CAPTURE(q);
    const auto rep = verify_conditions(vec1(double(p) / q), Eigen::MatrixXd::Constant(1, 1, 2.0), 1.0, 100);
    CHECK(rep.gamma_emp == 0.0);
    CHECK(rep.worst.k == std::vector<int>{q});
    CHECK(rep.worst.l == p);
  }
}

TEST_CASE("gamma_emp is non-increasing in K_check") {
  Eigen::VectorXd al(2);
  al << golden, std::sqrt(2.0) - 1.0;
  double prev = 1e300;
  for (int K : {4, 16, 64, 128}) {
    const auto rep = verify_conditions(al, Eigen::MatrixXd::Identity(2, 2) * 0.5, 2.0, K);
    CHECK(rep.gamma_emp <= prev);
    CHECK(rep.gamma_emp > 0.0);
    prev = rep.gamma_emp;
  }
}

TEST_CASE("complex spectrum: mixed conditions") {
  const double psi = 1.1;
  Eigen::MatrixXd A(2, 2);
  A << std::cos(psi), -std::sin(psi), std::sin(psi), std::cos(psi);
  A *= 0.8;
  const auto args = positive_arguments(A);
  REQUIRE(args.size() == 1);
  CHECK(args[0] == doctest::Approx(psi));
  const int K = 50;
  const auto rep = verify_conditions(vec1(golden), A, 1.0, K);
  CHECK_FALSE(rep.mixed_vacuous);
  double brute = 1e300;
  for (int k = -K; k <= K; ++k)
    for (int h : {-2, -1, 1, 2}) {
      const double x = 2.0 * std::numbers::pi * k * golden + h * psi;
      brute = std::min(brute, 2.0 * std::numbers::pi * dist_z(x / (2.0 * std::numbers::pi)) * (1.0 + std::abs(k)));
    }
  CHECK(rep.gamma_mixed == doctest::Approx(brute).epsilon(1e-12));
  CHECK(rep.gamma_emp == std::min(rep.gamma_mixed, rep.gamma_tangential));

  // arg a = 2 pi (2 alpha - 1) resonates at k = -2, h = 1.
  const double res = 2.0 * std::numbers::pi * (2.0 * golden - 1.0);
  Eigen::MatrixXd R(2, 2);
  R << std::cos(res), -std::sin(res), std::sin(res), std::cos(res);
  const auto r2 = verify_conditions(vec1(golden), R, 1.0, 10);
  CHECK(r2.gamma_emp == 0.0);
  CHECK(r2.worst.condition == "mixed");
}

TEST_CASE("report JSON") {
  const auto rep = verify_conditions(vec1(golden), Eigen::MatrixXd::Constant(1, 1, 1.5), 1.0, 100);
  const auto j = diophantine_to_json(rep);
  CHECK(j["gamma_emp"].get<double>() == rep.gamma_emp);
  CHECK(j.contains("best_denominators"));
  CHECK(j["mixed"].get<std::string>().find("vacuous") != std::string::npos);
  CHECK_THROWS_AS(verify_conditions(vec1(golden), Eigen::MatrixXd::Identity(1, 1), 1.0, 0), ShapeError);
}
