#include "kam/orbit.hpp"

#include <cmath>
#include <numbers>

#include "kam/errors.hpp"

namespace kam {
namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap(double x) { return x - two_pi * std::nearbyint(x / two_pi); }

std::vector<double> eval_vec(const FourierSeries& f, const std::vector<double>& th) {
  const Eigen::MatrixXd v = f.eval_real(th);
  return std::vector<double>(v.data(), v.data() + v.size());
}

}  // namespace

std::vector<std::vector<double>> sample_angles(int n, int N_points) {
  if (n < 1 || N_points < 1) throw ShapeError("sample_angles: need n >= 1 and N_points >= 1");
  const int p = std::max(1, static_cast<int>(std::lround(std::pow(N_points, 1.0 / n))));
  std::vector<std::vector<double>> out;
  std::vector<int> idx(n, 0);
  while (true) {
    std::vector<double> th(n);
    for (int i = 0; i < n; ++i) th[i] = two_pi * idx[i] / p;
    out.push_back(th);
    int i = n - 1;
    while (i >= 0 && idx[i] == p - 1) idx[i--] = 0;
    if (i < 0) return out;
    ++idx[i];
  }
}

std::vector<double> invert_phi(const FourierSeries& u, const std::vector<double>& y, double tol, int max_iter) {
  std::vector<double> x = y;
  for (int it = 0; it < max_iter; ++it) {
    const auto ux = eval_vec(u, x);
    double step = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double xn = y[i] - ux[i];
      step = std::max(step, std::abs(xn - x[i]) / (1.0 + std::abs(y[i])));
      x[i] = xn;
    }
    if (step <= tol) return x;
  }
  throw DomainError("invert_phi: fixed-point iteration did not converge");
}

OrbitStats orbit_residual(const FourierTaylorMap& Q, const Conjugacy& G, const Translation& lambda,
                          const Eigen::VectorXd& alpha, int N_points, int N_iter) {
  const int n = Q.n();
  const int m = Q.m();
  const Eigen::VectorXd& beta = lambda.beta;
  if (G.n() != n || G.m() != m || alpha.size() != n || beta.size() != n || lambda.b.size() != m ||
      lambda.B.rows() != m || lambda.B.cols() != m)
    throw ShapeError("orbit_residual: dimension mismatch");
  const Eigen::MatrixXd IB = Eigen::MatrixXd::Identity(m, m) + lambda.B;
  OrbitStats s;
  const auto samples = sample_angles(n, N_points);
  s.points = static_cast<int>(samples.size());
  double sum2 = 0.0;
  for (const auto& th : samples) {
    std::vector<double> th1(n), phi(n);
    const auto u = eval_vec(G.u, th);
    const auto R = eval_vec(G.R0, th);
    for (int i = 0; i < n; ++i) {
      th1[i] = th[i] + two_pi * alpha(i);
      phi[i] = th[i] + u[i];
    }
    const auto u1 = eval_vec(G.u, th1);
    const Eigen::VectorXd R1 = lambda.b + IB * G.R0.eval_real(th1);
    const MapPoint img = Q.eval(phi, R);
    double e = 0.0;
    for (int i = 0; i < n; ++i) e = std::max(e, std::abs(wrap(img.theta[i] - (beta(i) + th1[i] + u1[i]))));
    for (int j = 0; j < m; ++j) e = std::max(e, std::abs(img.r[j] - R1(j)));
    s.one_step_max = std::max(s.one_step_max, e);
    sum2 += e * e;

    std::vector<double> y = img.theta;
    for (int i = 0; i < n; ++i) y[i] -= beta(i);
    const auto back = invert_phi(G.u, y);
    for (int i = 0; i < n; ++i) s.rotation_max = std::max(s.rotation_max, std::abs(wrap(back[i] - th1[i])));
  }
  s.one_step_rms = std::sqrt(sum2 / s.points);

  if (N_iter > 0 && lambda.norm() == 0.0) {
    s.iterated = true;
    s.iterations = N_iter;
    for (const auto& th0 : samples) {
      const auto u = eval_vec(G.u, th0);
      std::vector<double> x(n);
      for (int i = 0; i < n; ++i) x[i] = th0[i] + u[i];
      std::vector<double> r = eval_vec(G.R0, th0);
      for (int k = 1; k <= N_iter; ++k) {
        const MapPoint p = Q.eval(x, r);
        x = p.theta;
        r = p.r;
        const auto t = invert_phi(G.u, x);
        const auto Rt = eval_vec(G.R0, t);
        for (int j = 0; j < m; ++j) s.max_distance = std::max(s.max_distance, std::abs(r[j] - Rt[j]));
        for (int i = 0; i < n; ++i)
          s.max_phase_drift = std::max(s.max_phase_drift, std::abs(wrap(t[i] - th0[i] - two_pi * k * alpha(i))));
      }
    }
  }
  return s;
}

nlohmann::json orbit_to_json(const OrbitStats& s) {
  nlohmann::json j{{"points", s.points},
                   {"one_step_max", s.one_step_max},
                   {"one_step_rms", s.one_step_rms},
                   {"rotation_max", s.rotation_max},
                   {"iterated", s.iterated}};
  if (s.iterated) {
    j["iterations"] = s.iterations;
    j["max_distance"] = s.max_distance;
    j["max_phase_drift"] = s.max_phase_drift;
  }
  return j;
}

}  // namespace kam
