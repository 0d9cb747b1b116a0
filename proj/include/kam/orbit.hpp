#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

#include "kam/conjugacy.hpp"
#include "kam/fourier_taylor.hpp"

namespace kam {

/// Measurements of a torus theta -> (phi(theta), R0(theta)), phi = id + u,
/// against Q by pointwise evaluation only (no cohomology, no Newton).
struct OrbitStats {
  int points = 0;
  /// max over samples of
  /// |Q(phi(theta), R0(theta)) - (beta + phi(theta + 2 pi alpha), b + (I + B) R0(theta + 2 pi alpha))|
  double one_step_max = 0.0;
  double one_step_rms = 0.0;
  /// max |phi^{-1}(Q_theta(phi(theta), R0(theta)) - beta) - theta - 2 pi alpha|
  double rotation_max = 0.0;
  /// Iterated orbits (only when lambda = 0 and iterations > 0).
  bool iterated = false;
  int iterations = 0;
  /// max over orbits and steps of |r_k - R0(phi^{-1}(theta_k))|.
  double max_distance = 0.0;
  /// max over orbits and steps of |phi^{-1}(theta_k) - theta_0 - 2 pi k alpha|.
  double max_phase_drift = 0.0;
};

/// Sample angles: a uniform grid with round(N^(1/n)) points per axis.
std::vector<std::vector<double>> sample_angles(int n, int N_points);

/// phi^{-1}(y) for phi = id + u by fixed-point iteration (|u'| < 1 assumed);
/// tol is relative to 1 + |y|.
std::vector<double> invert_phi(const FourierSeries& u, const std::vector<double>& y, double tol = 1e-15,
                               int max_iter = 200);

/// One-step identity of the torus translated by lambda and, when lambda = 0
/// and N_iter > 0, bounded iteration of Q from the torus.
OrbitStats orbit_residual(const FourierTaylorMap& Q, const Conjugacy& G, const Translation& lambda,
                          const Eigen::VectorXd& alpha, int N_points, int N_iter = 0);

nlohmann::json orbit_to_json(const OrbitStats& s);

}  // namespace kam
