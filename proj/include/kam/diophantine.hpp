#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <string>
#include <vector>

namespace kam {

/// Worst offender of a scan: the quantity |.| (1 + |k|)^tau (or |k|^tau for
/// the purely tangential condition) is smallest at (k, l, h).
struct DiophantineWorst {
  std::vector<int> k;
  long long l = 0;
  std::vector<int> h;  // empty for the tangential condition
  std::string condition;
  double value = 0.0;
};

struct DiophantineReport {
  /// Minimum over every checked condition.
  double gamma_emp = 0.0;
  double tau = 0.0;
  int K_check = 0;
  DiophantineWorst worst;
  /// min |k.alpha - l| |k|^tau over 0 < |k|_inf <= K_check.
  double gamma_tangential = 0.0;
  /// min |2 pi k.alpha + h.arg(a) - 2 pi l| (1 + |k|)^tau over 1 <= |h|_1 <= 2;
  /// only meaningful when mixed_vacuous is false.
  double gamma_mixed = 0.0;
  /// True when A has no eigenvalue with positive imaginary part.
  bool mixed_vacuous = true;
  /// n = 1: the k <= K_check at which dist(k alpha, Z) reaches a new minimum.
  std::vector<long long> best_denominators;
};

/// Brute-force scan of the arithmetic conditions on alpha and the arguments
/// of the eigenvalues of A with positive imaginary part. |k| is the l1 norm.
/// Distances below the rounding level of k.alpha count as exact resonances.
DiophantineReport verify_conditions(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& A, double tau,
                                    int K_check);

/// Arguments in (0, pi) of the eigenvalues of A with positive imaginary part.
std::vector<double> positive_arguments(const Eigen::MatrixXd& A);

nlohmann::json diophantine_to_json(const DiophantineReport& r);

}  // namespace kam
