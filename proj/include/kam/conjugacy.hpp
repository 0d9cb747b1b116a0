#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <vector>

#include "kam/fourier_series.hpp"
#include "kam/fourier_taylor.hpp"
#include "kam/grid_jet.hpp"

namespace kam {

/// G(theta, r) = (theta + u(theta), R0(theta) + R1(theta) r).
struct Conjugacy {
  FourierSeries u;   // vector(n)
  FourierSeries R0;  // vector(m)
  FourierSeries R1;  // matrix(m x m)

  static Conjugacy identity(int n, int m, int cutoff);

  int n() const { return u.shape().rows; }
  int m() const { return R0.shape().rows; }
  int cutoff() const { return u.cutoff(); }

  FourierTaylorMap to_map(int degree) const;
  /// Throws DomainError if R1 is (numerically) singular somewhere on `grid`.
  void check_invertible(const GridSpec& grid, double tol = 1e-12) const;
  /// Largest coefficient distance to the identity.
  double distance_to_identity() const;
  double max_abs_diff(const Conjugacy& other) const;
};

/// Counter-term lambda = (beta, b, B); T(theta, r) = (beta + theta, b + (I+B) r).
struct Translation {
  Eigen::VectorXd beta;
  Eigen::VectorXd b;
  Eigen::MatrixXd B;

  static Translation zero(int n, int m);
  /// Checks (A - I) b = 0 (unless free_b) and [A, B] = 0; throws DomainError.
  static Translation make(Eigen::VectorXd beta, Eigen::VectorXd b, Eigen::MatrixXd B,
                          const Eigen::MatrixXd& A, bool free_b = false);

  double b_constraint(const Eigen::MatrixXd& A) const;
  double B_constraint(const Eigen::MatrixXd& A) const;
  double norm() const;

  FourierTaylorMap to_map(int n, int degree, int cutoff) const;
  FourierTaylorMap inverse_map(int n, int degree, int cutoff) const;
  Translation& operator+=(const Translation& other);
};

/// A map in U(alpha, A): order-0 theta jet 2 pi alpha, order-0 r jet 0,
/// order-1 r jet A.
struct NormalForm {
  FourierTaylorMap map;
  Eigen::VectorXd alpha;
  Eigen::MatrixXd A;

  /// W with its three defect jets overwritten.
  static NormalForm project(FourierTaylorMap W, const Eigen::VectorXd& alpha,
                            const Eigen::MatrixXd& A);
  /// Largest deviation of the three jets from their U(alpha, A) values.
  double membership_defect() const;
};

struct InversionOptions {
  double s = 0.0;
  double sigma = 1.0;
  double tol = 1e-14;
  int max_iter = 50;
  int grid_points = 0;  // 0: default_compose_points
};

/// w with (id + u) o (id + w) = id, by the fixed point w = -u(id + w).
FourierSeries invert_torus_diffeo(const FourierSeries& u, const InversionOptions& opts = {});

/// G^{-1}(theta, r) = (phi^{-1}(theta), R1^{-1}(phi^{-1}(theta)) (r - R0(phi^{-1}(theta)))).
FourierTaylorMap invert_G(const Conjugacy& G, int degree, const InversionOptions& opts = {});

/// T_lambda o G o P o G^{-1}.
FourierTaylorMap normal_form_operator(const Conjugacy& G, const NormalForm& P,
                                      const Translation& lambda);

struct ResidualJets {
  FourierSeries q0;  // theta component, order 0: vector(n)
  FourierSeries Q0;  // r component, order 0: vector(m)
  FourierSeries Q1;  // r component, order 1: matrix(m x m)
  FourierTaylorMap full;
  double norm() const;  // max sup-coefficient sum |.|_0 over the three jets
};

/// Applies (G' o P)^{-1} M^{-1} to maps in the (theta, r) chart, where
/// M = diag(I, I + B). Caches the Jacobian jets of one (G, P, lambda).
class PullBack {
 public:
  PullBack(const Conjugacy& G, const NormalForm& P, const Translation& lambda);

  /// delta is read as a displacement field (rotation included).
  ResidualJets apply(const FourierTaylorMap& delta) const;
  /// The map G o P (computed once).
  const FourierTaylorMap& G_of_P() const { return gp_; }
  /// d/dlambda T_lambda(G o P) applied to dlambda, as a displacement field.
  FourierTaylorMap translation_action(const Translation& dlambda) const;

 private:
  int n_, m_, degree_, cutoff_;
  GridSpec grid_;
  Eigen::MatrixXd IBinv_;
  FourierTaylorMap gp_;
  std::vector<GridJet> j11inv_;  // (phi' o P)^{-1}, n x n
  std::vector<GridJet> j21_;     // (R0' + R1' r) o P, m x n
  std::vector<GridJet> j22inv_;  // (R1 o P)^{-1}, m x m
};

/// E = (G' o P)^{-1} M^{-1} (Q o G - T_lambda o G o P).
ResidualJets pulled_back_residual(const FourierTaylorMap& Q, const Conjugacy& G,
                                  const NormalForm& P, const Translation& lambda);

nlohmann::json conjugacy_to_json(const Conjugacy& G);
Conjugacy conjugacy_from_json(const nlohmann::json& j);
nlohmann::json translation_to_json(const Translation& t);
Translation translation_from_json(const nlohmann::json& j);

}  // namespace kam
