#pragma once

#include <Eigen/Dense>
#include <json.hpp>
#include <optional>
#include <vector>

#include "kam/cohomology.hpp"
#include "kam/conjugacy.hpp"
#include "kam/fourier_taylor.hpp"
#include "kam/newton.hpp"

namespace kam {

struct EliminationOptions {
  /// Stop when max |beta| and max |B| are below tol.
  double tol = 1e-10;
  int max_outer = 20;
  /// Finite-difference step for Jacobian refreshes (relative to max(1, |x|)).
  double fd_step = 1e-6;
  /// A step contracts when |F_new| <= contraction * |F_old|; otherwise the
  /// outer Jacobian is refreshed by finite differences.
  double contraction = 0.5;
  /// Outer divergence when |F| exceeds this factor times the best so far.
  double divergence_factor = 1e3;
  /// One Newton on (eigenvalues of A, c) instead of eliminate_B inside the c loop.
  bool joint = false;
  /// Conjugate Q once by the torsion-flattening map before the c loop.
  bool precondition = false;
  double twist_tol = 1e-8;
  NewtonOptions newton;
};

struct EliminateBResult {
  Eigen::MatrixXd A_bar;
  SpectralData sd;  // ambient spectral data at A_bar
  NormalFormResult result;
  int outer_iters = 0;
  int inner_iters_total = 0;
  std::vector<double> history;  // max |B| per outer iterate
};

/// Outer Newton on the eigenvalues of the ambient normal matrix, eigenbasis
/// fixed to that of `base`, until the B counter-term vanishes. The Jacobian
/// starts at -diag(1/a) (exact at a map in U(alpha, A)), is updated by
/// Broyden steps and refreshed by finite differences when a step fails to
/// contract.
EliminateBResult eliminate_B(const FourierTaylorMap& Q, const SpectralData& base,
                             const EliminationOptions& opts = {},
                             const std::optional<NewtonState>& start = std::nullopt);

/// Central finite-difference Jacobian of the eigen-diagonal of B with
/// respect to the eigenvalues of A, at the ambient matrix of `base`.
Eigen::MatrixXd outer_jacobian_B(const FourierTaylorMap& Q, const SpectralData& base, double h,
                                 const NewtonOptions& opts = {});

struct TorsionFlattening {
  FourierSeries phi_hat;         // matrix(n x m), zero average
  FourierTaylorMap F;            // (theta + phi_hat r, r)
  FourierTaylorMap F_inverse;    // jet inverse of F
  FourierTaylorMap conjugated;   // F o Q o F^{-1}
  Eigen::MatrixXd p1_bar;        // mean order-1 theta jet of Q
};

/// Solves phi_hat(theta + 2 pi alpha) A - phi_hat(theta) = p1_bar - p1(theta)
/// column by column in the eigenbasis of A (for A = I this is the plain
/// tangential equation) and conjugates Q by F.
TorsionFlattening flatten_torsion(const FourierTaylorMap& Q, const SpectralData& sd);

/// Q_c(theta, r) = Q(theta, c + r), re-expanded at the jet degree of Q.
FourierTaylorMap action_shift(const FourierTaylorMap& Q, const Eigen::VectorXd& c);

struct EliminateBetaResult {
  Eigen::VectorXd c_bar;
  Eigen::MatrixXd A_bar;
  SpectralData sd;
  NormalFormResult result;
  FourierTaylorMap map;     // the map the result refers to (Q or F o Q o F^{-1})
  bool preconditioned = false;
  Eigen::MatrixXd p1_bar;
  int outer_iters = 0;
  int inner_iters_total = 0;
  std::vector<double> history;  // max(|beta|, |B|) per outer iterate
};

/// Outer Newton on c in R^n: for each c, eliminate B for Q_c and read beta.
/// The c Jacobian starts at p1_bar when b is free (the torus average is then
/// pinned) and at -p1_bar (A - I)^{-1} when b is constrained (the torus
/// follows the normal fixed point of Q_c).
EliminateBetaResult eliminate_beta(const FourierTaylorMap& Q, const SpectralData& base,
                                   const EliminationOptions& opts = {});

/// Central finite-difference Jacobian of beta with respect to c at c = 0,
/// with B eliminated at every sample.
Eigen::MatrixXd outer_jacobian_beta(const FourierTaylorMap& Q, const SpectralData& base, double h,
                                    const EliminationOptions& opts = {});

struct TwistCheck {
  Eigen::MatrixXd p1_bar;
  double det = 0.0;
  bool pass = false;
};

/// det of the mean order-1 theta jet against tol (fails when n != m).
TwistCheck check_twist(const FourierTaylorMap& Q, double tol = 1e-8);

struct BZeroCheck {
  bool applicable = false;  // false when 1 is in the spectrum
  bool pass = false;
  double b_norm = 0.0;
};

BZeroCheck check_b_zero(const NormalFormResult& r, const SpectralData& sd, double tol = 1e-12);

/// The torus of the original map: (u, c + R0, R1), together with the normal
/// displacement b - c it is translated by.
struct TranslatedTorus {
  Conjugacy G;
  Eigen::VectorXd translation;
};
TranslatedTorus translated_torus(const NormalFormResult& r, const Eigen::VectorXd& c);

nlohmann::json elimination_report(const EliminateBResult& r);
nlohmann::json elimination_report(const EliminateBetaResult& r);

}  // namespace kam
