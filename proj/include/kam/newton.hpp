#pragma once

#include <Eigen/Dense>
#include <functional>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "kam/cohomology.hpp"
#include "kam/conjugacy.hpp"
#include "kam/fourier_taylor.hpp"

namespace kam {

struct IterationRecord {
  int iter = 0;
  double residual = 0.0;
  double dG_norm = 0.0;
  double dlambda_norm = 0.0;
  double counterterm_cond = 0.0;
};

nlohmann::json iteration_to_json(const IterationRecord& r);

struct NewtonOptions {
  int max_iter = 30;
  double residual_tol = 1e-12;
  /// Divergence when the residual exceeds this factor times the best so far.
  double divergence_factor = 1e3;
  /// Trust guard: largest coefficient distance of G to the identity.
  double max_distance = 0.5;
  /// b unconstrained (every average of the r equation is a counter-term);
  /// the gauge <R0> = 0 then fixes the torus.
  bool free_b = false;
  /// Throw ConvergenceError on failure; otherwise return with status set.
  bool throw_on_failure = true;
  /// Called after each residual evaluation.
  std::function<void(const IterationRecord&)> on_iteration;
};

struct NewtonState {
  Conjugacy G;
  NormalForm P;
  Translation lambda;
};

struct NormalFormResult {
  Conjugacy G;
  NormalForm P;
  Translation lambda;
  std::vector<IterationRecord> iterations;
  bool converged = false;
  std::string status;  // converged, diverged, trust_guard, max_iter
  double residual = 0.0;
  /// Largest coefficient distance between Q and its starting normal form.
  double initial_distance = 0.0;
};

/// Solution of the linearized system for one residual.
struct LinearSolution {
  FourierSeries phi_dot;  // vector(n)
  FourierSeries R0_dot;   // vector(m)
  FourierSeries R1_dot;   // matrix(m x m)
  Translation dlambda;
  double condition = 1.0;       // of the assembled counter-term matrix
  Eigen::MatrixXd jacobian;     // the assembled matrix itself
  double remaining_averages = 0.0;  // obstructions after the counter-term
};

/// Counter-term coordinates: beta, b on the routed eigen-directions, the
/// eigen-diagonal of B. Routed directions are all of them when free_b,
/// else those with eigenvalue 1.
std::vector<int> routed_directions(const SpectralData& sd, bool free_b);

/// Solves, for the residual jets E pulled back at (G, P, lambda),
///   Rdot0(theta + 2 pi alpha) - A Rdot0 = E_r0 - L_r0
///   phidot(theta + 2 pi alpha) - phidot = E_theta0 + p1 Rdot0 - L_theta0
///   Rdot1(theta + 2 pi alpha) A - A Rdot1 = E_r1 - Rdot0'(theta + 2 pi alpha) p1 + 2 P2(., Rdot0) - L_r1
/// with L = pb.apply(translation_action(dlambda)) and dlambda chosen so that
/// every obstruction vanishes. Averages in the kernels are zero, except that
/// <R0 + dR0> vanishes on routed directions.
LinearSolution solve_linearized(const ResidualJets& E, const PullBack& pb, const Conjugacy& G,
                                const NormalForm& P, const SpectralData& sd, bool free_b);

/// G + G' Gdot for Gdot = (phidot, Rdot0 + Rdot1 r).
Conjugacy apply_update(const Conjugacy& G, const FourierSeries& phi_dot, const FourierSeries& R0_dot,
                       const FourierSeries& R1_dot);

/// Composes G on the right with (theta + s, C r) so that <u> = 0 and the
/// eigen-diagonal of <R1> is 1.
Conjugacy normalize_gauge(const Conjugacy& G, const SpectralData& sd);

/// Projection of G^{-1} o T_lambda^{-1} o Q o G onto U(alpha, A).
NormalForm project_normal_form(const FourierTaylorMap& Q, const Conjugacy& G, const Translation& lambda,
                               const SpectralData& sd);

struct StepResult {
  NewtonState state;
  IterationRecord record;
  LinearSolution linear;
};

/// One Newton step from `state`; record.residual is the residual at `state`.
StepResult newton_step(const FourierTaylorMap& Q, const NewtonState& state, const SpectralData& sd,
                       const NewtonOptions& opts = {});

/// Residual jets of Q at a state.
ResidualJets state_residual(const FourierTaylorMap& Q, const NewtonState& state);

/// Iterates newton_step from (id, projection of Q, 0), or from the (G, lambda)
/// of `start` with P re-projected. Throws ConvergenceError on divergence, a
/// guard violation or max_iter.
NormalFormResult solve(const FourierTaylorMap& Q, const SpectralData& sd, const NewtonOptions& opts = {},
                       const std::optional<NewtonState>& start = std::nullopt);

/// Slope of log r_{k+1} against log r_k over the last three residuals above
/// `floor` (least squares over the consecutive pairs).
double fit_convergence_order(const std::vector<double>& residuals, double floor);

nlohmann::json result_to_json(const NormalFormResult& r);

}  // namespace kam
