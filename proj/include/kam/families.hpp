#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kam/conjugacy.hpp"
#include "kam/fourier_taylor.hpp"

namespace kam {

/// eps (a cos(k.theta) + b sin(k.theta)) r^nu added to one output component.
struct TrigTerm {
  bool theta = false;  // theta component (else r component)
  int index = 0;
  std::vector<int> k;
  std::vector<int> r;  // exponent nu; empty means r^0
  double a = 0.0;
  double b = 0.0;
};

/// Q(theta, r) = (theta + 2 pi alpha + t r + eps sin theta, b0 + N r + eps cos theta).
struct RussmannParams {
  double alpha = 0.0;
  double epsilon = 1e-3;
  double b0 = 0.0;
  double twist = 1.0;
  double normal = 1.5;
};
FourierTaylorMap russmann_1d(const RussmannParams& p, int cutoff, int degree);

/// Q(theta, r) = (theta + 2 pi alpha + p1 r + eps f(theta, r), b0 + N r + eps g(theta, r))
/// with f, g sums of trigonometric terms.
struct DiagParams {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd N;   // normal matrix (m x m)
  Eigen::MatrixXd p1;  // torsion (n x m)
  Eigen::VectorXd b0;  // m
  double epsilon = 1e-4;
  std::vector<TrigTerm> terms;
};
/// Default perturbation for n = m = 2 (see the README for the formula).
std::vector<TrigTerm> default_diag_terms(int n, int m);
FourierTaylorMap diag_nd(const DiagParams& p, int cutoff, int degree);

/// Adds eps * term to a map.
void add_trig_term(FourierTaylorMap& Q, const TrigTerm& t, double eps);

/// Q := T_lambda0 o G0 o P0 o G0^{-1} with n = m = 1:
///   G0 = (theta + g sin theta, g (cos theta + 0.5 sin 2 theta) + (1 + g cos theta) r)
///   P0 = (theta + 2 pi alpha + (1 + 0.01 cos theta) r, A r + 0.1 r^2 + 0.05 sin theta r^2)
///   lambda0 = (beta0, 0, B0)
/// G0 is in the solver's gauge: <u> = 0 and <R1> = 1.
struct ConstructedParams {
  double alpha = 0.0;
  double A = 2.0;
  double g = 1e-2;
  double beta0 = 3e-3;
  double B0 = -4e-3;
};
struct Constructed {
  FourierTaylorMap Q;
  Conjugacy G0;
  NormalForm P0;
  Translation lambda0;
};
Constructed constructed_1d(const ConstructedParams& p, int cutoff, int degree);

}  // namespace kam
