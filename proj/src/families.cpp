#include "kam/families.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kam/errors.hpp"

namespace kam {

namespace {

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// a cos(k.theta) + b sin(k.theta) as a scalar series.
FourierSeries trig(int n, int K, const std::vector<int>& k, double a, double b) {
  FourierSeries f(n, K);
  int l = 0;
  for (int kj : k) l = std::max(l, std::abs(kj));
  if (l > K) throw ShapeError("trigonometric term beyond the cutoff");
  bool zero = true;
  for (int kj : k) zero = zero && kj == 0;
  if (zero) {
    f.coeff(f.zero_mode_index()) = a;
    return f;
  }
  std::vector<int> km(k.size());
  for (std::size_t j = 0; j < k.size(); ++j) km[j] = -k[j];
  f.coeff(f.mode_index(k)) += cplx(0.5 * a, -0.5 * b);
  f.coeff(f.mode_index(km)) += cplx(0.5 * a, 0.5 * b);
  return f;
}

FourierSeries unit_vector_series(int n, int K, int rows, int index, const FourierSeries& s) {
  FourierSeries out(n, K, Shape::vector(rows));
  out.set_component(index, s);
  return out;
}

}  // namespace

void add_trig_term(FourierTaylorMap& Q, const TrigTerm& t, double eps) {
  const int n = Q.n();
  const int m = Q.m();
  if (static_cast<int>(t.k.size()) != n) throw ShapeError("trigonometric term: k has the wrong length");
  std::vector<int> nu = t.r.empty() ? std::vector<int>(m, 0) : t.r;
  if (static_cast<int>(nu.size()) != m) throw ShapeError("trigonometric term: r has the wrong length");
  const int mono = Q.monomials().index(nu);
  if (mono < 0) return;  // beyond the jet degree
  const int rows = t.theta ? n : m;
  if (t.index < 0 || t.index >= rows) throw ShapeError("trigonometric term: component out of range");
  const FourierSeries s = trig(n, Q.cutoff(), t.k, eps * t.a, eps * t.b);
  if (t.theta) Q.theta_coeff(mono) += unit_vector_series(n, Q.cutoff(), n, t.index, s);
  else Q.r_coeff(mono) += unit_vector_series(n, Q.cutoff(), m, t.index, s);
}

FourierTaylorMap russmann_1d(const RussmannParams& p, int cutoff, int degree) {
  FourierTaylorMap Q(1, 1, degree, cutoff, kUnbounded);
  Q.set_rotation({2.0 * std::numbers::pi * p.alpha});
  Q.r_coeff(0) = FourierSeries::scalar_constant(1, cutoff, p.b0).reshaped(Shape::vector(1));
  if (degree >= 1) {
    Q.theta_coeff(1) = FourierSeries::scalar_constant(1, cutoff, p.twist).reshaped(Shape::vector(1));
    Q.r_coeff(1) = FourierSeries::scalar_constant(1, cutoff, p.normal).reshaped(Shape::vector(1));
  }
  add_trig_term(Q, {true, 0, {1}, {}, 0.0, 1.0}, p.epsilon);
  add_trig_term(Q, {false, 0, {1}, {}, 1.0, 0.0}, p.epsilon);
  return Q;
}

std::vector<TrigTerm> default_diag_terms(int n, int m) {
  if (n != 2 || m != 2) throw ShapeError("default perturbation is defined for n = m = 2");
  return {{true, 0, {1, 0}, {}, 0.0, 1.0},   {true, 0, {1, 1}, {}, 0.0, 0.5},
          {true, 1, {0, 1}, {}, 0.0, 1.0},   {true, 1, {1, -1}, {}, 0.5, 0.0},
          {false, 0, {1, 0}, {}, 1.0, 0.0},  {false, 0, {0, 1}, {}, 0.0, 0.5},
          {false, 1, {0, 1}, {}, 1.0, 0.0},  {false, 1, {1, 1}, {}, 0.5, 0.0},
          {false, 0, {1, 0}, {1, 0}, 0.5, 0.0}, {false, 1, {0, 1}, {0, 1}, 0.0, 0.5}};
}

FourierTaylorMap diag_nd(const DiagParams& p, int cutoff, int degree) {
  const int n = static_cast<int>(p.alpha.size());
  const int m = static_cast<int>(p.N.rows());
  if (p.N.cols() != m || p.p1.rows() != n || p.p1.cols() != m || p.b0.size() != m)
    throw ShapeError("diag_nd: inconsistent dimensions");
  FourierTaylorMap Q(n, m, degree, cutoff, kUnbounded);
  std::vector<double> rot(n);
  for (int i = 0; i < n; ++i) rot[i] = 2.0 * std::numbers::pi * p.alpha[i];
  Q.set_rotation(rot);
  Q.r_coeff(0) = FourierSeries::constant(n, cutoff, Eigen::MatrixXd(p.b0));
  if (degree >= 1) {
    Q.set_theta_jet(1, FourierSeries::constant(n, cutoff, p.p1));
    Q.set_r_jet(1, FourierSeries::constant(n, cutoff, p.N));
  }
  for (const auto& t : p.terms) add_trig_term(Q, t, p.epsilon);
  return Q;
}

Constructed constructed_1d(const ConstructedParams& p, int cutoff, int degree) {
  const int K = cutoff;
  if (degree < 2) throw ShapeError("constructed family needs degree >= 2");
  Conjugacy G0 = Conjugacy::identity(1, 1, K);
  G0.u += trig(1, K, {1}, 0.0, p.g).reshaped(Shape::vector(1));
  G0.R0 += (trig(1, K, {1}, p.g, 0.0) + trig(1, K, {2}, 0.0, 0.5 * p.g)).reshaped(Shape::vector(1));
  G0.R1 += trig(1, K, {1}, p.g, 0.0).reshaped(Shape::matrix(1, 1));

  FourierTaylorMap P(1, 1, degree, K, kUnbounded);
  P.set_rotation({2.0 * std::numbers::pi * p.alpha});
  P.theta_coeff(1) = (FourierSeries::scalar_constant(1, K, 1.0) + trig(1, K, {1}, 0.01, 0.0)).reshaped(Shape::vector(1));
  P.r_coeff(1) = FourierSeries::scalar_constant(1, K, p.A).reshaped(Shape::vector(1));
  P.r_coeff(2) = (FourierSeries::scalar_constant(1, K, 0.1) + trig(1, K, {1}, 0.0, 0.05)).reshaped(Shape::vector(1));
  const Eigen::VectorXd alpha = Eigen::VectorXd::Constant(1, p.alpha);
  const Eigen::MatrixXd A = Eigen::MatrixXd::Constant(1, 1, p.A);
  NormalForm P0{P, alpha, A};

  const Translation lambda0 = Translation::make(Eigen::VectorXd::Constant(1, p.beta0), Eigen::VectorXd::Zero(1),
                                                Eigen::MatrixXd::Constant(1, 1, p.B0), A);
  FourierTaylorMap Q = normal_form_operator(G0, P0, lambda0);
  return {std::move(Q), std::move(G0), std::move(P0), lambda0};
}

}  // namespace kam
