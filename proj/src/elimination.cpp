#include "kam/elimination.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include "kam/errors.hpp"
#include "kam/serialization.hpp"

namespace kam {
namespace {

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double max_abs(const Eigen::MatrixXd& M) { return M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff(); }

int inner_steps(const NormalFormResult& r) {
  return r.iterations.empty() ? 0 : static_cast<int>(r.iterations.size()) - 1;
}

// Real eigen-decomposition of the ambient matrix; rejects what the outer
// loops cannot follow.
struct Eigen1 {
  Eigen::MatrixXcd V;
  Eigen::VectorXd a;
};

Eigen1 real_simple_spectrum(const SpectralData& sd, const char* who) {
  if (!sd.real_spectrum())
    throw DomainError(std::string(who) + ": complex eigenvalues of A are not supported");
  if (!sd.simple_spectrum()) throw DomainError(std::string(who) + ": repeated eigenvalues of A");
  Eigen1 e{sd.V, sd.eigenvalues.real()};
  for (int j = 0; j < e.a.size(); ++j)
    if (std::abs(e.a(j)) < 1e-8) throw DomainError(std::string(who) + ": zero eigenvalue of A");
  return e;
}

// The eigenvalues must stay real, nonzero, distinct, on the same side of 0
// as at the start, and on the same side of 1 (the routed set of the
// constrained counter-term would change otherwise).
void check_region(const Eigen::VectorXd& a, const Eigen::VectorXd& a0, const char* who) {
  for (int j = 0; j < a.size(); ++j) {
    const bool ok = std::isfinite(a(j)) && std::abs(a(j)) > 1e-8 && (a(j) > 0) == (a0(j) > 0) &&
                    (std::abs(a0(j) - 1.0) <= 1e-10 || (a(j) > 1.0) == (a0(j) > 1.0));
    if (!ok) {
      std::ostringstream os;
      os << who << ": eigenvalue " << j << " left the admissible region (a = " << a(j) << ", start "
         << a0(j) << ")";
      throw DomainError(os.str());
    }
    for (int i = 0; i < j; ++i)
      if (std::abs(a(i) - a(j)) < 1e-8) throw DomainError(std::string(who) + ": eigenvalues collided");
  }
}

Eigen::VectorXd B_coords(const Translation& lam, const Eigen::MatrixXcd& V) {
  const Eigen::MatrixXcd D = V.inverse() * lam.B.cast<cplx>() * V;
  return D.diagonal().real();
}

struct OuterTrace {
  Eigen::VectorXd x;
  int iters = 0;
  std::vector<double> history;
};

// Newton on F(x) = 0 with a Broyden-updated Jacobian; finite-difference
// refresh when a step does not contract.
OuterTrace outer_newton(Eigen::VectorXd x, Eigen::MatrixXd J,
                        const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& eval,
                        const std::function<void(const Eigen::VectorXd&)>& check,
                        const EliminationOptions& opts, const char* who) {
  OuterTrace tr;
  Eigen::VectorXd F = eval(x);
  double best = max_abs(F);
  tr.history.push_back(best);
  auto refresh = [&](const Eigen::VectorXd& at, const Eigen::VectorXd& Fat) {
    for (int j = 0; j < at.size(); ++j) {
      Eigen::VectorXd xp = at;
      const double h = opts.fd_step * std::max(1.0, std::abs(at(j)));
      xp(j) += h;
      J.col(j) = (eval(xp) - Fat) / h;
    }
    // Leaves the cached state of `eval` at the accepted iterate.
    eval(at);
  };
  while (max_abs(F) > opts.tol) {
    if (tr.iters >= opts.max_outer) {
      std::ostringstream os;
      os << who << ": no convergence in " << opts.max_outer << " outer iterations (|F| = " << max_abs(F)
         << ")";
      throw ConvergenceError(os.str());
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) throw ConvergenceError(std::string(who) + ": singular outer Jacobian");
    const Eigen::VectorXd dx = -lu.solve(F);
    const Eigen::VectorXd xn = x + dx;
    check(xn);
    Eigen::VectorXd Fn = eval(xn);
    ++tr.iters;
    const double fn = max_abs(Fn);
    if (!std::isfinite(fn) || fn > opts.divergence_factor * std::max(best, opts.tol)) {
      std::ostringstream os;
      os << who << ": outer iteration diverged (|F| = " << fn << ", best " << best << ")";
      throw ConvergenceError(os.str());
    }
    if (fn > opts.contraction * max_abs(F) && fn > opts.tol) {
      refresh(xn, Fn);
    } else {
      J += (Fn - F - J * dx) * dx.transpose() / dx.squaredNorm();
    }
    x = xn;
    F = std::move(Fn);
    best = std::min(best, fn);
    tr.history.push_back(fn);
  }
  tr.x = x;
  return tr;
}

// Columns of a matrix(n x m) series times a constant real matrix M (m x k).
FourierSeries right_multiply(const FourierSeries& f, const Eigen::MatrixXd& M) {
  const Shape s = f.shape();
  std::vector<FourierSeries> out;
  for (int i = 0; i < s.rows; ++i)
    for (int j = 0; j < M.cols(); ++j) {
      FourierSeries acc(f.dim(), f.cutoff());
      for (int l = 0; l < s.cols; ++l)
        if (M(l, j) != 0.0) acc += M(l, j) * f.component(i, l);
      out.push_back(acc);
    }
  return FourierSeries::from_components(out, Shape::matrix(s.rows, static_cast<int>(M.cols())));
}

}  // namespace

EliminateBResult eliminate_B(const FourierTaylorMap& Q, const SpectralData& base,
                             const EliminationOptions& opts, const std::optional<NewtonState>& start) {
  const Eigen1 e = real_simple_spectrum(base, "eliminate_B");
  const Eigen::VectorXd a0 = e.a;
  EliminateBResult out;
  std::optional<NewtonState> warm = start;
  auto eval = [&](const Eigen::VectorXd& a) -> Eigen::VectorXd {
    SpectralData sd = SpectralData::with_basis(base.alpha, e.V, a.cast<cplx>(), base.resonance_tolerance);
    NormalFormResult r = solve(Q, sd, opts.newton, warm);
    out.inner_iters_total += inner_steps(r);
    warm = NewtonState{r.G, r.P, r.lambda};
    const Eigen::VectorXd mu = B_coords(r.lambda, e.V);
    out.sd = std::move(sd);
    out.result = std::move(r);
    return mu;
  };
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(a0.size(), a0.size());
  for (int j = 0; j < a0.size(); ++j) J(j, j) = -1.0 / a0(j);
  const OuterTrace tr = outer_newton(
      a0, J, eval, [&](const Eigen::VectorXd& a) { check_region(a, a0, "eliminate_B"); }, opts,
      "eliminate_B");
  out.A_bar = out.sd.A;
  out.outer_iters = tr.iters;
  out.history = tr.history;
  return out;
}

Eigen::MatrixXd outer_jacobian_B(const FourierTaylorMap& Q, const SpectralData& base, double h,
                                 const NewtonOptions& opts) {
  const Eigen1 e = real_simple_spectrum(base, "outer_jacobian_B");
  const int m = static_cast<int>(e.a.size());
  auto mu = [&](const Eigen::VectorXd& a) {
    const SpectralData sd = SpectralData::with_basis(base.alpha, e.V, a.cast<cplx>(), base.resonance_tolerance);
    return B_coords(solve(Q, sd, opts).lambda, e.V);
  };
  Eigen::MatrixXd J(m, m);
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXd ap = e.a, am = e.a;
    ap(j) += h;
    am(j) -= h;
    J.col(j) = (mu(ap) - mu(am)) / (2.0 * h);
  }
  return J;
}

TorsionFlattening flatten_torsion(const FourierTaylorMap& Q, const SpectralData& sd) {
  const int n = Q.n();
  const int m = Q.m();
  const int K = Q.cutoff();
  const int d = Q.degree();
  if (d < 1) throw ShapeError("flatten_torsion: Q needs jets of degree >= 1");
  const Eigen1 e = real_simple_spectrum(sd, "flatten_torsion");
  const Eigen::MatrixXd V = e.V.real();
  const Eigen::MatrixXd Vinv = V.inverse();

  TorsionFlattening out;
  const FourierSeries p1 = Q.theta_jet(1);
  out.p1_bar = p1.real_average();
  const FourierSeries g = right_multiply(FourierSeries::constant(n, K, out.p1_bar) - p1, V);
  std::vector<FourierSeries> cols;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < m; ++j) {
      const FourierSeries gij = g.component(i, j);
      // Zero-average right side: for a_j = 1 the mean of psi is free and set to 0.
      cols.push_back(std::abs(e.a(j) - 1.0) <= sd.resonance_tolerance
                         ? solve_tangential(gij, sd).f
                         : solve_weighted(e.a(j), 1.0, gij, sd));
    }
  out.phi_hat = right_multiply(FourierSeries::from_components(cols, Shape::matrix(n, m)), Vinv);

  out.F = FourierTaylorMap::identity(n, m, d, K);
  for (int j = 0; j < m; ++j) {
    std::vector<FourierSeries> col;
    for (int i = 0; i < n; ++i) col.push_back(out.phi_hat.component(i, j));
    out.F.theta_coeff(out.F.monomials().unit(j)) += FourierSeries::from_components(col, Shape::vector(n));
  }
  // X <- X - (F o X - id) gains one r-order per pass since F - id = O(r).
  const FourierTaylorMap id = FourierTaylorMap::identity(n, m, d, K);
  FourierTaylorMap X = id;
  for (int k = 0; k <= d; ++k) X -= out.F.compose(X) - id;
  out.F_inverse = X;
  out.conjugated = out.F.compose(Q.compose(X));
  return out;
}

FourierTaylorMap action_shift(const FourierTaylorMap& Q, const Eigen::VectorXd& c) {
  if (c.size() != Q.m()) throw ShapeError("action_shift: c must have m entries");
  FourierTaylorMap S = FourierTaylorMap::identity(Q.n(), Q.m(), Q.degree(), Q.cutoff());
  S.r_coeff(0) += FourierSeries::constant(Q.n(), Q.cutoff(), c);
  return Q.compose(S);
}

EliminateBetaResult eliminate_beta(const FourierTaylorMap& Q, const SpectralData& base,
                                   const EliminationOptions& opts) {
  const int n = Q.n();
  const int m = Q.m();
  if (n != m) throw DomainError("eliminate_beta: needs n == m (square torsion)");
  const Eigen1 e = real_simple_spectrum(base, "eliminate_beta");
  const TwistCheck tw = check_twist(Q, opts.twist_tol);
  if (!tw.pass) {
    std::ostringstream os;
    os << "eliminate_beta: twist condition fails (|det p1_bar| = " << std::abs(tw.det) << " <= "
       << opts.twist_tol << ")";
    throw DomainError(os.str());
  }

  EliminateBetaResult out;
  out.p1_bar = tw.p1_bar;
  out.preconditioned = opts.precondition;
  out.map = opts.precondition ? flatten_torsion(Q, base).conjugated : Q;

  Eigen::MatrixXd Jc = tw.p1_bar;
  if (!opts.newton.free_b) Jc = -tw.p1_bar * (base.A - Eigen::MatrixXd::Identity(m, m)).inverse();

  const Eigen::VectorXd a0 = e.a;
  std::optional<NewtonState> warm;
  Eigen::VectorXd a_cur = a0;

  if (!opts.joint) {
    auto eval = [&](const Eigen::VectorXd& c) -> Eigen::VectorXd {
      const SpectralData sd_start =
          SpectralData::with_basis(base.alpha, e.V, a_cur.cast<cplx>(), base.resonance_tolerance);
      EliminateBResult r = eliminate_B(action_shift(out.map, c), sd_start, opts, warm);
      out.inner_iters_total += r.inner_iters_total;
      warm = NewtonState{r.result.G, r.result.P, r.result.lambda};
      a_cur = r.sd.eigenvalues.real();
      out.sd = r.sd;
      out.A_bar = r.A_bar;
      out.result = std::move(r.result);
      out.c_bar = c;
      return out.result.lambda.beta;
    };
    const OuterTrace tr = outer_newton(Eigen::VectorXd::Zero(n), Jc, eval, [](const Eigen::VectorXd&) {},
                                       opts, "eliminate_beta");
    out.outer_iters = tr.iters;
    out.history = tr.history;
    return out;
  }

  // Joint Newton on x = (a, c), F = (eigen-diagonal of B, beta).
  auto eval = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const Eigen::VectorXd a = x.head(m);
    const Eigen::VectorXd c = x.tail(n);
    SpectralData sd = SpectralData::with_basis(base.alpha, e.V, a.cast<cplx>(), base.resonance_tolerance);
    NormalFormResult r = solve(action_shift(out.map, c), sd, opts.newton, warm);
    out.inner_iters_total += inner_steps(r);
    warm = NewtonState{r.G, r.P, r.lambda};
    Eigen::VectorXd F(m + n);
    F << B_coords(r.lambda, e.V), r.lambda.beta;
    out.sd = std::move(sd);
    out.A_bar = out.sd.A;
    out.result = std::move(r);
    out.c_bar = c;
    return F;
  };
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(m + n, m + n);
  for (int j = 0; j < m; ++j) J(j, j) = -1.0 / a0(j);
  J.bottomRightCorner(n, n) = Jc;
  Eigen::VectorXd x0(m + n);
  x0 << a0, Eigen::VectorXd::Zero(n);
  const OuterTrace tr = outer_newton(
      x0, J, eval, [&](const Eigen::VectorXd& x) { check_region(x.head(m), a0, "eliminate_beta"); }, opts,
      "eliminate_beta");
  out.outer_iters = tr.iters;
  out.history = tr.history;
  return out;
}

Eigen::MatrixXd outer_jacobian_beta(const FourierTaylorMap& Q, const SpectralData& base, double h,
                                    const EliminationOptions& opts) {
  const int n = Q.n();
  auto beta = [&](const Eigen::VectorXd& c) {
    return eliminate_B(action_shift(Q, c), base, opts).result.lambda.beta;
  };
  Eigen::MatrixXd J(n, Q.m());
  for (int j = 0; j < Q.m(); ++j) {
    Eigen::VectorXd cp = Eigen::VectorXd::Zero(Q.m()), cm = cp;
    cp(j) = h;
    cm(j) = -h;
    J.col(j) = (beta(cp) - beta(cm)) / (2.0 * h);
  }
  return J;
}

TwistCheck check_twist(const FourierTaylorMap& Q, double tol) {
  TwistCheck t;
  t.p1_bar = Q.theta_jet(1).real_average();
  if (t.p1_bar.rows() != t.p1_bar.cols()) return t;
  t.det = t.p1_bar.determinant();
  t.pass = std::abs(t.det) > tol;
  return t;
}

BZeroCheck check_b_zero(const NormalFormResult& r, const SpectralData& sd, double tol) {
  BZeroCheck c;
  c.b_norm = max_abs(r.lambda.b);
  c.applicable = sd.unit_eigenvalues().empty();
  c.pass = c.applicable && c.b_norm <= tol;
  return c;
}

TranslatedTorus translated_torus(const NormalFormResult& r, const Eigen::VectorXd& c) {
  TranslatedTorus t{r.G, r.lambda.b - c};
  t.G.R0 += FourierSeries::constant(r.G.n(), r.G.cutoff(), c);
  return t;
}

nlohmann::json elimination_report(const EliminateBResult& r) {
  const int n = r.result.lambda.beta.size();
  return {{"A_bar", matrix_to_json(r.A_bar)},
          {"c_bar", vector_to_json(Eigen::VectorXd::Zero(n))},
          {"beta_norm", max_abs(r.result.lambda.beta)},
          {"B_norm", max_abs(r.result.lambda.B)},
          {"b", vector_to_json(r.result.lambda.b)},
          {"outer_iters", r.outer_iters},
          {"inner_iters_total", r.inner_iters_total}};
}

nlohmann::json elimination_report(const EliminateBetaResult& r) {
  return {{"A_bar", matrix_to_json(r.A_bar)},
          {"c_bar", vector_to_json(r.c_bar)},
          {"beta_norm", max_abs(r.result.lambda.beta)},
          {"B_norm", max_abs(r.result.lambda.B)},
          {"b", vector_to_json(r.result.lambda.b)},
          {"translation", vector_to_json(r.result.lambda.b - r.c_bar)},
          {"preconditioned", r.preconditioned},
          {"outer_iters", r.outer_iters},
          {"inner_iters_total", r.inner_iters_total}};
}

}  // namespace kam
