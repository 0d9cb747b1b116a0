#include "kam/newton.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "kam/errors.hpp"
#include "kam/serialization.hpp"

namespace kam {

namespace {

FourierSeries const_vector(int n, int K, const Eigen::VectorXd& v) {
  return FourierSeries::constant(n, K, Eigen::MatrixXd(v));
}

// k x n matrix series of partial derivatives of a vector(k) series.
FourierSeries jacobian_series(const FourierSeries& f) {
  const int k = f.shape().rows;
  const int n = f.dim();
  std::vector<FourierSeries> comps;
  for (int i = 0; i < k; ++i) {
    const FourierSeries fi = f.component(i);
    for (int j = 0; j < n; ++j) comps.push_back(fi.derivative(j));
  }
  return FourierSeries::from_components(comps, Shape::matrix(k, n));
}

// Everything the linear pipeline needs from (G, P).
struct Context {
  const SpectralData& sd;
  int n, m, K;
  std::vector<int> U;
  Eigen::MatrixXd V, Vinv;
  Eigen::VectorXd a;
  FourierSeries p1;                    // n x m
  std::vector<std::vector<int>> p2;    // p2[i][j]: index of r_i r_j, or -1
  const NormalForm& P;
  FourierSeries R0jac;                 // m x n
  const Conjugacy& G;
  bool free_b;

  Context(const SpectralData& sd_, const NormalForm& P_, const Conjugacy& G_, bool free_b_)
      : sd(sd_), n(G_.n()), m(G_.m()), K(G_.cutoff()), U(routed_directions(sd_, free_b_)),
        V(sd_.real_V()), Vinv(sd_.real_Vinv()), a(sd_.eigenvalues.real()), P(P_), G(G_), free_b(free_b_) {
    p1 = P.map.degree() >= 1 ? P.map.theta_jet(1) : FourierSeries(n, K, Shape::matrix(n, m));
    p2.assign(m, std::vector<int>(m, -1));
    if (P.map.degree() >= 2)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) {
          std::vector<int> e(m, 0);
          ++e[i];
          ++e[j];
          p2[i][j] = P.map.monomials().index(e);
        }
    R0jac = jacobian_series(G.R0);
  }

  int unknowns() const { return n + 2 * static_cast<int>(U.size()) + m; }

  // 2 P2(., v) as an m x m series: column j = sum_i v_i h_{e_i+e_j} (x2 if i == j).
  FourierSeries two_p2(const FourierSeries& v) const {
    FourierSeries out(n, K, Shape::matrix(m, m));
    if (P.map.degree() < 2) return out;
    for (int j = 0; j < m; ++j)
      for (int i = 0; i < m; ++i) {
        const FourierSeries& h = P.map.r_coeff(p2[i][j]);
        const FourierSeries vi = v.component(i);
        const double f = i == j ? 2.0 : 1.0;
        for (int k = 0; k < m; ++k) {
          FourierSeries c = out.component(k, j);
          c += multiply(vi, h.component(k)) * f;
          out.set_component(k * m + j, c);
        }
      }
    return out;
  }
};

struct Probe {
  FourierSeries phi, R0, R1;
  Eigen::VectorXd F;  // beta_bar, b obstruction on U, mu, mean on U
};

// One pass through the three equations. `c` (eigen coordinates, length m)
// is added as a constant to Rdot0; only entries on U are used.
Probe pipeline(const Context& cx, const FourierSeries& q0, const FourierSeries& Q0, const FourierSeries& Q1,
               const Eigen::VectorXd& c) {
  const int n = cx.n;
  const int m = cx.m;
  const int u = static_cast<int>(cx.U.size());
  Probe out;
  out.F = Eigen::VectorXd::Zero(cx.unknowns());

  const NormalSolution ns = solve_normal(Q0, cx.sd, cx.free_b);
  out.R0 = ns.f;
  if (c.cwiseAbs().maxCoeff() > 0.0) out.R0 += const_vector(n, cx.K, cx.V * c);

  FourierSeries rhs2 = q0 + multiply(cx.p1, out.R0);
  const TangentialSolution ts = solve_tangential(rhs2, cx.sd);
  out.phi = ts.f;

  const auto step = cx.sd.step();
  FourierSeries rhs3 = Q1 - multiply(jacobian_series(out.R0).shift(step), cx.p1) + cx.two_p2(out.R0);
  const ReducibilitySolution rs = solve_reducibility(rhs3, cx.sd);
  out.R1 = rs.F;

  for (int i = 0; i < n; ++i) out.F(i) = ts.mu(i, 0).real();
  for (int k = 0; k < u; ++k) {
    const int j = cx.U[k];
    out.F(n + k) = ns.b_coords(j).real() - (1.0 - cx.a(j)) * c(j);
  }
  for (int j = 0; j < m; ++j) out.F(n + u + j) = rs.B_coords(j).real();
  if (u > 0) {
    const FourierSeries dR0 = multiply(cx.R0jac, out.phi) + multiply(cx.G.R1, out.R0);
    const Eigen::VectorXd mean = cx.Vinv * dR0.real_average().col(0);
    for (int k = 0; k < u; ++k) out.F(n + u + m + k) = mean(cx.U[k]);
  }
  return out;
}

Translation basis_translation(const Context& cx, int idx) {
  const int n = cx.n;
  const int m = cx.m;
  const int u = static_cast<int>(cx.U.size());
  Translation t = Translation::zero(n, m);
  if (idx < n) {
    t.beta(idx) = 1.0;
  } else if (idx < n + u) {
    t.b = cx.V.col(cx.U[idx - n]);
  } else {
    const int j = idx - n - u;
    t.B = cx.V.col(j) * cx.Vinv.row(j) / cx.a(j);
  }
  return t;
}

}  // namespace

nlohmann::json iteration_to_json(const IterationRecord& r) {
  return {{"iter", r.iter},
          {"residual", r.residual},
          {"dG_norm", r.dG_norm},
          {"dlambda_norm", r.dlambda_norm},
          {"counterterm_cond", r.counterterm_cond}};
}

std::vector<int> routed_directions(const SpectralData& sd, bool free_b) {
  if (!free_b) return sd.unit_eigenvalues();
  std::vector<int> all(sd.m());
  for (int j = 0; j < sd.m(); ++j) all[j] = j;
  return all;
}

LinearSolution solve_linearized(const ResidualJets& E, const PullBack& pb, const Conjugacy& G,
                                const NormalForm& P, const SpectralData& sd, bool free_b) {
  if (!sd.real_spectrum())
    throw DomainError("counter-term solve: complex eigenvalues of A are not supported");
  if (!sd.simple_spectrum()) throw DomainError("counter-term solve: A must have a simple spectrum");
  const Context cx(sd, P, G, free_b);
  const int n = cx.n;
  const int m = cx.m;
  const int u = static_cast<int>(cx.U.size());
  const int N = cx.unknowns();
  const Eigen::VectorXd zero_c = Eigen::VectorXd::Zero(m);

  Probe base = pipeline(cx, E.q0, E.Q0, E.Q1, zero_c);
  if (u > 0) {
    const Eigen::VectorXd mean = cx.Vinv * G.R0.real_average().col(0);
    for (int k = 0; k < u; ++k) base.F(n + u + m + k) += mean(cx.U[k]);
  }

  std::vector<Probe> probes;
  Eigen::MatrixXd J(N, N);
  for (int idx = 0; idx < n + u + m; ++idx) {
    const ResidualJets L = pb.apply(pb.translation_action(basis_translation(cx, idx)));
    probes.push_back(pipeline(cx, -L.q0, -L.Q0, -L.Q1, zero_c));
    J.col(idx) = probes.back().F;
  }
  for (int k = 0; k < u; ++k) {
    Eigen::VectorXd c = zero_c;
    c(cx.U[k]) = 1.0;
    const FourierSeries zn(n, cx.K, Shape::vector(n));
    const FourierSeries zm(n, cx.K, Shape::vector(m));
    const FourierSeries zmm(n, cx.K, Shape::matrix(m, m));
    probes.push_back(pipeline(cx, zn, zm, zmm, c));
    J.col(n + u + m + k) = probes.back().F;
  }

  LinearSolution out;
  out.jacobian = J;
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues();
  out.condition = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
  if (!(out.condition < 1e12)) {
    std::ostringstream os;
    os << "counter-term system singular (condition " << out.condition << ")";
    throw DomainError(os.str());
  }
  const Eigen::VectorXd z = J.fullPivLu().solve(-base.F);
  out.remaining_averages = (base.F + J * z).cwiseAbs().maxCoeff();

  out.phi_dot = base.phi;
  out.R0_dot = base.R0;
  out.R1_dot = base.R1;
  out.dlambda = Translation::zero(n, m);
  for (int idx = 0; idx < N; ++idx) {
    const Probe& p = probes[idx];
    out.phi_dot += p.phi * z(idx);
    out.R0_dot += p.R0 * z(idx);
    out.R1_dot += p.R1 * z(idx);
    if (idx < n + u + m) {
      const Translation t = basis_translation(cx, idx);
      out.dlambda += Translation{t.beta * z(idx), t.b * z(idx), t.B * z(idx)};
    }
  }
  return out;
}

Conjugacy apply_update(const Conjugacy& G, const FourierSeries& phi_dot, const FourierSeries& R0_dot,
                       const FourierSeries& R1_dot) {
  Conjugacy out = G;
  out.u += phi_dot + multiply(jacobian_series(G.u), phi_dot);
  out.R0 += multiply(jacobian_series(G.R0), phi_dot) + multiply(G.R1, R0_dot);
  FourierSeries dR1 = multiply(G.R1, R1_dot);
  for (int j = 0; j < G.n(); ++j) dR1 += multiply(phi_dot.component(j), G.R1.derivative(j));
  out.R1 += dR1;
  return out;
}

Conjugacy normalize_gauge(const Conjugacy& G, const SpectralData& sd) {
  Conjugacy out = G;
  const Eigen::VectorXd mean_u = G.u.real_average().col(0);
  if (mean_u.cwiseAbs().maxCoeff() > 0.0) {
    const Eigen::VectorXd s = -mean_u;
    const std::vector<double> sv(s.data(), s.data() + s.size());
    out.u = G.u.shift(sv) + const_vector(G.n(), G.cutoff(), s);
    out.R0 = G.R0.shift(sv);
    out.R1 = G.R1.shift(sv);
  }
  const Eigen::MatrixXd V = sd.real_V();
  const Eigen::MatrixXd Vinv = sd.real_Vinv();
  const Eigen::VectorXd d = (Vinv * out.R1.real_average() * V).diagonal();
  const Eigen::MatrixXd C = V * d.cwiseInverse().asDiagonal() * Vinv;
  out.R1 = right_multiply(out.R1, C.cast<cplx>());
  return out;
}

namespace {

NormalForm project_with(const FourierTaylorMap& QG, const Conjugacy& G, const Translation& lambda,
                        const SpectralData& sd) {
  const int d = QG.degree();
  const FourierTaylorMap Tinv = lambda.inverse_map(G.n(), d, G.cutoff());
  const FourierTaylorMap W = invert_G(G, d).compose(Tinv.compose(QG));
  return NormalForm::project(W, sd.alpha, sd.A);
}

struct Evaluated {
  NewtonState state;
  FourierTaylorMap QG;
};

Evaluated make_state(const FourierTaylorMap& Q, const Conjugacy& G, const Translation& lambda,
                     const SpectralData& sd) {
  FourierTaylorMap QG = Q.compose(G.to_map(Q.degree()));
  NormalForm P = project_with(QG, G, lambda, sd);
  return {{G, std::move(P), lambda}, std::move(QG)};
}

ResidualJets residual_with(const FourierTaylorMap& QG, const NewtonState& s, const PullBack& pb) {
  const FourierTaylorMap TGP = s.lambda.to_map(s.G.n(), QG.degree(), s.G.cutoff()).compose(pb.G_of_P());
  return pb.apply(QG - TGP);
}

struct InnerStep {
  Evaluated next;
  IterationRecord record;
  LinearSolution linear;
};

InnerStep step_from(const FourierTaylorMap& Q, const Evaluated& cur, const PullBack& pb, const ResidualJets& E,
                    const SpectralData& sd, const NewtonOptions& opts) {
  const NewtonState& s = cur.state;
  LinearSolution lin = solve_linearized(E, pb, s.G, s.P, sd, opts.free_b);
  const Conjugacy G1 = normalize_gauge(apply_update(s.G, lin.phi_dot, lin.R0_dot, lin.R1_dot), sd);
  Translation lam = s.lambda;
  lam += lin.dlambda;
  IterationRecord rec;
  rec.residual = E.norm();
  rec.dG_norm = G1.max_abs_diff(s.G);
  rec.dlambda_norm = lin.dlambda.norm();
  rec.counterterm_cond = lin.condition;
  return {make_state(Q, G1, lam, sd), rec, std::move(lin)};
}

}  // namespace

NormalForm project_normal_form(const FourierTaylorMap& Q, const Conjugacy& G, const Translation& lambda,
                               const SpectralData& sd) {
  return project_with(Q.compose(G.to_map(Q.degree())), G, lambda, sd);
}

ResidualJets state_residual(const FourierTaylorMap& Q, const NewtonState& state) {
  return pulled_back_residual(Q, state.G, state.P, state.lambda);
}

StepResult newton_step(const FourierTaylorMap& Q, const NewtonState& state, const SpectralData& sd,
                       const NewtonOptions& opts) {
  const Evaluated cur{state, Q.compose(state.G.to_map(Q.degree()))};
  const PullBack pb(state.G, state.P, state.lambda);
  const ResidualJets E = residual_with(cur.QG, state, pb);
  InnerStep st = step_from(Q, cur, pb, E, sd, opts);
  return {std::move(st.next.state), st.record, std::move(st.linear)};
}

NormalFormResult solve(const FourierTaylorMap& Q, const SpectralData& sd, const NewtonOptions& opts,
                       const std::optional<NewtonState>& start) {
  const int n = Q.n();
  const int m = Q.m();
  const int K = Q.cutoff();
  if (sd.n() != n || sd.m() != m) throw ShapeError("newton: spectral data does not match Q");
  if (!sd.real_spectrum())
    throw DomainError("newton: complex eigenvalues of A are not supported by the counter-term solve");

  Evaluated cur = start ? make_state(Q, start->G, start->lambda, sd)
                        : make_state(Q, Conjugacy::identity(n, m, K), Translation::zero(n, m), sd);
  NormalFormResult res;
  res.initial_distance = Q.max_abs_diff(cur.state.P.map);

  auto finish = [&](const std::string& status, const std::string& msg) {
    res.G = cur.state.G;
    res.P = cur.state.P;
    res.lambda = cur.state.lambda;
    res.status = status;
    res.converged = status == "converged";
    if (!res.converged && opts.throw_on_failure) throw ConvergenceError("newton: " + msg);
    return res;
  };

  double best = std::numeric_limits<double>::infinity();
  for (int it = 0;; ++it) {
    const PullBack pb(cur.state.G, cur.state.P, cur.state.lambda);
    const ResidualJets E = residual_with(cur.QG, cur.state, pb);
    const double r = E.norm();
    res.residual = r;
    IterationRecord rec;
    rec.iter = it;
    rec.residual = r;
    if (r <= opts.residual_tol) {
      res.iterations.push_back(rec);
      if (opts.on_iteration) opts.on_iteration(rec);
      return finish("converged", "");
    }
    if (r > opts.divergence_factor * best) {
      res.iterations.push_back(rec);
      if (opts.on_iteration) opts.on_iteration(rec);
      std::ostringstream os;
      os << "diverged at iteration " << it << " (residual " << r << ", best " << best << ")";
      return finish("diverged", os.str());
    }
    best = std::min(best, r);
    if (it >= opts.max_iter) {
      res.iterations.push_back(rec);
      if (opts.on_iteration) opts.on_iteration(rec);
      std::ostringstream os;
      os << "max_iter " << opts.max_iter << " reached (residual " << r << ")";
      return finish("max_iter", os.str());
    }
    InnerStep st = step_from(Q, cur, pb, E, sd, opts);
    st.record.iter = it;
    res.iterations.push_back(st.record);
    if (opts.on_iteration) opts.on_iteration(st.record);
    cur = std::move(st.next);
    if (cur.state.G.distance_to_identity() > opts.max_distance) {
      std::ostringstream os;
      os << "trust guard: |G - id| = " << cur.state.G.distance_to_identity() << " exceeds "
         << opts.max_distance;
      return finish("trust_guard", os.str());
    }
  }
}

double fit_convergence_order(const std::vector<double>& residuals, double floor) {
  std::vector<double> pre;
  for (double r : residuals)
    if (r > floor) pre.push_back(r);
  if (pre.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t s = pre.size() - 3;
  double sxx = 0.0, sxy = 0.0, mx = 0.0, my = 0.0;
  for (std::size_t k = s; k + 1 < pre.size(); ++k) {
    mx += std::log(pre[k]);
    my += std::log(pre[k + 1]);
  }
  mx /= 2.0;
  my /= 2.0;
  for (std::size_t k = s; k + 1 < pre.size(); ++k) {
    const double x = std::log(pre[k]) - mx;
    sxx += x * x;
    sxy += x * (std::log(pre[k + 1]) - my);
  }
  return sxy / sxx;
}

nlohmann::json result_to_json(const NormalFormResult& r) {
  nlohmann::json its = nlohmann::json::array();
  for (const auto& rec : r.iterations) its.push_back(iteration_to_json(rec));
  return {{"converged", r.converged},
          {"status", r.status},
          {"residual", r.residual},
          {"initial_distance", r.initial_distance},
          {"G", conjugacy_to_json(r.G)},
          {"P", map_to_json(r.P.map)},
          {"lambda", translation_to_json(r.lambda)},
          {"iterations", its}};
}

}  // namespace kam
