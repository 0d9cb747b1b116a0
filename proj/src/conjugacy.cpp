#include "kam/conjugacy.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "kam/errors.hpp"
#include "kam/serialization.hpp"
#include "kam/theta_argument.hpp"

namespace kam {

namespace {

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

std::vector<GridJet> series_to_jets(const FourierSeries& f, const GridSpec& grid,
                                    const std::shared_ptr<const MonomialSet>& set) {
  const auto v = f.to_real_grid(grid);
  const std::size_t pts = grid.size();
  std::vector<GridJet> out;
  for (int c = 0; c < f.components(); ++c) {
    GridJet j(set, pts);
    std::copy_n(v.begin() + c * pts, pts, j.coef(0).begin());
    out.push_back(std::move(j));
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Conjugacy

Conjugacy Conjugacy::identity(int n, int m, int cutoff) {
  return {FourierSeries(n, cutoff, Shape::vector(n)), FourierSeries(n, cutoff, Shape::vector(m)),
          FourierSeries::constant(n, cutoff, Eigen::MatrixXd(Eigen::MatrixXd::Identity(m, m)))};
}

FourierTaylorMap Conjugacy::to_map(int degree) const {
  const int nn = n();
  const int mm = m();
  FourierTaylorMap g(nn, mm, degree, cutoff(), kUnbounded);
  g.theta_coeff(0) = u;
  g.r_coeff(0) = R0;
  if (degree >= 1) g.set_r_jet(1, R1);
  return g;
}

void Conjugacy::check_invertible(const GridSpec& grid, double tol) const {
  const int mm = m();
  const auto v = R1.to_real_grid(grid);
  const std::size_t pts = grid.size();
  Eigen::MatrixXd M(mm, mm);
  for (std::size_t p = 0; p < pts; ++p) {
    for (int c = 0; c < mm * mm; ++c) M(c / mm, c % mm) = v[c * pts + p];
    if (std::abs(M.determinant()) < tol) throw DomainError("Conjugacy: R1 singular on the grid");
  }
}

double Conjugacy::distance_to_identity() const {
  return std::max({u.max_abs(), R0.max_abs(),
                   R1.max_abs_diff(FourierSeries::constant(R1.dim(), R1.cutoff(),
                                                           Eigen::MatrixXd(Eigen::MatrixXd::Identity(m(), m()))))});
}

double Conjugacy::max_abs_diff(const Conjugacy& other) const {
  return std::max({u.max_abs_diff(other.u), R0.max_abs_diff(other.R0), R1.max_abs_diff(other.R1)});
}

// -------------------------------------------------------------- Translation

Translation Translation::zero(int n, int m) {
  return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(m), Eigen::MatrixXd::Zero(m, m)};
}

Translation Translation::make(Eigen::VectorXd beta, Eigen::VectorXd b, Eigen::MatrixXd B,
                              const Eigen::MatrixXd& A, bool free_b) {
  Translation t{std::move(beta), std::move(b), std::move(B)};
  if (t.b.size() != A.rows() || t.B.rows() != A.rows() || t.B.cols() != A.cols())
    throw ShapeError("Translation: dimensions do not match A");
  const double scale = 1.0 + A.norm();
  if (!free_b && t.b_constraint(A) > 1e-12 * scale * std::max(t.b.norm(), 1e-300) && t.b.norm() > 0)
    throw DomainError("Translation: (A - I) b != 0");
  if (t.B_constraint(A) > 1e-12 * scale * t.B.norm() && t.B.norm() > 0)
    throw DomainError("Translation: B does not commute with A");
  return t;
}

double Translation::b_constraint(const Eigen::MatrixXd& A) const {
  return ((A - Eigen::MatrixXd::Identity(A.rows(), A.cols())) * b).norm();
}

double Translation::B_constraint(const Eigen::MatrixXd& A) const { return (A * B - B * A).norm(); }

double Translation::norm() const {
  double v = 0.0;
  if (beta.size()) v = std::max(v, beta.cwiseAbs().maxCoeff());
  if (b.size()) v = std::max(v, b.cwiseAbs().maxCoeff());
  if (B.size()) v = std::max(v, B.cwiseAbs().maxCoeff());
  return v;
}

FourierTaylorMap Translation::to_map(int n, int degree, int cutoff) const {
  const int m = static_cast<int>(b.size());
  FourierTaylorMap t(n, m, degree, cutoff, kUnbounded);
  t.set_rotation(std::vector<double>(beta.data(), beta.data() + beta.size()));
  t.r_coeff(0) = FourierSeries::constant(n, cutoff, Eigen::MatrixXd(b));
  if (degree >= 1)
    t.set_r_jet(1, FourierSeries::constant(n, cutoff, Eigen::MatrixXd(Eigen::MatrixXd::Identity(m, m) + B)));
  return t;
}

FourierTaylorMap Translation::inverse_map(int n, int degree, int cutoff) const {
  const int m = static_cast<int>(b.size());
  const Eigen::MatrixXd inv = (Eigen::MatrixXd::Identity(m, m) + B).inverse();
  FourierTaylorMap t(n, m, degree, cutoff, kUnbounded);
  std::vector<double> rot(n);
  for (int i = 0; i < n; ++i) rot[i] = -beta[i];
  t.set_rotation(rot);
  t.r_coeff(0) = FourierSeries::constant(n, cutoff, Eigen::MatrixXd(-inv * b));
  if (degree >= 1) t.set_r_jet(1, FourierSeries::constant(n, cutoff, inv));
  return t;
}

Translation& Translation::operator+=(const Translation& other) {
  beta += other.beta;
  b += other.b;
  B += other.B;
  return *this;
}

// --------------------------------------------------------------- NormalForm

NormalForm NormalForm::project(FourierTaylorMap W, const Eigen::VectorXd& alpha,
                               const Eigen::MatrixXd& A) {
  const int n = W.n();
  const int m = W.m();
  std::vector<double> rot(n);
  for (int i = 0; i < n; ++i) rot[i] = 2.0 * std::numbers::pi * alpha[i];
  W.set_rotation(rot);
  W.theta_coeff(0) = FourierSeries(n, W.cutoff(), Shape::vector(n));
  W.r_coeff(0) = FourierSeries(n, W.cutoff(), Shape::vector(m));
  if (W.degree() >= 1) W.set_r_jet(1, FourierSeries::constant(n, W.cutoff(), A));
  return {std::move(W), alpha, A};
}

double NormalForm::membership_defect() const {
  double d = 0.0;
  for (int i = 0; i < map.n(); ++i)
    d = std::max(d, std::abs(map.rotation()[i] - 2.0 * std::numbers::pi * alpha[i]));
  d = std::max(d, map.theta_coeff(0).max_abs());
  d = std::max(d, map.r_coeff(0).max_abs());
  if (map.degree() >= 1)
    d = std::max(d, map.r_jet(1).max_abs_diff(FourierSeries::constant(map.n(), map.cutoff(), A)));
  return d;
}

// ---------------------------------------------------------------- Inversion

FourierSeries invert_torus_diffeo(const FourierSeries& u, const InversionOptions& opts) {
  const int n = u.dim();
  if (u.shape() != Shape::vector(n)) throw ShapeError("invert_torus_diffeo: u must be vector(n)");
  const double bound = weighted_norm(u, opts.s);
  if (bound >= opts.sigma / n)
    throw DomainError("invert_torus_diffeo: |u|_s = " + std::to_string(bound) +
                      " violates the near-identity guard sigma/n = " + std::to_string(opts.sigma / n));
  const int K = u.cutoff();
  const GridSpec grid{n, opts.grid_points > 0 ? opts.grid_points : default_compose_points(n, K)};
  const std::size_t pts = grid.size();
  auto set = std::make_shared<const MonomialSet>(0, 0);
  std::vector<FourierSeries> comps;
  for (int i = 0; i < n; ++i) comps.push_back(u.component(i));

  // w_0 = -u
  std::vector<GridJet> w = series_to_jets(u, grid, set);
  for (auto& j : w) j *= -1.0;
  double diff = 0.0;
  for (int it = 0; it < opts.max_iter; ++it) {
    const ThetaArgument arg(grid, K, std::vector<double>(n, 0.0), w);
    diff = 0.0;
    std::vector<GridJet> next;
    for (int i = 0; i < n; ++i) {
      GridJet v = arg.evaluate(comps[i]);
      v *= -1.0;
      auto a = v.coef(0);
      auto b = w[i].coef(0);
      for (std::size_t p = 0; p < pts; ++p) diff = std::max(diff, std::abs(a[p] - b[p]));
      next.push_back(std::move(v));
    }
    w = std::move(next);
    if (diff <= opts.tol) break;
  }
  if (diff > 1e-12)
    throw ConvergenceError("invert_torus_diffeo: fixed point stalled at " + std::to_string(diff));
  std::vector<FourierSeries> out;
  for (int i = 0; i < n; ++i)
    out.push_back(FourierSeries::from_real_grid(grid, K, Shape::scalar(), w[i].coef(0)));
  return FourierSeries::from_components(out, Shape::vector(n));
}

FourierTaylorMap invert_G(const Conjugacy& G, int degree, const InversionOptions& opts) {
  const int n = G.n();
  const int m = G.m();
  const int K = G.cutoff();
  const FourierSeries w = invert_torus_diffeo(G.u, opts);
  const GridSpec grid{n, opts.grid_points > 0 ? opts.grid_points : default_compose_points(n, K)};
  const std::size_t pts = grid.size();
  auto set0 = std::make_shared<const MonomialSet>(0, 0);
  const ThetaArgument arg(grid, K, std::vector<double>(n, 0.0), series_to_jets(w, grid, set0));

  std::vector<std::vector<double>> r0(m), r1(m * m);
  for (int i = 0; i < m; ++i) {
    const GridJet j = arg.evaluate(G.R0.component(i));
    r0[i].assign(j.coef(0).begin(), j.coef(0).end());
  }
  for (int c = 0; c < m * m; ++c) {
    const GridJet j = arg.evaluate(G.R1.component(c));
    r1[c].assign(j.coef(0).begin(), j.coef(0).end());
  }
  // Pointwise: linear part R1^{-1}, constant part -R1^{-1} R0.
  std::vector<std::vector<double>> lin(m * m, std::vector<double>(pts));
  std::vector<std::vector<double>> con(m, std::vector<double>(pts));
  Eigen::MatrixXd M(m, m);
  Eigen::VectorXd r(m);
  for (std::size_t p = 0; p < pts; ++p) {
    for (int c = 0; c < m * m; ++c) M(c / m, c % m) = r1[c][p];
    for (int i = 0; i < m; ++i) r(i) = r0[i][p];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw DomainError("invert_G: R1 singular on the grid");
    const Eigen::MatrixXd inv = lu.inverse();
    const Eigen::VectorXd c0 = -inv * r;
    for (int c = 0; c < m * m; ++c) lin[c][p] = inv(c / m, c % m);
    for (int i = 0; i < m; ++i) con[i][p] = c0(i);
  }
  FourierTaylorMap out(n, m, degree, K, kUnbounded);
  out.theta_coeff(0) = w;
  std::vector<FourierSeries> cs;
  for (int i = 0; i < m; ++i) cs.push_back(FourierSeries::from_real_grid(grid, K, Shape::scalar(), con[i]));
  out.r_coeff(0) = FourierSeries::from_components(cs, Shape::vector(m));
  if (degree >= 1) {
    std::vector<FourierSeries> ls;
    for (int c = 0; c < m * m; ++c)
      ls.push_back(FourierSeries::from_real_grid(grid, K, Shape::scalar(), lin[c]));
    out.set_r_jet(1, FourierSeries::from_components(ls, Shape::matrix(m, m)));
  }
  return out;
}

FourierTaylorMap normal_form_operator(const Conjugacy& G, const NormalForm& P,
                                      const Translation& lambda) {
  const int d = P.map.degree();
  const FourierTaylorMap Gmap = G.to_map(d);
  const FourierTaylorMap Ginv = invert_G(G, d);
  const FourierTaylorMap T = lambda.to_map(G.n(), d, G.cutoff());
  return T.compose(Gmap.compose(P.map.compose(Ginv)));
}

// ----------------------------------------------------------------- PullBack

double ResidualJets::norm() const {
  return std::max({weighted_norm(q0, 0.0), weighted_norm(Q0, 0.0), weighted_norm(Q1, 0.0)});
}

PullBack::PullBack(const Conjugacy& G, const NormalForm& P, const Translation& lambda)
    : n_(G.n()), m_(G.m()), degree_(P.map.degree()), cutoff_(G.cutoff()),
      grid_{G.n(), default_compose_points(G.n(), G.cutoff())} {
  const int n = n_;
  const int m = m_;
  IBinv_ = (Eigen::MatrixXd::Identity(m, m) + lambda.B).inverse();
  gp_ = G.to_map(degree_).compose(P.map);
  auto pj = P.map.to_grid_jets(grid_);
  std::vector<GridJet> pdisp(pj.begin(), pj.begin() + n);
  const ThetaArgument arg(grid_, cutoff_, P.map.rotation(), pdisp);
  const std::size_t pts = grid_.size();

  std::vector<GridJet> j11;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      GridJet e = arg.evaluate(G.u.component(i).derivative(j));
      if (i == j) {
        auto c = e.coef(0);
        for (std::size_t p = 0; p < pts; ++p) c[p] += 1.0;
      }
      j11.push_back(std::move(e));
    }
  j11inv_ = jet_matrix_inverse(j11, n);

  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) {
      GridJet e = arg.evaluate(G.R0.component(i).derivative(j));
      for (int l = 0; l < m; ++l)
        e.add_product(arg.evaluate(G.R1.component(i, l).derivative(j)), pj[n + l]);
      j21_.push_back(std::move(e));
    }

  std::vector<GridJet> j22;
  for (int c = 0; c < m * m; ++c) j22.push_back(arg.evaluate(G.R1.component(c)));
  j22inv_ = jet_matrix_inverse(j22, m);
}

ResidualJets PullBack::apply(const FourierTaylorMap& delta) const {
  const int n = n_;
  const int m = m_;
  auto dj = delta.to_grid_jets(grid_);
  for (int i = 0; i < n; ++i) {
    if (delta.rotation()[i] == 0.0) continue;
    for (auto& v : dj[i].coef(0)) v += delta.rotation()[i];
  }
  std::vector<GridJet> dth(dj.begin(), dj.begin() + n);
  std::vector<GridJet> dr;
  for (int i = 0; i < m; ++i) {
    GridJet s(dj[0].monomial_set(), dj[0].points());
    for (int l = 0; l < m; ++l) {
      if (IBinv_(i, l) == 0.0) continue;
      GridJet t = dj[n + l];
      t *= IBinv_(i, l);
      s += t;
    }
    dr.push_back(std::move(s));
  }
  auto eth = jet_matmul(j11inv_, dth, n, n, 1);
  auto corr = jet_matmul(j21_, eth, m, n, 1);
  for (int i = 0; i < m; ++i) dr[i] -= corr[i];
  auto er = jet_matmul(j22inv_, dr, m, m, 1);
  std::vector<GridJet> all = eth;
  all.insert(all.end(), er.begin(), er.end());
  ResidualJets out;
  out.full = FourierTaylorMap::from_grid_jets(grid_, cutoff_, n, m, all, std::vector<double>(n, 0.0),
                                              delta.validity_radius());
  out.q0 = out.full.theta_coeff(0);
  out.Q0 = out.full.r_coeff(0);
  out.Q1 = degree_ >= 1 ? out.full.r_jet(1) : FourierSeries(n, cutoff_, Shape::matrix(m, m));
  return out;
}

FourierTaylorMap PullBack::translation_action(const Translation& dl) const {
  FourierTaylorMap t(n_, m_, degree_, cutoff_, kUnbounded);
  t.set_rotation(std::vector<double>(dl.beta.data(), dl.beta.data() + n_));
  const Eigen::MatrixXcd dB = dl.B.cast<cplx>();
  if (dl.B.cwiseAbs().maxCoeff() > 0.0)
    for (int mono = 0; mono < gp_.monomials().size(); ++mono)
      t.r_coeff(mono) = left_multiply(dB, gp_.r_coeff(mono));
  t.r_coeff(0) += FourierSeries::constant(n_, cutoff_, Eigen::MatrixXd(dl.b));
  return t;
}

ResidualJets pulled_back_residual(const FourierTaylorMap& Q, const Conjugacy& G,
                                  const NormalForm& P, const Translation& lambda) {
  const PullBack pb(G, P, lambda);
  const int d = P.map.degree();
  const FourierTaylorMap QG = Q.compose(G.to_map(d));
  const FourierTaylorMap TGP = lambda.to_map(G.n(), d, G.cutoff()).compose(pb.G_of_P());
  return pb.apply(QG - TGP);
}

// --------------------------------------------------------------------- JSON

nlohmann::json conjugacy_to_json(const Conjugacy& G) {
  return {{"u", series_to_json(G.u)}, {"R0", series_to_json(G.R0)}, {"R1", series_to_json(G.R1)}};
}

Conjugacy conjugacy_from_json(const nlohmann::json& j) {
  return {series_from_json(j.at("u")), series_from_json(j.at("R0")), series_from_json(j.at("R1"))};
}

nlohmann::json translation_to_json(const Translation& t) {
  return {{"beta", vector_to_json(t.beta)}, {"b", vector_to_json(t.b)}, {"B", matrix_to_json(t.B)}};
}

Translation translation_from_json(const nlohmann::json& j) {
  return {vector_from_json(j.at("beta")), vector_from_json(j.at("b")), matrix_from_json(j.at("B"))};
}

}  // namespace kam
