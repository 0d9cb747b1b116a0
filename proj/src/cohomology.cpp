#include "kam/cohomology.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "kam/errors.hpp"

namespace kam {

namespace {

std::string mode_string(const std::vector<int>& k) {
  std::ostringstream os;
  os << "(";
  for (std::size_t j = 0; j < k.size(); ++j) os << (j ? "," : "") << k[j];
  os << ")";
  return os.str();
}

// e^{i 2 pi k.alpha} for every retained mode of f.
std::vector<cplx> rotation_factors(const FourierSeries& f, const SpectralData& sd) {
  if (f.dim() != sd.n()) throw ShapeError("cohomology: series dimension differs from alpha");
  std::vector<cplx> e(f.num_modes());
  for (std::size_t m = 0; m < f.num_modes(); ++m) {
    const auto k = f.mode(m);
    double w = 0.0;
    for (int j = 0; j < f.dim(); ++j) w += k[j] * sd.alpha[j];
    e[m] = std::polar(1.0, 2.0 * std::numbers::pi * w);
  }
  return e;
}

void check_divisor(cplx d, const FourierSeries& f, std::size_t m, double tol, const std::string& what) {
  if (std::abs(d) < tol) {
    std::ostringstream os;
    os << what << ": resonant mode k=" << mode_string(f.mode(m)) << ", |divisor| = " << std::abs(d);
    throw ResonanceError(os.str());
  }
}

void normalize_columns(Eigen::MatrixXd& V) {
  for (int j = 0; j < V.cols(); ++j) {
    V.col(j).normalize();
    Eigen::Index big = 0;
    V.col(j).cwiseAbs().maxCoeff(&big);
    if (V(big, j) < 0.0) V.col(j) *= -1.0;
  }
}

}  // namespace

SpectralData SpectralData::make(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& A,
                                double resonance_tolerance) {
  if (A.rows() != A.cols() || A.rows() < 1) throw ShapeError("SpectralData: A must be square");
  if (alpha.size() < 1) throw ShapeError("SpectralData: empty alpha");
  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success) throw DomainError("SpectralData: eigendecomposition failed");
  Eigen::VectorXcd ev = es.eigenvalues();
  Eigen::MatrixXcd V = es.eigenvectors();
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  if (ev.imag().cwiseAbs().maxCoeff() <= 1e-13 * scale) {
    Eigen::MatrixXd Vr = V.real();
    normalize_columns(Vr);
    V = Vr.cast<cplx>();
    ev = ev.real().cast<cplx>();
  }
  return with_basis(alpha, V, ev, resonance_tolerance);
}

SpectralData SpectralData::with_basis(const Eigen::VectorXd& alpha, const Eigen::MatrixXcd& V,
                                      const Eigen::VectorXcd& eigenvalues,
                                      double resonance_tolerance) {
  SpectralData sd;
  sd.alpha = alpha;
  sd.eigenvalues = eigenvalues;
  sd.V = V;
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(V);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(V).singularValues();
  if (!lu.isInvertible() || sv(sv.size() - 1) < 1e-10 * sv(0))
    throw DomainError("SpectralData: A is not diagonalizable");
  sd.Vinv = lu.inverse();
  sd.resonance_tolerance = resonance_tolerance;
  const Eigen::MatrixXcd rec = V * eigenvalues.asDiagonal() * sd.Vinv;
  sd.A = rec.real();
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j)
    if (std::abs(eigenvalues[j]) <= resonance_tolerance)
      throw DomainError("SpectralData: zero eigenvalue in A");
  // Reconstruction check against the matrix the caller meant.
  if (rec.imag().cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, rec.cwiseAbs().maxCoeff()))
    throw DomainError("SpectralData: eigendecomposition does not reconstruct a real matrix");
  return sd;
}

std::vector<double> SpectralData::step() const {
  std::vector<double> s(alpha.size());
  for (Eigen::Index j = 0; j < alpha.size(); ++j) s[j] = 2.0 * std::numbers::pi * alpha[j];
  return s;
}

bool SpectralData::real_spectrum() const { return eigenvalues.imag().cwiseAbs().maxCoeff() == 0.0; }

bool SpectralData::simple_spectrum() const {
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    for (Eigen::Index j = i + 1; j < eigenvalues.size(); ++j)
      if (std::abs(eigenvalues[i] - eigenvalues[j]) <= resonance_tolerance) return false;
  return true;
}

std::vector<int> SpectralData::unit_eigenvalues() const {
  std::vector<int> out;
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j)
    if (std::abs(eigenvalues[j] - 1.0) <= resonance_tolerance) out.push_back(static_cast<int>(j));
  return out;
}

TangentialSolution solve_tangential(const FourierSeries& g, const SpectralData& sd) {
  const auto e = rotation_factors(g, sd);
  const std::size_t z = g.zero_mode_index();
  FourierSeries f(g.dim(), g.cutoff(), g.shape(), g.is_real());
  for (std::size_t m = 0; m < g.num_modes(); ++m) {
    if (m == z) continue;
    const cplx d = e[m] - 1.0;
    check_divisor(d, g, m, sd.resonance_tolerance, "solve_tangential");
    for (int c = 0; c < g.components(); ++c) f.coeff(m, c) = g.coeff(m, c) / d;
  }
  if (f.is_real()) f.symmetrize();
  return {f, g.average()};
}

FourierSeries solve_weighted(cplx a, cplx b, const FourierSeries& g, const SpectralData& sd) {
  const auto e = rotation_factors(g, sd);
  const bool real = g.is_real() && a.imag() == 0.0 && b.imag() == 0.0;
  FourierSeries f(g.dim(), g.cutoff(), g.shape(), real);
  for (std::size_t m = 0; m < g.num_modes(); ++m) {
    const cplx d = a * e[m] - b;
    check_divisor(d, g, m, sd.resonance_tolerance, "solve_weighted");
    for (int c = 0; c < g.components(); ++c) f.coeff(m, c) = g.coeff(m, c) / d;
  }
  if (real) f.symmetrize();
  return f;
}

NormalSolution solve_normal(const FourierSeries& g, const SpectralData& sd,
                            bool route_all_averages) {
  const int m = sd.m();
  if (g.shape() != Shape::vector(m)) throw ShapeError("solve_normal: expects a vector(m) series");
  const auto e = rotation_factors(g, sd);
  const std::size_t z = g.zero_mode_index();
  const FourierSeries gt = left_multiply(sd.Vinv, g);
  FourierSeries ft(g.dim(), g.cutoff(), g.shape(), false);
  Eigen::VectorXcd coords = Eigen::VectorXcd::Zero(m);
  for (int j = 0; j < m; ++j) {
    const cplx a = sd.eigenvalues[j];
    const bool routed = route_all_averages || std::abs(a - 1.0) <= sd.resonance_tolerance;
    for (std::size_t mm = 0; mm < g.num_modes(); ++mm) {
      if (mm == z && routed) {
        coords[j] = gt.coeff(mm, j);
        continue;
      }
      const cplx d = e[mm] - a;
      check_divisor(d, g, mm, sd.resonance_tolerance,
                    "solve_normal (component " + std::to_string(j) + ")");
      ft.coeff(mm, j) = gt.coeff(mm, j) / d;
    }
  }
  FourierSeries f = left_multiply(sd.V, ft);
  if (g.is_real()) f.symmetrize();
  const Eigen::VectorXd b_bar = (sd.V * coords).real();
  return {f, b_bar, coords};
}

ReducibilitySolution solve_reducibility(const FourierSeries& g, const SpectralData& sd) {
  const int m = sd.m();
  if (g.shape() != Shape::matrix(m, m)) throw ShapeError("solve_reducibility: expects an m x m series");
  if (!sd.simple_spectrum())
    throw DomainError("solve_reducibility: repeated eigenvalues are not supported");
  const auto e = rotation_factors(g, sd);
  const std::size_t z = g.zero_mode_index();
  const FourierSeries gt = right_multiply(left_multiply(sd.Vinv, g), sd.V);
  FourierSeries ft(g.dim(), g.cutoff(), g.shape(), false);
  Eigen::VectorXcd mu = Eigen::VectorXcd::Zero(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const cplx ai = sd.eigenvalues[i];
      const cplx aj = sd.eigenvalues[j];
      const int c = i * m + j;
      for (std::size_t mm = 0; mm < g.num_modes(); ++mm) {
        if (i == j && mm == z) {
          mu[j] = gt.coeff(mm, c);
          continue;
        }
        const cplx d = aj * e[mm] - ai;
        check_divisor(d, g, mm, sd.resonance_tolerance,
                      "solve_reducibility (entry " + std::to_string(i) + "," + std::to_string(j) + ")");
        ft.coeff(mm, c) = gt.coeff(mm, c) / d;
      }
    }
  }
  FourierSeries F = right_multiply(left_multiply(sd.V, ft), sd.Vinv);
  if (g.is_real()) F.symmetrize();
  const Eigen::MatrixXd B_bar = (sd.V * mu.asDiagonal() * sd.Vinv).real();
  return {F, B_bar, mu};
}

}  // namespace kam
