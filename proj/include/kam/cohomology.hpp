#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kam/fourier_series.hpp"

namespace kam {

/// Rotation vector alpha (the step is 2*pi*alpha) and normal matrix A with a
/// cached eigendecomposition A = V diag(a) V^{-1}.
struct SpectralData {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd A;
  Eigen::VectorXcd eigenvalues;
  Eigen::MatrixXcd V;
  Eigen::MatrixXcd Vinv;
  double resonance_tolerance = 1e-10;

  /// Diagonalizes A. Real spectra get real, unit-norm eigenvectors.
  static SpectralData make(const Eigen::VectorXd& alpha, const Eigen::MatrixXd& A,
                           double resonance_tolerance = 1e-10);
  /// A := V diag(eigenvalues) V^{-1} with a prescribed eigenbasis.
  static SpectralData with_basis(const Eigen::VectorXd& alpha, const Eigen::MatrixXcd& V,
                                 const Eigen::VectorXcd& eigenvalues,
                                 double resonance_tolerance = 1e-10);

  int n() const { return static_cast<int>(alpha.size()); }
  int m() const { return static_cast<int>(A.rows()); }
  /// 2*pi*alpha as a vector of angles.
  std::vector<double> step() const;
  bool real_spectrum() const;
  bool simple_spectrum() const;
  /// Indices j with a_j == 1 within the resonance tolerance.
  std::vector<int> unit_eigenvalues() const;
  Eigen::MatrixXd real_V() const { return V.real(); }
  Eigen::MatrixXd real_Vinv() const { return Vinv.real(); }
};

struct TangentialSolution {
  FourierSeries f;
  Eigen::MatrixXcd mu;  // average of g, shape of g
};

struct NormalSolution {
  FourierSeries f;
  Eigen::VectorXd b_bar;      // routed averages, original basis
  Eigen::VectorXcd b_coords;  // the same in eigen coordinates (zero where not routed)
};

struct ReducibilitySolution {
  FourierSeries F;
  Eigen::MatrixXd B_bar;      // original basis, commutes with A
  Eigen::VectorXcd B_coords;  // diagonal of B_bar in the eigenbasis
};

/// mu + f(theta + 2 pi alpha) - f(theta) = g, f with zero average.
/// Acts componentwise on vector/matrix values.
TangentialSolution solve_tangential(const FourierSeries& g, const SpectralData& sd);

/// a f(theta + 2 pi alpha) - b f(theta) = g.
FourierSeries solve_weighted(cplx a, cplx b, const FourierSeries& g, const SpectralData& sd);

/// f(theta + 2 pi alpha) - A f(theta) = g - b_bar. With route_all_averages
/// every eigen-component's mean goes to b_bar (f then has zero average);
/// otherwise only components with a_j = 1 are routed.
NormalSolution solve_normal(const FourierSeries& g, const SpectralData& sd,
                            bool route_all_averages = false);

/// F(theta + 2 pi alpha) A - A F(theta) = g - B_bar, where B_bar is diagonal
/// in the eigenbasis and the eigenbasis diagonal of F has zero average.
ReducibilitySolution solve_reducibility(const FourierSeries& g, const SpectralData& sd);

}  // namespace kam
