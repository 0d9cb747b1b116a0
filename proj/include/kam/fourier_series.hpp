#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "kam/spectral_grid.hpp"

namespace kam {

/// Value shape of a series: scalar (1x1), vector (m x 1) or matrix (r x c).
struct Shape {
  int rows = 1;
  int cols = 1;

  static Shape scalar() { return {1, 1}; }
  static Shape vector(int m) { return {m, 1}; }
  static Shape matrix(int r, int c) { return {r, c}; }

  int size() const { return rows * cols; }
  bool operator==(const Shape&) const = default;
};

/// Truncated Fourier series on T^n with scalar, vector or matrix values.
///
/// Modes k in Z^n with |k|_inf <= K are stored densely, component-major,
/// modes in lexicographic order of k (axis 0 slowest). When the reality
/// flag is set, every constructor and arithmetic operation leaves
/// f_{-k} = conj(f_k) exactly.
class FourierSeries {
 public:
  FourierSeries() = default;
  FourierSeries(int dim, int cutoff, Shape shape = Shape::scalar(), bool real = true);

  static FourierSeries constant_complex(int dim, int cutoff, const Eigen::MatrixXcd& value,
                                        bool real = true);
  static FourierSeries constant(int dim, int cutoff, const Eigen::MatrixXd& value);
  static FourierSeries scalar_constant(int dim, int cutoff, double value);

  /// Discrete Fourier coefficients of grid samples (component-major, each
  /// component grid.size() values). Requires grid.points_per_axis >= 2K+2.
  static FourierSeries from_grid(const GridSpec& grid, int cutoff, Shape shape,
                                 std::span<const cplx> samples, bool real);
  static FourierSeries from_real_grid(const GridSpec& grid, int cutoff, Shape shape,
                                      std::span<const double> samples);
  /// Assembles a series from scalar components, row-major.
  static FourierSeries from_components(std::span<const FourierSeries> components, Shape shape);

  int dim() const { return dim_; }
  int cutoff() const { return cutoff_; }
  Shape shape() const { return shape_; }
  bool is_real() const { return real_; }
  int components() const { return shape_.size(); }
  std::size_t num_modes() const { return modes_; }

  std::vector<int> mode(std::size_t index) const;
  std::size_t mode_index(std::span<const int> k) const;
  bool contains(std::span<const int> k) const;
  std::size_t zero_mode_index() const;

  cplx& coeff(std::size_t mode_index, int comp = 0) { return data_[comp * modes_ + mode_index]; }
  const cplx& coeff(std::size_t mode_index, int comp = 0) const {
    return data_[comp * modes_ + mode_index];
  }
  /// Coefficient of mode k; zero outside the cutoff.
  cplx at(std::span<const int> k, int comp = 0) const;
  std::span<cplx> component_data(int comp) { return {data_.data() + comp * modes_, modes_}; }
  std::span<const cplx> component_data(int comp) const {
    return {data_.data() + comp * modes_, modes_};
  }

  std::vector<cplx> to_grid(const GridSpec& grid) const;
  std::vector<double> to_real_grid(const GridSpec& grid) const;

  FourierSeries component(int comp) const;
  FourierSeries component(int row, int col) const { return component(row * shape_.cols + col); }
  void set_component(int comp, const FourierSeries& scalar);

  /// Mean value (the k = 0 coefficient) as a rows x cols matrix.
  Eigen::MatrixXcd average() const;
  Eigen::MatrixXd real_average() const { return average().real(); }

  /// Multiplies f_k by i*k_axis.
  FourierSeries derivative(int axis) const;
  /// Returns the series of theta -> f(theta + omega).
  FourierSeries shift(std::span<const double> omega) const;
  FourierSeries with_cutoff(int cutoff) const;
  FourierSeries reshaped(Shape shape) const;

  /// Enforces conjugate symmetry by averaging f_k and conj(f_{-k}).
  void symmetrize();
  /// max_k |f_{-k} - conj(f_k)| over all components.
  double reality_defect() const;

  /// Point evaluation by direct summation.
  Eigen::MatrixXcd eval(std::span<const double> theta) const;
  Eigen::MatrixXd eval_real(std::span<const double> theta) const { return eval(theta).real(); }

  FourierSeries& operator+=(const FourierSeries& other);
  FourierSeries& operator-=(const FourierSeries& other);
  FourierSeries& operator*=(double factor);
  FourierSeries& operator*=(cplx factor);
  FourierSeries operator-() const;
  friend FourierSeries operator+(FourierSeries a, const FourierSeries& b) { return a += b; }
  friend FourierSeries operator-(FourierSeries a, const FourierSeries& b) { return a -= b; }
  friend FourierSeries operator*(FourierSeries a, double s) { return a *= s; }
  friend FourierSeries operator*(double s, FourierSeries a) { return a *= s; }

  /// Largest coefficient modulus.
  double max_abs() const;
  /// Largest coefficient difference (cutoffs may differ; missing modes are 0).
  double max_abs_diff(const FourierSeries& other) const;

 private:
  void check_compatible(const FourierSeries& other, const char* op) const;

  int dim_ = 0;
  int cutoff_ = 0;
  Shape shape_{};
  bool real_ = true;
  std::size_t modes_ = 0;
  std::vector<cplx> data_;
};

/// sum_k |f_k| e^{|k|_1 s}; maximum over components for vector/matrix values.
double weighted_norm(const FourierSeries& f, double s);

/// Grid size used for dealiased products: 2(2K+1) points per axis.
int dealiased_grid_size(int cutoff);

/// Product f*g (scalar*any, any*scalar or matrix product), computed on the
/// dealiased grid and truncated to max(K_f, K_g).
FourierSeries multiply(const FourierSeries& f, const FourierSeries& g);

/// Coefficientwise products with constant matrices: M*f and f*M. The result
/// is flagged real when f is real and M has no imaginary part.
FourierSeries left_multiply(const Eigen::MatrixXcd& M, const FourierSeries& f);
FourierSeries right_multiply(const FourierSeries& f, const Eigen::MatrixXcd& M);

}  // namespace kam
