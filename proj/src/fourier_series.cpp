#include "kam/fourier_series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "kam/errors.hpp"

namespace kam {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

// Grid index of mode k on an N-point-per-axis grid.
std::size_t grid_slot(std::span<const int> k, int N) {
  std::size_t idx = 0;
  for (int kj : k) {
    int r = kj % N;
    if (r < 0) r += N;
    idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>(r);
  }
  return idx;
}

}  // namespace

FourierSeries::FourierSeries(int dim, int cutoff, Shape shape, bool real)
    : dim_(dim), cutoff_(cutoff), shape_(shape), real_(real) {
  if (dim < 1) throw ShapeError("FourierSeries: dimension must be >= 1");
  if (cutoff < 0) throw ShapeError("FourierSeries: cutoff must be >= 0");
  if (shape.rows < 1 || shape.cols < 1) throw ShapeError("FourierSeries: empty value shape");
  modes_ = ipow(static_cast<std::size_t>(2 * cutoff + 1), dim);
  data_.assign(modes_ * shape.size(), cplx(0.0, 0.0));
}

FourierSeries FourierSeries::constant_complex(int dim, int cutoff, const Eigen::MatrixXcd& value,
                                              bool real) {
  FourierSeries f(dim, cutoff, Shape{static_cast<int>(value.rows()), static_cast<int>(value.cols())},
                  real);
  const std::size_t z = f.zero_mode_index();
  for (int r = 0; r < value.rows(); ++r)
    for (int c = 0; c < value.cols(); ++c)
      f.coeff(z, r * f.shape_.cols + c) = real ? cplx(value(r, c).real(), 0.0) : value(r, c);
  return f;
}

FourierSeries FourierSeries::constant(int dim, int cutoff, const Eigen::MatrixXd& value) {
  return constant_complex(dim, cutoff, value.cast<cplx>(), true);
}

FourierSeries FourierSeries::scalar_constant(int dim, int cutoff, double value) {
  Eigen::MatrixXd v(1, 1);
  v(0, 0) = value;
  return constant(dim, cutoff, v);
}

std::vector<int> FourierSeries::mode(std::size_t index) const {
  std::vector<int> k(dim_);
  const std::size_t w = static_cast<std::size_t>(2 * cutoff_ + 1);
  for (int j = dim_ - 1; j >= 0; --j) {
    k[j] = static_cast<int>(index % w) - cutoff_;
    index /= w;
  }
  return k;
}

bool FourierSeries::contains(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) return false;
  return std::all_of(k.begin(), k.end(), [&](int kj) { return std::abs(kj) <= cutoff_; });
}

std::size_t FourierSeries::mode_index(std::span<const int> k) const {
  if (!contains(k)) throw ShapeError("FourierSeries: mode outside cutoff");
  std::size_t idx = 0;
  const std::size_t w = static_cast<std::size_t>(2 * cutoff_ + 1);
  for (int kj : k) idx = idx * w + static_cast<std::size_t>(kj + cutoff_);
  return idx;
}

std::size_t FourierSeries::zero_mode_index() const { return (modes_ - 1) / 2; }

cplx FourierSeries::at(std::span<const int> k, int comp) const {
  if (!contains(k)) return {0.0, 0.0};
  return coeff(mode_index(k), comp);
}

FourierSeries FourierSeries::from_grid(const GridSpec& grid, int cutoff, Shape shape,
                                       std::span<const cplx> samples, bool real) {
  if (grid.points_per_axis < 2 * cutoff + 2)
    throw ShapeError("from_grid: cutoff " + std::to_string(cutoff) + " requires at least " +
                     std::to_string(2 * cutoff + 2) + " points per axis, got " +
                     std::to_string(grid.points_per_axis));
  FourierSeries f(grid.dim, cutoff, shape, real);
  const std::size_t gsize = grid.size();
  if (samples.size() != gsize * shape.size())
    throw ShapeError("from_grid: sample count does not match grid and shape");
  std::vector<cplx> work(gsize);
  for (int c = 0; c < shape.size(); ++c) {
    std::copy_n(samples.begin() + c * gsize, gsize, work.begin());
    dft_forward(grid, work);
    for (std::size_t m = 0; m < f.modes_; ++m) {
      const auto k = f.mode(m);
      f.coeff(m, c) = work[grid_slot(k, grid.points_per_axis)];
    }
  }
  if (real) f.symmetrize();
  return f;
}

FourierSeries FourierSeries::from_real_grid(const GridSpec& grid, int cutoff, Shape shape,
                                            std::span<const double> samples) {
  std::vector<cplx> c(samples.begin(), samples.end());
  return from_grid(grid, cutoff, shape, c, true);
}

FourierSeries FourierSeries::from_components(std::span<const FourierSeries> components,
                                             Shape shape) {
  if (components.empty() || static_cast<int>(components.size()) != shape.size())
    throw ShapeError("from_components: component count does not match shape");
  const auto& first = components.front();
  bool real = true;
  for (const auto& c : components) {
    if (c.components() != 1 || c.dim() != first.dim() || c.cutoff() != first.cutoff())
      throw ShapeError("from_components: incompatible components");
    real = real && c.is_real();
  }
  FourierSeries f(first.dim(), first.cutoff(), shape, real);
  for (int i = 0; i < shape.size(); ++i) f.set_component(i, components[i]);
  return f;
}

std::vector<cplx> FourierSeries::to_grid(const GridSpec& grid) const {
  if (grid.dim != dim_) throw ShapeError("to_grid: grid dimension mismatch");
  if (grid.points_per_axis < 2 * cutoff_ + 1)
    throw ShapeError("to_grid: grid too small for cutoff");
  const std::size_t gsize = grid.size();
  std::vector<cplx> out(gsize * components(), cplx(0.0, 0.0));
  std::vector<std::size_t> slots(modes_);
  for (std::size_t m = 0; m < modes_; ++m) slots[m] = grid_slot(mode(m), grid.points_per_axis);
  for (int c = 0; c < components(); ++c) {
    std::span<cplx> block(out.data() + c * gsize, gsize);
    for (std::size_t m = 0; m < modes_; ++m) block[slots[m]] = coeff(m, c);
    dft_inverse(grid, block);
  }
  return out;
}

std::vector<double> FourierSeries::to_real_grid(const GridSpec& grid) const {
  const auto c = to_grid(grid);
  std::vector<double> out(c.size());
  std::transform(c.begin(), c.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

FourierSeries FourierSeries::component(int comp) const {
  if (comp < 0 || comp >= components()) throw ShapeError("component: index out of range");
  FourierSeries f(dim_, cutoff_, Shape::scalar(), real_);
  std::copy_n(data_.begin() + comp * modes_, modes_, f.data_.begin());
  return f;
}

void FourierSeries::set_component(int comp, const FourierSeries& scalar) {
  if (comp < 0 || comp >= components()) throw ShapeError("set_component: index out of range");
  if (scalar.components() != 1 || scalar.dim_ != dim_)
    throw ShapeError("set_component: expects a scalar series of the same dimension");
  const auto src = scalar.cutoff_ == cutoff_ ? scalar : scalar.with_cutoff(cutoff_);
  std::copy_n(src.data_.begin(), modes_, data_.begin() + comp * modes_);
  real_ = real_ && scalar.real_;
}

Eigen::MatrixXcd FourierSeries::average() const {
  Eigen::MatrixXcd a(shape_.rows, shape_.cols);
  const std::size_t z = zero_mode_index();
  for (int r = 0; r < shape_.rows; ++r)
    for (int c = 0; c < shape_.cols; ++c) a(r, c) = coeff(z, r * shape_.cols + c);
  return a;
}

FourierSeries FourierSeries::derivative(int axis) const {
  if (axis < 0 || axis >= dim_) throw ShapeError("derivative: axis out of range");
  FourierSeries f = *this;
  for (std::size_t m = 0; m < modes_; ++m) {
    const double kj = mode(m)[axis];
    for (int c = 0; c < components(); ++c) f.coeff(m, c) *= cplx(0.0, kj);
  }
  return f;
}

FourierSeries FourierSeries::shift(std::span<const double> omega) const {
  if (static_cast<int>(omega.size()) != dim_) throw ShapeError("shift: dimension mismatch");
  FourierSeries f = *this;
  for (std::size_t m = 0; m < modes_; ++m) {
    const auto k = mode(m);
    double phase = 0.0;
    for (int j = 0; j < dim_; ++j) phase += k[j] * omega[j];
    const cplx rot = std::polar(1.0, phase);
    for (int c = 0; c < components(); ++c) f.coeff(m, c) *= rot;
  }
  if (real_) f.symmetrize();
  return f;
}

FourierSeries FourierSeries::with_cutoff(int cutoff) const {
  FourierSeries f(dim_, cutoff, shape_, real_);
  for (std::size_t m = 0; m < f.modes_; ++m) {
    const auto k = f.mode(m);
    if (!contains(k)) continue;
    const std::size_t src = mode_index(k);
    for (int c = 0; c < components(); ++c) f.coeff(m, c) = coeff(src, c);
  }
  return f;
}

FourierSeries FourierSeries::reshaped(Shape shape) const {
  if (shape.size() != shape_.size()) throw ShapeError("reshaped: component count differs");
  FourierSeries f = *this;
  f.shape_ = shape;
  return f;
}

void FourierSeries::symmetrize() {
  real_ = true;
  // Mode index of -k is (modes - 1 - index) in the lexicographic layout.
  for (int c = 0; c < components(); ++c) {
    auto block = component_data(c);
    for (std::size_t m = 0; m <= (modes_ - 1) / 2; ++m) {
      const std::size_t mm = modes_ - 1 - m;
      const cplx v = 0.5 * (block[m] + std::conj(block[mm]));
      block[m] = v;
      block[mm] = std::conj(v);
    }
  }
}

double FourierSeries::reality_defect() const {
  double d = 0.0;
  for (int c = 0; c < components(); ++c) {
    auto block = component_data(c);
    for (std::size_t m = 0; m < modes_; ++m)
      d = std::max(d, std::abs(block[modes_ - 1 - m] - std::conj(block[m])));
  }
  return d;
}

Eigen::MatrixXcd FourierSeries::eval(std::span<const double> theta) const {
  if (static_cast<int>(theta.size()) != dim_) throw ShapeError("eval: dimension mismatch");
  const int w = 2 * cutoff_ + 1;
  // table[j][k + K] = exp(i k theta_j)
  std::vector<std::vector<cplx>> table(dim_, std::vector<cplx>(w));
  for (int j = 0; j < dim_; ++j)
    for (int k = -cutoff_; k <= cutoff_; ++k) table[j][k + cutoff_] = std::polar(1.0, k * theta[j]);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(shape_.rows, shape_.cols);
  std::vector<int> idx(dim_, 0);
  for (std::size_t m = 0; m < modes_; ++m) {
    cplx e(1.0, 0.0);
    for (int j = 0; j < dim_; ++j) e *= table[j][idx[j]];
    for (int c = 0; c < components(); ++c) out(c / shape_.cols, c % shape_.cols) += coeff(m, c) * e;
    for (int j = dim_ - 1; j >= 0; --j) {
      if (++idx[j] < w) break;
      idx[j] = 0;
    }
  }
  return out;
}

void FourierSeries::check_compatible(const FourierSeries& other, const char* op) const {
  if (dim_ != other.dim_ || shape_ != other.shape_)
    throw ShapeError(std::string(op) + ": incompatible series");
}

FourierSeries& FourierSeries::operator+=(const FourierSeries& other) {
  check_compatible(other, "add");
  if (other.cutoff_ > cutoff_) *this = with_cutoff(other.cutoff_);
  const FourierSeries& rhs = other.cutoff_ == cutoff_ ? other : other.with_cutoff(cutoff_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
  real_ = real_ && other.real_;
  return *this;
}

FourierSeries& FourierSeries::operator-=(const FourierSeries& other) {
  check_compatible(other, "subtract");
  if (other.cutoff_ > cutoff_) *this = with_cutoff(other.cutoff_);
  const FourierSeries& rhs = other.cutoff_ == cutoff_ ? other : other.with_cutoff(cutoff_);
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
  real_ = real_ && other.real_;
  return *this;
}

FourierSeries& FourierSeries::operator*=(double factor) {
  for (auto& v : data_) v *= factor;
  return *this;
}

FourierSeries& FourierSeries::operator*=(cplx factor) {
  for (auto& v : data_) v *= factor;
  if (factor.imag() != 0.0) real_ = false;
  return *this;
}

FourierSeries FourierSeries::operator-() const {
  FourierSeries f = *this;
  for (auto& v : f.data_) v = -v;
  return f;
}

double FourierSeries::max_abs() const {
  double m = 0.0;
  for (const auto& v : data_) m = std::max(m, std::abs(v));
  return m;
}

double FourierSeries::max_abs_diff(const FourierSeries& other) const {
  check_compatible(other, "max_abs_diff");
  const int K = std::max(cutoff_, other.cutoff_);
  const FourierSeries a = with_cutoff(K);
  const FourierSeries b = other.with_cutoff(K);
  double m = 0.0;
  for (std::size_t i = 0; i < a.data_.size(); ++i) m = std::max(m, std::abs(a.data_[i] - b.data_[i]));
  return m;
}

double weighted_norm(const FourierSeries& f, double s) {
  if (s < 0.0) throw ShapeError("weighted_norm: width must be non-negative");
  std::vector<double> weight(f.num_modes());
  for (std::size_t m = 0; m < f.num_modes(); ++m) {
    int l1 = 0;
    for (int kj : f.mode(m)) l1 += std::abs(kj);
    weight[m] = std::exp(l1 * s);
  }
  double best = 0.0;
  for (int c = 0; c < f.components(); ++c) {
    double sum = 0.0;
    auto block = f.component_data(c);
    for (std::size_t m = 0; m < f.num_modes(); ++m) sum += std::abs(block[m]) * weight[m];
    best = std::max(best, sum);
  }
  return best;
}

int dealiased_grid_size(int cutoff) { return 2 * (2 * cutoff + 1); }

FourierSeries multiply(const FourierSeries& f, const FourierSeries& g) {
  if (f.dim() != g.dim()) throw ShapeError("multiply: dimension mismatch");
  const Shape sf = f.shape();
  const Shape sg = g.shape();
  Shape out;
  if (sf.size() == 1) {
    out = sg;
  } else if (sg.size() == 1) {
    out = sf;
  } else if (sf.cols == sg.rows) {
    out = Shape{sf.rows, sg.cols};
  } else {
    throw ShapeError("multiply: shape mismatch");
  }
  const int K = std::max(f.cutoff(), g.cutoff());
  const GridSpec grid{f.dim(), dealiased_grid_size(K)};
  const std::size_t n = grid.size();
  const auto fv = f.to_grid(grid);
  const auto gv = g.to_grid(grid);
  std::vector<cplx> pv(n * out.size(), cplx(0.0, 0.0));
  for (int r = 0; r < out.rows; ++r) {
    for (int c = 0; c < out.cols; ++c) {
      cplx* dst = pv.data() + (r * out.cols + c) * n;
      if (sf.size() == 1 || sg.size() == 1) {
        const int fi = sf.size() == 1 ? 0 : r * out.cols + c;
        const int gi = sg.size() == 1 ? 0 : r * out.cols + c;
        for (std::size_t p = 0; p < n; ++p) dst[p] = fv[fi * n + p] * gv[gi * n + p];
      } else {
        for (int j = 0; j < sf.cols; ++j) {
          const cplx* a = fv.data() + (r * sf.cols + j) * n;
          const cplx* b = gv.data() + (j * sg.cols + c) * n;
          for (std::size_t p = 0; p < n; ++p) dst[p] += a[p] * b[p];
        }
      }
    }
  }
  return FourierSeries::from_grid(grid, K, out, pv, f.is_real() && g.is_real());
}

FourierSeries left_multiply(const Eigen::MatrixXcd& M, const FourierSeries& f) {
  const Shape s = f.shape();
  if (M.cols() != s.rows) throw ShapeError("left_multiply: shape mismatch");
  const bool real = f.is_real() && M.imag().cwiseAbs().maxCoeff() == 0.0;
  FourierSeries out(f.dim(), f.cutoff(), Shape{static_cast<int>(M.rows()), s.cols}, real);
  for (std::size_t m = 0; m < f.num_modes(); ++m)
    for (int i = 0; i < M.rows(); ++i)
      for (int c = 0; c < s.cols; ++c) {
        cplx acc(0.0, 0.0);
        for (int l = 0; l < s.rows; ++l) acc += M(i, l) * f.coeff(m, l * s.cols + c);
        out.coeff(m, i * s.cols + c) = acc;
      }
  return out;
}

FourierSeries right_multiply(const FourierSeries& f, const Eigen::MatrixXcd& M) {
  const Shape s = f.shape();
  if (M.rows() != s.cols) throw ShapeError("right_multiply: shape mismatch");
  const bool real = f.is_real() && M.imag().cwiseAbs().maxCoeff() == 0.0;
  FourierSeries out(f.dim(), f.cutoff(), Shape{s.rows, static_cast<int>(M.cols())}, real);
  for (std::size_t m = 0; m < f.num_modes(); ++m)
    for (int i = 0; i < s.rows; ++i)
      for (int c = 0; c < M.cols(); ++c) {
        cplx acc(0.0, 0.0);
        for (int l = 0; l < s.cols; ++l) acc += f.coeff(m, i * s.cols + l) * M(l, c);
        out.coeff(m, i * M.cols() + c) = acc;
      }
  return out;
}

}  // namespace kam
