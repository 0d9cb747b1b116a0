#include "kam/grid_jet.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "kam/errors.hpp"

namespace kam {

GridJet::GridJet(std::shared_ptr<const MonomialSet> set, std::size_t points)
    : set_(std::move(set)), points_(points) {
  data_.assign(set_->size() * points_, 0.0);
  nonzero_.assign(set_->size(), 0);
}

GridJet GridJet::constant(std::shared_ptr<const MonomialSet> set, std::size_t points,
                          double value) {
  GridJet j(std::move(set), points);
  if (value != 0.0) std::fill_n(j.coef(0).begin(), points, value);
  return j;
}

std::span<double> GridJet::coef(int mono) {
  nonzero_[mono] = 1;
  return {data_.data() + mono * points_, points_};
}

GridJet& GridJet::operator+=(const GridJet& other) {
  if (other.points_ != points_ || other.set_->size() != set_->size())
    throw ShapeError("GridJet: incompatible jets");
  for (int i = 0; i < set_->size(); ++i) {
    if (other.is_zero(i)) continue;
    auto dst = coef(i);
    auto src = other.coef(i);
    for (std::size_t p = 0; p < points_; ++p) dst[p] += src[p];
  }
  return *this;
}

GridJet& GridJet::operator-=(const GridJet& other) {
  if (other.points_ != points_ || other.set_->size() != set_->size())
    throw ShapeError("GridJet: incompatible jets");
  for (int i = 0; i < set_->size(); ++i) {
    if (other.is_zero(i)) continue;
    auto dst = coef(i);
    auto src = other.coef(i);
    for (std::size_t p = 0; p < points_; ++p) dst[p] -= src[p];
  }
  return *this;
}

GridJet& GridJet::operator*=(double s) {
  for (auto& v : data_) v *= s;
  return *this;
}

void GridJet::add_product(const GridJet& a, const GridJet& b, double s) {
  const auto& set = *set_;
  for (int i = 0; i < set.size(); ++i) {
    if (a.is_zero(i)) continue;
    auto ai = a.coef(i);
    for (int j = 0; j < set.size(); ++j) {
      if (b.is_zero(j)) continue;
      const int t = set.product(i, j);
      if (t < 0) continue;
      auto bj = b.coef(j);
      auto dst = coef(t);
      for (std::size_t p = 0; p < points_; ++p) dst[p] += s * ai[p] * bj[p];
    }
  }
}

void GridJet::add_weighted(const GridJet& a, std::span<const double> w, double s) {
  for (int i = 0; i < set_->size(); ++i) {
    if (a.is_zero(i)) continue;
    auto ai = a.coef(i);
    auto dst = coef(i);
    for (std::size_t p = 0; p < points_; ++p) dst[p] += s * ai[p] * w[p];
  }
}

GridJet GridJet::derivative(int var) const {
  GridJet out(set_, points_);
  const auto& set = *set_;
  // d/dr_var r^nu = nu_var r^(nu - e_var)
  for (int i = 0; i < set.size(); ++i) {
    if (is_zero(i)) continue;
    const int lo = set.lower(i, var);
    if (lo < 0) continue;
    const double e = set.exponent(i)[var];
    auto src = coef(i);
    auto dst = out.coef(lo);
    for (std::size_t p = 0; p < points_; ++p) dst[p] += e * src[p];
  }
  return out;
}

double GridJet::sup(int mono) const {
  if (is_zero(mono)) return 0.0;
  double m = 0.0;
  for (double v : coef(mono)) m = std::max(m, std::abs(v));
  return m;
}

GridJet operator*(const GridJet& a, const GridJet& b) {
  GridJet out(a.monomial_set(), a.points());
  out.add_product(a, b);
  return out;
}

GridJet operator+(GridJet a, const GridJet& b) { return a += b; }
GridJet operator-(GridJet a, const GridJet& b) { return a -= b; }

std::vector<GridJet> jet_matmul(std::span<const GridJet> a, std::span<const GridJet> b, int k,
                                int c, int q) {
  std::vector<GridJet> out;
  out.reserve(k * q);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < q; ++j) {
      GridJet s(a[0].monomial_set(), a[0].points());
      for (int l = 0; l < c; ++l) s.add_product(a[i * c + l], b[l * q + j]);
      out.push_back(std::move(s));
    }
  }
  return out;
}

std::vector<GridJet> jet_matrix_inverse(std::span<const GridJet> x, int k) {
  const auto set = x[0].monomial_set();
  const std::size_t pts = x[0].points();
  // Pointwise inverse of the constant part.
  std::vector<GridJet> y;
  for (int i = 0; i < k * k; ++i) y.emplace_back(set, pts);
  Eigen::MatrixXd m(k, k);
  for (std::size_t p = 0; p < pts; ++p) {
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) m(i, j) = x[i * k + j].coef(0)[p];
    Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
    if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-300)
      throw DomainError("jet_matrix_inverse: singular matrix at grid point");
    const Eigen::MatrixXd inv = lu.inverse();
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) y[i * k + j].coef(0)[p] = inv(i, j);
  }
  if (set->degree() == 0) return y;
  // N = x - x0 has no constant term, so (-Y N)^j vanishes beyond j = degree.
  std::vector<GridJet> nil;
  bool any = false;
  for (int i = 0; i < k * k; ++i) {
    GridJet t = x[i];
    std::fill(t.coef(0).begin(), t.coef(0).end(), 0.0);
    for (int mono = 1; mono < set->size(); ++mono) any = any || !x[i].is_zero(mono);
    nil.push_back(std::move(t));
  }
  if (!any) return y;
  auto step = jet_matmul(y, nil, k, k, k);
  for (auto& s : step) s *= -1.0;
  std::vector<GridJet> result = y;
  std::vector<GridJet> power = y;
  for (int j = 1; j <= set->degree(); ++j) {
    power = jet_matmul(step, power, k, k, k);
    for (int i = 0; i < k * k; ++i) result[i] += power[i];
  }
  return result;
}

}  // namespace kam
