#include "kam/fourier_taylor.hpp"

#include <algorithm>
#include <cmath>

#include "kam/errors.hpp"
#include "kam/theta_argument.hpp"

namespace kam {

int default_compose_points(int n, int cutoff) {
  return n == 1 ? dealiased_grid_size(cutoff) : 2 * cutoff + 2;
}

FourierTaylorMap::FourierTaylorMap(int n, int m, int degree, int cutoff, double validity_radius)
    : n_(n), m_(m), degree_(degree), cutoff_(cutoff), radius_(validity_radius) {
  if (n < 1 || m < 0) throw ShapeError("FourierTaylorMap: bad dimensions");
  if (degree < 0) throw ShapeError("FourierTaylorMap: negative degree");
  set_ = std::make_shared<const MonomialSet>(m, degree);
  rotation_.assign(n, 0.0);
  theta_.assign(set_->size(), FourierSeries(n, cutoff, Shape::vector(n)));
  r_.assign(set_->size(), FourierSeries(n, cutoff, Shape::vector(std::max(m, 1))));
}

FourierTaylorMap FourierTaylorMap::identity(int n, int m, int degree, int cutoff) {
  FourierTaylorMap f(n, m, degree, cutoff);
  if (degree >= 1) {
    const std::size_t z = f.r_[0].zero_mode_index();
    for (int j = 0; j < m; ++j) f.r_[f.set_->unit(j)].coeff(z, j) = 1.0;
  }
  return f;
}

void FourierTaylorMap::set_rotation(std::vector<double> c) {
  if (static_cast<int>(c.size()) != n_) throw ShapeError("set_rotation: dimension mismatch");
  rotation_ = std::move(c);
}

FourierSeries FourierTaylorMap::theta_jet(int order) const {
  if (order < 0 || order > degree_) throw ShapeError("theta_jet: order out of range");
  const auto monos = set_->of_order(order);
  const int cols = static_cast<int>(monos.size());
  FourierSeries out(n_, cutoff_, Shape{n_, cols});
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < cols; ++j) out.set_component(i * cols + j, theta_[monos[j]].component(i));
  return out;
}

FourierSeries FourierTaylorMap::r_jet(int order) const {
  if (order < 0 || order > degree_) throw ShapeError("r_jet: order out of range");
  const auto monos = set_->of_order(order);
  const int cols = static_cast<int>(monos.size());
  FourierSeries out(n_, cutoff_, Shape{m_, cols});
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < cols; ++j) out.set_component(i * cols + j, r_[monos[j]].component(i));
  return out;
}

void FourierTaylorMap::set_theta_jet(int order, const FourierSeries& jet) {
  if (order < 0 || order > degree_) throw ShapeError("set_theta_jet: order out of range");
  const auto monos = set_->of_order(order);
  const int cols = static_cast<int>(monos.size());
  if (jet.shape() != Shape{n_, cols}) throw ShapeError("set_theta_jet: shape mismatch");
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < cols; ++j) theta_[monos[j]].set_component(i, jet.component(i * cols + j));
}

void FourierTaylorMap::set_r_jet(int order, const FourierSeries& jet) {
  if (order < 0 || order > degree_) throw ShapeError("set_r_jet: order out of range");
  const auto monos = set_->of_order(order);
  const int cols = static_cast<int>(monos.size());
  if (jet.shape() != Shape{m_, cols}) throw ShapeError("set_r_jet: shape mismatch");
  for (int i = 0; i < m_; ++i)
    for (int j = 0; j < cols; ++j) r_[monos[j]].set_component(i, jet.component(i * cols + j));
}

std::vector<GridJet> FourierTaylorMap::to_grid_jets(const GridSpec& grid) const {
  std::vector<GridJet> jets;
  for (int c = 0; c < n_ + m_; ++c) jets.emplace_back(set_, grid.size());
  const std::size_t pts = grid.size();
  for (int mono = 0; mono < set_->size(); ++mono) {
    if (theta_[mono].max_abs() != 0.0) {
      const auto v = theta_[mono].to_real_grid(grid);
      for (int i = 0; i < n_; ++i) std::copy_n(v.begin() + i * pts, pts, jets[i].coef(mono).begin());
    }
    if (m_ > 0 && r_[mono].max_abs() != 0.0) {
      const auto v = r_[mono].to_real_grid(grid);
      for (int j = 0; j < m_; ++j)
        std::copy_n(v.begin() + j * pts, pts, jets[n_ + j].coef(mono).begin());
    }
  }
  return jets;
}

FourierTaylorMap FourierTaylorMap::from_grid_jets(const GridSpec& grid, int cutoff, int n, int m,
                                                  std::span<const GridJet> jets,
                                                  std::vector<double> rotation,
                                                  double validity_radius) {
  const int degree = jets[0].monomials().degree();
  FourierTaylorMap out(n, m, degree, cutoff, validity_radius);
  out.set_rotation(std::move(rotation));
  for (int mono = 0; mono < out.set_->size(); ++mono) {
    for (int c = 0; c < n + m; ++c) {
      if (jets[c].is_zero(mono)) continue;
      auto s = FourierSeries::from_real_grid(grid, cutoff, Shape::scalar(), jets[c].coef(mono));
      if (c < n) {
        out.theta_[mono].set_component(c, s);
      } else {
        out.r_[mono].set_component(c - n, s);
      }
    }
  }
  return out;
}

FourierTaylorMap FourierTaylorMap::compose(const FourierTaylorMap& inner) const {
  return compose(inner, default_compose_points(n_, cutoff_));
}

FourierTaylorMap FourierTaylorMap::compose(const FourierTaylorMap& inner, int grid_points) const {
  check_same_layout(inner, "compose");
  const GridSpec grid{n_, grid_points};
  auto jets = inner.to_grid_jets(grid);
  for (int j = 0; j < m_; ++j) {
    const double off = jets[n_ + j].sup(0);
    if (off > radius_)
      throw DomainError("compose: inner r-offset " + std::to_string(off) +
                        " exceeds validity radius " + std::to_string(radius_));
  }
  std::vector<GridJet> disp(jets.begin(), jets.begin() + n_);
  std::vector<GridJet> v(jets.begin() + n_, jets.end());
  const ThetaArgument arg(grid, cutoff_, inner.rotation_, disp);

  // V^mu for every outer monomial.
  std::vector<GridJet> vpow;
  vpow.push_back(GridJet::constant(set_, grid.size(), 1.0));
  for (int mono = 1; mono < set_->size(); ++mono) {
    const auto& e = set_->exponent(mono);
    int var = 0;
    while (e[var] == 0) ++var;
    vpow.push_back(vpow[set_->lower(mono, var)] * v[var]);
  }

  std::vector<GridJet> out;
  for (int i = 0; i < n_; ++i) out.push_back(disp[i]);
  for (int j = 0; j < m_; ++j) out.emplace_back(set_, grid.size());
  for (int mono = 0; mono < set_->size(); ++mono) {
    const bool th = theta_[mono].max_abs() != 0.0;
    const bool rr = m_ > 0 && r_[mono].max_abs() != 0.0;
    for (int i = 0; th && i < n_; ++i) {
      const auto val = arg.evaluate(theta_[mono].component(i));
      out[i].add_product(val, vpow[mono]);
    }
    for (int j = 0; rr && j < m_; ++j) {
      const auto val = arg.evaluate(r_[mono].component(j));
      out[n_ + j].add_product(val, vpow[mono]);
    }
  }
  std::vector<double> rot(n_);
  for (int i = 0; i < n_; ++i) rot[i] = rotation_[i] + inner.rotation_[i];
  return from_grid_jets(grid, cutoff_, n_, m_, out, rot, inner.radius_);
}

MapPoint FourierTaylorMap::eval(std::span<const double> theta, std::span<const double> r) const {
  if (static_cast<int>(theta.size()) != n_ || static_cast<int>(r.size()) != m_)
    throw ShapeError("eval: point dimension mismatch");
  MapPoint out{std::vector<double>(theta.begin(), theta.end()), std::vector<double>(m_, 0.0)};
  for (int i = 0; i < n_; ++i) out.theta[i] += rotation_[i];
  for (int mono = 0; mono < set_->size(); ++mono) {
    double w = 1.0;
    const auto& e = set_->exponent(mono);
    for (int j = 0; j < m_; ++j) w *= std::pow(r[j], e[j]);
    if (theta_[mono].max_abs() != 0.0) {
      const auto v = theta_[mono].eval_real(theta);
      for (int i = 0; i < n_; ++i) out.theta[i] += w * v(i, 0);
    }
    if (m_ > 0 && r_[mono].max_abs() != 0.0) {
      const auto v = r_[mono].eval_real(theta);
      for (int j = 0; j < m_; ++j) out.r[j] += w * v(j, 0);
    }
  }
  return out;
}

void FourierTaylorMap::check_same_layout(const FourierTaylorMap& other, const char* op) const {
  if (n_ != other.n_ || m_ != other.m_)
    throw ShapeError(std::string(op) + ": dimension mismatch");
  if (degree_ != other.degree_ || cutoff_ != other.cutoff_)
    throw ShapeError(std::string(op) + ": degree or cutoff mismatch");
}

FourierTaylorMap& FourierTaylorMap::operator+=(const FourierTaylorMap& other) {
  check_same_layout(other, "add");
  for (int i = 0; i < n_; ++i) rotation_[i] += other.rotation_[i];
  for (int mono = 0; mono < set_->size(); ++mono) {
    theta_[mono] += other.theta_[mono];
    r_[mono] += other.r_[mono];
  }
  return *this;
}

FourierTaylorMap& FourierTaylorMap::operator-=(const FourierTaylorMap& other) {
  check_same_layout(other, "subtract");
  for (int i = 0; i < n_; ++i) rotation_[i] -= other.rotation_[i];
  for (int mono = 0; mono < set_->size(); ++mono) {
    theta_[mono] -= other.theta_[mono];
    r_[mono] -= other.r_[mono];
  }
  return *this;
}

FourierTaylorMap& FourierTaylorMap::operator*=(double s) {
  for (auto& c : rotation_) c *= s;
  for (auto& t : theta_) t *= s;
  for (auto& t : r_) t *= s;
  return *this;
}

JetTruncation FourierTaylorMap::jet_truncate(std::span<const JetSlot> slots) const {
  JetTruncation out{*this, {}};
  for (const auto& slot : slots) {
    if (slot.theta) {
      out.removed.push_back(theta_jet(slot.order));
      for (int mono : set_->of_order(slot.order))
        out.map.theta_[mono] = FourierSeries(n_, cutoff_, Shape::vector(n_));
    } else {
      out.removed.push_back(r_jet(slot.order));
      for (int mono : set_->of_order(slot.order))
        out.map.r_[mono] = FourierSeries(n_, cutoff_, Shape::vector(std::max(m_, 1)));
    }
  }
  return out;
}

FourierTaylorMap FourierTaylorMap::with_degree(int degree) const {
  FourierTaylorMap out(n_, m_, degree, cutoff_, radius_);
  out.rotation_ = rotation_;
  for (int mono = 0; mono < out.set_->size(); ++mono) {
    const int src = set_->index(out.set_->exponent(mono));
    if (src < 0) continue;
    out.theta_[mono] = theta_[src];
    out.r_[mono] = r_[src];
  }
  return out;
}

FourierTaylorMap FourierTaylorMap::with_cutoff(int cutoff) const {
  FourierTaylorMap out(n_, m_, degree_, cutoff, radius_);
  out.rotation_ = rotation_;
  for (int mono = 0; mono < set_->size(); ++mono) {
    out.theta_[mono] = theta_[mono].with_cutoff(cutoff);
    out.r_[mono] = r_[mono].with_cutoff(cutoff);
  }
  return out;
}

double FourierTaylorMap::max_abs_diff(const FourierTaylorMap& other) const {
  check_same_layout(other, "max_abs_diff");
  double d = 0.0;
  for (int i = 0; i < n_; ++i) d = std::max(d, std::abs(rotation_[i] - other.rotation_[i]));
  for (int mono = 0; mono < set_->size(); ++mono) {
    d = std::max(d, theta_[mono].max_abs_diff(other.theta_[mono]));
    d = std::max(d, r_[mono].max_abs_diff(other.r_[mono]));
  }
  return d;
}

}  // namespace kam
