#pragma once

#include <memory>
#include <span>
#include <vector>

#include "kam/fourier_series.hpp"
#include "kam/grid_jet.hpp"
#include "kam/multi_index.hpp"

namespace kam {

struct MapPoint {
  std::vector<double> theta;
  std::vector<double> r;
};

/// Selects one jet: the theta or the r component, at a given r-order.
struct JetSlot {
  bool theta = false;
  int order = 0;
};

class FourierTaylorMap;

struct JetTruncation;

/// Germ of a map of T^n x R^m near r = 0, stored as degree-d jets in r:
///
///   theta -> theta + c + sum_nu u_nu(theta) r^nu   (u_nu vector(n) series)
///   r     ->         sum_nu g_nu(theta) r^nu       (g_nu vector(m) series)
///
/// Linear operations (add, scale) act on the displacement (F_theta - theta,
/// F_r). The validity radius bounds the r-offsets accepted from inner maps
/// in composition.
class FourierTaylorMap {
 public:
  FourierTaylorMap() = default;
  FourierTaylorMap(int n, int m, int degree, int cutoff, double validity_radius = 0.5);

  static FourierTaylorMap identity(int n, int m, int degree, int cutoff);

  int n() const { return n_; }
  int m() const { return m_; }
  int degree() const { return degree_; }
  int cutoff() const { return cutoff_; }
  double validity_radius() const { return radius_; }
  void set_validity_radius(double r) { radius_ = r; }
  const MonomialSet& monomials() const { return *set_; }
  const std::shared_ptr<const MonomialSet>& monomial_set() const { return set_; }

  const std::vector<double>& rotation() const { return rotation_; }
  void set_rotation(std::vector<double> c);

  FourierSeries& theta_coeff(int mono) { return theta_[mono]; }
  const FourierSeries& theta_coeff(int mono) const { return theta_[mono]; }
  FourierSeries& r_coeff(int mono) { return r_[mono]; }
  const FourierSeries& r_coeff(int mono) const { return r_[mono]; }

  /// Order-i jet as a matrix series: rows are the output components, columns
  /// the monomials of order i. Order 0 of the theta part excludes the
  /// rotation constant; order 1 of the r part is the m x m linear part.
  FourierSeries theta_jet(int order) const;
  FourierSeries r_jet(int order) const;
  void set_theta_jet(int order, const FourierSeries& jet);
  void set_r_jet(int order, const FourierSeries& jet);

  /// F o H, truncated at degree d. Throws DomainError when an r-offset of H
  /// exceeds this map's validity radius.
  FourierTaylorMap compose(const FourierTaylorMap& inner) const;
  /// Same with an explicit grid size per axis for the sampling.
  FourierTaylorMap compose(const FourierTaylorMap& inner, int grid_points) const;

  MapPoint eval(std::span<const double> theta, std::span<const double> r) const;

  /// Jets of the displacement sampled on a grid (theta components, then r).
  std::vector<GridJet> to_grid_jets(const GridSpec& grid) const;
  /// Inverse of to_grid_jets; `rotation` is kept separate.
  static FourierTaylorMap from_grid_jets(const GridSpec& grid, int cutoff, int n, int m,
                                         std::span<const GridJet> jets,
                                         std::vector<double> rotation, double validity_radius);

  FourierTaylorMap& operator+=(const FourierTaylorMap& other);
  FourierTaylorMap& operator-=(const FourierTaylorMap& other);
  FourierTaylorMap& operator*=(double s);
  friend FourierTaylorMap operator+(FourierTaylorMap a, const FourierTaylorMap& b) { return a += b; }
  friend FourierTaylorMap operator-(FourierTaylorMap a, const FourierTaylorMap& b) { return a -= b; }
  friend FourierTaylorMap operator*(double s, FourierTaylorMap a) { return a *= s; }

  /// Zeroes the requested jets; returns the truncated map and the removed
  /// jets in request order.
  JetTruncation jet_truncate(std::span<const JetSlot> slots) const;

  /// Copy at another degree (extra jets zero) or another cutoff.
  FourierTaylorMap with_degree(int degree) const;
  FourierTaylorMap with_cutoff(int cutoff) const;

  /// Largest coefficient difference over rotation and all jets.
  double max_abs_diff(const FourierTaylorMap& other) const;

 private:
  void check_same_layout(const FourierTaylorMap& other, const char* op) const;

  int n_ = 0;
  int m_ = 0;
  int degree_ = 0;
  int cutoff_ = 0;
  double radius_ = 0.5;
  std::shared_ptr<const MonomialSet> set_;
  std::vector<double> rotation_;
  std::vector<FourierSeries> theta_;
  std::vector<FourierSeries> r_;
};

struct JetTruncation {
  FourierTaylorMap map;
  std::vector<FourierSeries> removed;
};

/// Sampling grid used by composition: 2(2K+1) points per axis on T^1 and
/// 2K+2 on higher-dimensional tori.
int default_compose_points(int n, int cutoff);

}  // namespace kam
