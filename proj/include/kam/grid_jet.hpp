#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "kam/multi_index.hpp"

namespace kam {

/// Truncated polynomial in r whose coefficients are real samples on a grid.
/// Coefficients never written are tracked as structurally zero so products
/// skip them.
class GridJet {
 public:
  GridJet() = default;
  GridJet(std::shared_ptr<const MonomialSet> set, std::size_t points);

  static GridJet constant(std::shared_ptr<const MonomialSet> set, std::size_t points, double value);

  const MonomialSet& monomials() const { return *set_; }
  const std::shared_ptr<const MonomialSet>& monomial_set() const { return set_; }
  std::size_t points() const { return points_; }

  /// Mutable access marks the coefficient as possibly nonzero.
  std::span<double> coef(int mono);
  std::span<const double> coef(int mono) const {
    return {data_.data() + mono * points_, points_};
  }
  bool is_zero(int mono) const { return !nonzero_[mono]; }

  GridJet& operator+=(const GridJet& other);
  GridJet& operator-=(const GridJet& other);
  GridJet& operator*=(double s);
  /// this += s * a * b, truncated at the set's degree.
  void add_product(const GridJet& a, const GridJet& b, double s = 1.0);
  /// this += s * a * w where w is a pointwise weight (a jet of degree 0).
  void add_weighted(const GridJet& a, std::span<const double> w, double s = 1.0);

  /// Partial derivative with respect to r_var.
  GridJet derivative(int var) const;
  /// Largest absolute sample of coefficient `mono`.
  double sup(int mono) const;

 private:
  std::shared_ptr<const MonomialSet> set_;
  std::size_t points_ = 0;
  std::vector<double> data_;
  std::vector<char> nonzero_;
};

GridJet operator*(const GridJet& a, const GridJet& b);
GridJet operator+(GridJet a, const GridJet& b);
GridJet operator-(GridJet a, const GridJet& b);

/// Row-major k x c matrix of jets times c x q matrix of jets.
std::vector<GridJet> jet_matmul(std::span<const GridJet> a, std::span<const GridJet> b, int k,
                                int c, int q);

/// Inverse of a k x k matrix of jets: pointwise inverse of the constant
/// part, then the Neumann series in the nilpotent remainder.
std::vector<GridJet> jet_matrix_inverse(std::span<const GridJet> x, int k);

}  // namespace kam
