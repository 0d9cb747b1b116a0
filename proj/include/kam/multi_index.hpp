#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>
#include <vector>

namespace kam {

/// Monomials r^nu in `vars` variables of total degree <= `degree`.
///
/// Index 0 is the constant monomial, indices 1..vars are r_0..r_{vars-1};
/// higher monomials follow graded by degree, lexicographically descending
/// inside a degree.
class MonomialSet {
 public:
  MonomialSet(int vars, int degree);

  int vars() const { return vars_; }
  int degree() const { return degree_; }
  int size() const { return static_cast<int>(exps_.size()); }

  const std::vector<int>& exponent(int i) const { return exps_[i]; }
  int order(int i) const { return order_[i]; }
  /// nu! = prod_j nu_j!
  double factorial(int i) const { return fact_[i]; }

  /// Index of a monomial, or -1 when its degree exceeds the set's degree.
  int index(std::span<const int> exps) const;
  /// Index of the product of monomials i and j, or -1 if truncated away.
  int product(int i, int j) const;
  int unit(int var) const { return 1 + var; }
  /// Indices of monomials of exact order k.
  std::vector<int> of_order(int k) const;
  /// Index of nu - e_var, or -1 if nu_var == 0.
  int lower(int i, int var) const;

 private:
  std::uint64_t key(std::span<const int> exps) const;

  int vars_;
  int degree_;
  std::vector<std::vector<int>> exps_;
  std::vector<int> order_;
  std::vector<double> fact_;
  std::vector<std::uint64_t> keys_;
  std::unordered_map<std::uint64_t, int> lookup_;
};

}  // namespace kam
