#include "kam/multi_index.hpp"

#include <functional>

#include "kam/errors.hpp"

namespace kam {

MonomialSet::MonomialSet(int vars, int degree) : vars_(vars), degree_(degree) {
  if (vars < 0 || degree < 0) throw ShapeError("MonomialSet: negative size");
  std::vector<int> cur(vars, 0);
  // Exponent vectors of sum k, lexicographically descending.
  std::function<void(int, int, int)> fill = [&](int pos, int left, int k) {
    if (pos == vars - 1 || vars == 0) {
      if (vars > 0) cur[pos] = left;
      exps_.push_back(cur);
      order_.push_back(k);
      return;
    }
    for (int e = left; e >= 0; --e) {
      cur[pos] = e;
      fill(pos + 1, left - e, k);
    }
    cur[pos] = 0;
  };
  for (int k = 0; k <= degree; ++k) {
    if (vars == 0 && k > 0) break;
    fill(0, k, k);
  }
  for (const auto& e : exps_) {
    double f = 1.0;
    for (int v : e)
      for (int t = 2; t <= v; ++t) f *= t;
    fact_.push_back(f);
    keys_.push_back(key(e));
    lookup_.emplace(keys_.back(), static_cast<int>(keys_.size()) - 1);
  }
}

std::uint64_t MonomialSet::key(std::span<const int> exps) const {
  std::uint64_t k = 0;
  for (int e : exps) k = k * static_cast<std::uint64_t>(degree_ + 1) + static_cast<std::uint64_t>(e);
  return k;
}

int MonomialSet::index(std::span<const int> exps) const {
  if (static_cast<int>(exps.size()) != vars_) throw ShapeError("MonomialSet: wrong exponent length");
  int total = 0;
  for (int e : exps) {
    if (e < 0) throw ShapeError("MonomialSet: negative exponent");
    total += e;
  }
  if (total > degree_) return -1;
  return lookup_.at(key(exps));
}

int MonomialSet::product(int i, int j) const {
  if (order_[i] + order_[j] > degree_) return -1;
  // No carries: each exponent of the sum is bounded by the total degree.
  return lookup_.at(keys_[i] + keys_[j]);
}

std::vector<int> MonomialSet::of_order(int k) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i)
    if (order_[i] == k) out.push_back(i);
  return out;
}

int MonomialSet::lower(int i, int var) const {
  if (exps_[i][var] == 0) return -1;
  auto e = exps_[i];
  --e[var];
  return index(e);
}

}  // namespace kam
