#include "kam/theta_argument.hpp"

#include <algorithm>
#include <cmath>

#include "kam/errors.hpp"

namespace kam {

namespace {

std::size_t grid_slot(std::span<const int> k, int N) {
  std::size_t idx = 0;
  for (int kj : k) {
    int r = kj % N;
    if (r < 0) r += N;
    idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>(r);
  }
  return idx;
}

cplx ik_power(std::span<const int> k, std::span<const int> gamma) {
  cplx f(1.0, 0.0);
  for (std::size_t j = 0; j < k.size(); ++j)
    for (int e = 0; e < gamma[j]; ++e) f *= cplx(0.0, static_cast<double>(k[j]));
  return f;
}

}  // namespace

ThetaArgument::ThetaArgument(const GridSpec& grid, int cutoff, std::vector<double> shift,
                             std::vector<GridJet> displacement)
    : ThetaArgument(grid, cutoff, std::move(shift), std::move(displacement), Options{}) {}

ThetaArgument::ThetaArgument(const GridSpec& grid, int cutoff, std::vector<double> shift,
                             std::vector<GridJet> displacement, Options opts)
    : grid_(grid), cutoff_(cutoff), shift_(std::move(shift)), disp_(std::move(displacement)),
      opts_(opts) {
  const int n = grid.dim;
  if (static_cast<int>(shift_.size()) != n || static_cast<int>(disp_.size()) != n)
    throw ShapeError("ThetaArgument: shift/displacement must have one entry per angle");
  for (const auto& d : disp_)
    if (d.points() != grid.size()) throw ShapeError("ThetaArgument: displacement grid mismatch");
  set_ = disp_[0].monomial_set();
  double sup0 = 0.0;
  for (const auto& d : disp_) sup0 += d.sup(0);
  const double rho = cutoff * sup0;
  if (rho <= opts_.taylor_limit) {
    prepare_taylor(rho);
  } else {
    prepare_direct();
  }
}

void ThetaArgument::prepare_taylor(double rho) {
  taylor_ = true;
  const int n = grid_.dim;
  bool r_dependent = false;
  for (const auto& d : disp_)
    for (int mono = 1; mono < set_->size(); ++mono) r_dependent = r_dependent || !d.is_zero(mono);
  int extra = 0;
  if (rho > 0.0) {
    // smallest j with rho^(j+1)/(j+1)! below the term tolerance, plus slack
    double term = rho;
    int j = 0;
    while (term >= opts_.term_tol && j < opts_.max_terms) {
      ++j;
      term *= rho / (j + 1);
    }
    extra = j + 2;
  }
  terms_ = std::min((r_dependent ? set_->degree() : 0) + extra, opts_.max_terms);
  gammas_ = std::make_unique<MonomialSet>(n, terms_);
  powers_.clear();
  powers_.reserve(gammas_->size());
  powers_.push_back(GridJet::constant(set_, grid_.size(), 1.0));
  for (int g = 1; g < gammas_->size(); ++g) {
    const auto& e = gammas_->exponent(g);
    int var = 0;
    while (e[var] == 0) ++var;
    GridJet p(set_, grid_.size());
    p.add_product(powers_[gammas_->lower(g, var)], disp_[var], 1.0 / e[var]);
    powers_.push_back(std::move(p));
  }
}

void ThetaArgument::prepare_direct() {
  taylor_ = false;
  const int n = grid_.dim;
  const std::size_t pts = grid_.size();
  base_.assign(n, std::vector<double>(pts));
  for (std::size_t p = 0; p < pts; ++p) {
    const auto theta = grid_.point(p);
    for (int i = 0; i < n; ++i) base_[i][p] = theta[i] + shift_[i] + disp_[i].coef(0)[p];
  }
  std::vector<GridJet> rest;
  for (const auto& d : disp_) {
    GridJet t = d;
    std::fill(t.coef(0).begin(), t.coef(0).end(), 0.0);
    rest.push_back(std::move(t));
  }
  terms_ = set_->degree();
  gammas_ = std::make_unique<MonomialSet>(n, terms_);
  powers_.clear();
  powers_.push_back(GridJet::constant(set_, pts, 1.0));
  for (int g = 1; g < gammas_->size(); ++g) {
    const auto& e = gammas_->exponent(g);
    int var = 0;
    while (e[var] == 0) ++var;
    GridJet p(set_, pts);
    p.add_product(powers_[gammas_->lower(g, var)], rest[var], 1.0 / e[var]);
    powers_.push_back(std::move(p));
  }
}

std::vector<double> ThetaArgument::derivative_on_grid(const FourierSeries& f,
                                                      std::span<const int> gamma) const {
  std::vector<cplx> work(grid_.size(), cplx(0.0, 0.0));
  for (std::size_t m = 0; m < f.num_modes(); ++m) {
    const cplx c = f.coeff(m);
    if (c == cplx(0.0, 0.0)) continue;
    const auto k = f.mode(m);
    double phase = 0.0;
    for (std::size_t j = 0; j < k.size(); ++j) phase += k[j] * shift_[j];
    work[grid_slot(k, grid_.points_per_axis)] = c * ik_power(k, gamma) * std::polar(1.0, phase);
  }
  dft_inverse(grid_, work);
  std::vector<double> out(work.size());
  std::transform(work.begin(), work.end(), out.begin(), [](cplx z) { return z.real(); });
  return out;
}

GridJet ThetaArgument::evaluate(const FourierSeries& fin) const {
  if (fin.components() != 1 || fin.dim() != grid_.dim)
    throw ShapeError("ThetaArgument: expects a scalar series on the grid's torus");
  const FourierSeries f = fin.cutoff() == cutoff_ ? fin : fin.with_cutoff(cutoff_);
  GridJet out(set_, grid_.size());
  if (f.max_abs() == 0.0) return out;

  if (taylor_) {
    for (int g = 0; g < gammas_->size(); ++g) {
      bool zero = true;
      for (int mono = 0; mono < set_->size(); ++mono) zero = zero && powers_[g].is_zero(mono);
      if (zero) continue;
      const auto vals = derivative_on_grid(f, gammas_->exponent(g));
      out.add_weighted(powers_[g], vals);
    }
    return out;
  }

  // Direct summation of every derivative at the moving base points.
  const int n = grid_.dim;
  const int K = cutoff_;
  const int w = 2 * K + 1;
  const int ng = gammas_->size();
  const std::size_t modes = f.num_modes();
  std::vector<cplx> factor(modes * ng);
  for (std::size_t m = 0; m < modes; ++m) {
    const auto k = f.mode(m);
    for (int g = 0; g < ng; ++g) factor[m * ng + g] = f.coeff(m) * ik_power(k, gammas_->exponent(g));
  }
  std::vector<std::vector<double>> vals(ng, std::vector<double>(grid_.size()));
  std::vector<std::vector<cplx>> table(n, std::vector<cplx>(w));
  std::vector<cplx> acc(ng);
  std::vector<int> idx(n);
  for (std::size_t p = 0; p < grid_.size(); ++p) {
    for (int j = 0; j < n; ++j) {
      const cplx e1 = std::polar(1.0, base_[j][p]);
      cplx e = std::polar(1.0, -K * base_[j][p]);
      for (int t = 0; t < w; ++t) {
        table[j][t] = e;
        e *= e1;
      }
    }
    std::fill(acc.begin(), acc.end(), cplx(0.0, 0.0));
    std::fill(idx.begin(), idx.end(), 0);
    for (std::size_t m = 0; m < modes; ++m) {
      cplx e(1.0, 0.0);
      for (int j = 0; j < n; ++j) e *= table[j][idx[j]];
      for (int g = 0; g < ng; ++g) acc[g] += factor[m * ng + g] * e;
      for (int j = n - 1; j >= 0; --j) {
        if (++idx[j] < w) break;
        idx[j] = 0;
      }
    }
    for (int g = 0; g < ng; ++g) vals[g][p] = acc[g].real();
  }
  for (int g = 0; g < ng; ++g) out.add_weighted(powers_[g], vals[g]);
  return out;
}

}  // namespace kam
