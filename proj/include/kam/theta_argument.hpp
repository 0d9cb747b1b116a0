#pragma once

#include <memory>
#include <vector>

#include "kam/fourier_series.hpp"
#include "kam/grid_jet.hpp"

namespace kam {

/// Evaluates Fourier series at the moving argument theta + c + D(theta, r)
/// over the grid points theta, producing r-jets.
///
/// When K * sum_i sup|D_i(theta, 0)| is small the series is expanded in
/// Taylor form around theta + c, with derivatives and shifts taken in
/// Fourier space; otherwise the base point theta + c + D(theta, 0) is summed
/// directly and only the r-dependent part of D is expanded.
class ThetaArgument {
 public:
  struct Options {
    double taylor_limit = 2.5;  // largest K*sup|D0| handled by expansion
    int max_terms = 60;
    double term_tol = 1e-17;
  };

  ThetaArgument(const GridSpec& grid, int cutoff, std::vector<double> shift,
                std::vector<GridJet> displacement);
  ThetaArgument(const GridSpec& grid, int cutoff, std::vector<double> shift,
                std::vector<GridJet> displacement, Options opts);

  const GridSpec& grid() const { return grid_; }
  bool uses_taylor() const { return taylor_; }
  int terms() const { return terms_; }
  const std::shared_ptr<const MonomialSet>& jet_set() const { return set_; }

  /// Scalar real series -> jet of its values at the moving argument.
  GridJet evaluate(const FourierSeries& f) const;

 private:
  void prepare_taylor(double rho);
  void prepare_direct();
  std::vector<double> derivative_on_grid(const FourierSeries& f, std::span<const int> gamma) const;

  GridSpec grid_;
  int cutoff_;
  std::vector<double> shift_;
  std::vector<GridJet> disp_;
  Options opts_;
  std::shared_ptr<const MonomialSet> set_;
  bool taylor_ = true;
  int terms_ = 0;
  // Taylor mode: multi-indices gamma over theta and jets D^gamma / gamma!.
  std::unique_ptr<MonomialSet> gammas_;
  std::vector<GridJet> powers_;
  // Direct mode: base points and jets Dr^beta / beta!.
  std::vector<std::vector<double>> base_;
};

}  // namespace kam
